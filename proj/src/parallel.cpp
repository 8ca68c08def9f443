#include "miniup/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace miniup {

void parallel_for(int n, int threads, const std::function<void(int, int)>& body) {
    if (n <= 0) return;
    if (threads > n) threads = n;
    if (threads <= 1) {
        body(0, n);
        return;
    }
    const int chunk = (n + threads - 1) / threads;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& w : workers) w.join();
}

int default_thread_count() {
    if (const char* env = std::getenv("MINIUP_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

} // namespace miniup
