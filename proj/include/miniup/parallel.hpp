#pragma once

#include <functional>

namespace miniup {

/// Runs body(begin, end) over [0, n) split into at most `threads` contiguous
/// chunks. Chunking depends only on (n, threads), and callers only ever write
/// disjoint output slots, so results are bitwise identical for any thread
/// count, including 1 (which runs inline).
void parallel_for(int n, int threads, const std::function<void(int, int)>& body);

/// Default worker count: the MINIUP_THREADS environment variable if set and
/// positive, otherwise 1.
int default_thread_count();

} // namespace miniup
