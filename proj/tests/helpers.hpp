#pragma once

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "miniup/cloth.hpp"

namespace testutil {

/// Runs fn, requires it to throw E, and checks the message contains `part`.
template <typename E, typename F>
void check_throws_with(F&& fn, const std::string& part) {
    try {
        fn();
        FAIL_CHECK("expected an exception containing \"" << part << "\", none thrown");
    } catch (const E& e) {
        const std::string msg = e.what();
        if (msg.find(part) == std::string::npos)
            FAIL_CHECK("message \"" << msg << "\" does not contain \"" << part << "\"");
    }
}

inline bool bits_equal(const miniup::Vec3& a, const miniup::Vec3& b) {
    return a.x() == b.x() && a.y() == b.y() && a.z() == b.z();
}

inline bool bits_equal(const std::vector<miniup::Vec3>& a, const std::vector<miniup::Vec3>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!bits_equal(a[i], b[i])) return false;
    return true;
}

inline bool bits_equal(const std::vector<std::vector<miniup::Vec3>>& a,
                       const std::vector<std::vector<miniup::Vec3>>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!bits_equal(a[i], b[i])) return false;
    return true;
}

inline std::string read_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::mt19937_64 gen(std::random_device{}());
        path = std::filesystem::temp_directory_path() /
               ("miniup_test_" + std::to_string(gen()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace testutil
