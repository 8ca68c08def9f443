#include "miniup/scene.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

namespace miniup {

void SolverConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("solver max_iterations must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be > 0");
    if (cg_max_iterations < 1) throw std::invalid_argument("cg_max_iterations must be >= 1");
    if (!(cg_tolerance > 0.0)) throw std::invalid_argument("cg_tolerance must be > 0");
}

void SceneConfig::validate() const {
    cloth.validate();
    solver.validate();
    if (!(time_step > 0.0)) throw std::invalid_argument("time_step must be > 0");
    if (frame_count < 0) throw std::invalid_argument("frame_count must be >= 0");
    for (int p : pinned)
        if (p < 0 || p >= cloth.particle_count())
            throw std::invalid_argument("pinned index " + std::to_string(p) + " out of range");
    for (const auto& c : colliders) {
        if (!(c.radius > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
        if (c.friction < 0.0 || c.friction > 1.0)
            throw std::invalid_argument("sphere friction must be in [0, 1]");
    }
    if (wind) {
        if (std::abs(wind->direction.norm() - 1.0) > 1e-6)
            throw std::invalid_argument("wind direction must be a unit vector");
        if (wind->drag < 0.0) throw std::invalid_argument("wind drag must be >= 0");
    }
}

namespace {

struct Fnv1a {
    uint64_t h = 1469598103934665603ull;
    void feed(const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    }
    void feed_d(double v) { feed(&v, sizeof v); }
    void feed_i(int64_t v) { feed(&v, sizeof v); }
    void feed_v(const Vec3& v) {
        feed_d(v.x());
        feed_d(v.y());
        feed_d(v.z());
    }
};

} // namespace

uint64_t SceneConfig::hash() const {
    Fnv1a f;
    f.feed_i(cloth.rows);
    f.feed_i(cloth.cols);
    f.feed_d(cloth.spacing);
    f.feed_d(cloth.particle_mass);
    f.feed_d(cloth.k_structural);
    f.feed_d(cloth.k_shear);
    f.feed_d(cloth.k_bend);
    f.feed_d(cloth.damping);
    f.feed_v(origin);
    f.feed_i(static_cast<int64_t>(plane));
    for (int p : pinned) f.feed_i(p);
    f.feed_v(gravity);
    if (wind) {
        f.feed_v(wind->direction);
        f.feed_d(wind->strength);
        f.feed_d(wind->drag);
    }
    for (const auto& c : colliders) {
        f.feed_v(c.center);
        f.feed_d(c.radius);
        f.feed_d(c.friction);
    }
    f.feed_d(time_step);
    f.feed_i(frame_count);
    f.feed_i(solver.max_iterations);
    f.feed_d(solver.tolerance);
    f.feed_i(static_cast<int64_t>(solver.linear_solver));
    return f.h;
}

} // namespace miniup
