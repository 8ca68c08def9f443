#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "miniup/cloth.hpp"

namespace miniup {

/// Aerodynamic drag acting on the cloth's grid triangles.
/// Wind velocity = direction * strength.
struct Wind {
    Vec3 direction = Vec3::UnitZ(); // unit vector
    double strength = 0.0;          // [m/s]
    double drag = 1.0;              // drag coefficient [kg / m^2 / ...]; force scale
};

struct SphereCollider {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    double friction = 0.0; // in [0, 1]; 1 kills all tangential velocity on contact
};

enum class LinearSolverKind : uint8_t { Direct = 0, Iterative = 1 };
enum class OnNonconverged : uint8_t { Error = 0, Accept = 1 };

/// Settings for the per-frame implicit solve (local-global fixed point with
/// a pre-factorized or iterative linear solve in the global step).
struct SolverConfig {
    int max_iterations = 50;
    double tolerance = 1e-6; // relative position change between iterations
    LinearSolverKind linear_solver = LinearSolverKind::Direct;
    int cg_max_iterations = 200;  // iterative mode only
    double cg_tolerance = 1e-10;  // iterative mode only
    OnNonconverged on_nonconverged = OnNonconverged::Error;

    void validate() const; // throws std::invalid_argument
};

/// Everything needed to run one cloth scene. This is the unit that gets
/// down-scaled when building a miniature system.
struct SceneConfig {
    GridClothSpec cloth;
    Vec3 origin = Vec3::Zero(); // rest-grid corner (particle 0)
    Plane plane = Plane::XY;
    std::vector<int> pinned;    // particle indices held at their initial positions
    Vec3 gravity = Vec3(0.0, -9.8, 0.0);
    std::optional<Wind> wind;
    std::vector<SphereCollider> colliders;
    double time_step = 1.0 / 30.0; // [s]
    int frame_count = 0;
    SolverConfig solver;

    void validate() const; // throws std::invalid_argument

    /// Deterministic content hash over all physical fields; used to tag
    /// trajectory files with their provenance.
    uint64_t hash() const;
};

} // namespace miniup
