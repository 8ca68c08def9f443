#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <vector>

#include "miniup/cloth.hpp"
#include "miniup/frames.hpp"
#include "miniup/scene.hpp"

namespace miniup {

// External forces evaluated at the current state: gravity, velocity damping
// (force = -damping * mass * velocity) and optional triangle wind drag.
// Gravity and damping use the scene's uniform particle mass. When wind is
// present the state must have scene.cloth.particle_count() particles, since
// the wind triangles are derived from the grid.
std::vector<Vec3> external_force(const SceneConfig& scene, const SimState& state, int threads = 1);

// Total drag force on one triangle (a, b, c): drag * area * ((wind - v_tri) . n) n
// with v_tri the vertex-velocity mean. Each vertex receives a third of it.
// Degenerate triangles contribute zero. Exposed for unit tests.
Vec3 wind_triangle_force(const Vec3& pa, const Vec3& pb, const Vec3& pc,
                         const Vec3& va, const Vec3& vb, const Vec3& vc,
                         const Wind& wind);

// Projects penetrating particles to the sphere surfaces along the radial
// direction; removes the inward normal velocity component and scales the
// tangential one by (1 - friction). A particle exactly at a sphere's center
// is pushed along +y. Colliders are applied in listed order.
SimState collide_spheres(const SimState& state, const std::vector<SphereCollider>& colliders);

struct StepStats {
    int iterations = 0;
    double residual = 0.0;
};

// Implicit Euler via the local-global (block coordinate descent) scheme.
// The global system matrix (M + h^2 L) is constant per scene and factorized
// once at construction. step() solves one frame:
//   dynamics solve, then pinned particles restored to their entry positions
//   with zero velocity, then sphere collision projection.
// Results are identical for any thread count.
class ImplicitSolver {
public:
    ImplicitSolver(const SpringSystem& system, const SceneConfig& scene, const SolverConfig& config);

    SimState step(const SimState& state, int threads = 1, StepStats* stats = nullptr) const;

    const SolverConfig& config() const { return config_; }

private:
    SpringSystem system_;
    SceneConfig scene_;
    SolverConfig config_;
    double h_;
    double max_rest_;
    // per-particle (spring index, signed stiffness) for fixed-order assembly
    std::vector<std::vector<std::pair<int, double>>> incidence_;
    Eigen::SparseMatrix<double> A_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
    mutable Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg_;
};

// One-shot convenience around ImplicitSolver; prefactors on every call, so
// prefer the class when stepping many frames.
SimState step(const SpringSystem& system, const SimState& state, const SceneConfig& scene,
              const SolverConfig& config);

// Runs the scene from its rest state. Frame 0 is the initial state; frames
// 1..frame_count come from repeated step(). Wall-clock per-frame times are
// recorded in the transient frame_ms metadata. Convergence errors are
// rethrown with the offending frame index attached.
FrameSequence simulate(const SceneConfig& scene, const SolverConfig& config, int threads = 1);
FrameSequence simulate(const SceneConfig& scene, int threads = 1);

} // namespace miniup
