#include "miniup/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

#include "miniup/errors.hpp"
#include "miniup/parallel.hpp"

namespace miniup {

namespace {

// Two triangles per grid quad, split along the (r,c)-(r+1,c+1) diagonal.
// Triangle t covers quad t/2; even t is (p00, p10, p11), odd t is (p00, p11, p01).
std::array<int, 3> grid_triangle(const GridClothSpec& spec, int t) {
    const int quad = t / 2;
    const int r = quad / (spec.cols - 1);
    const int c = quad % (spec.cols - 1);
    const int p00 = spec.index(r, c);
    const int p01 = spec.index(r, c + 1);
    const int p10 = spec.index(r + 1, c);
    const int p11 = spec.index(r + 1, c + 1);
    if (t % 2 == 0) return {p00, p10, p11};
    return {p00, p11, p01};
}

int grid_triangle_count(const GridClothSpec& spec) {
    return 2 * (spec.rows - 1) * (spec.cols - 1);
}

} // namespace

Vec3 wind_triangle_force(const Vec3& pa, const Vec3& pb, const Vec3& pc,
                         const Vec3& va, const Vec3& vb, const Vec3& vc,
                         const Wind& wind) {
    const Vec3 n = (pb - pa).cross(pc - pa);
    const double n_len = n.norm();
    if (n_len == 0.0) return Vec3::Zero();
    const Vec3 n_hat = n / n_len;
    const double area = 0.5 * n_len;
    const Vec3 rel = wind.strength * wind.direction - (va + vb + vc) / 3.0;
    return wind.drag * area * rel.dot(n_hat) * n_hat;
}

std::vector<Vec3> external_force(const SceneConfig& scene, const SimState& state, int threads) {
    const int n = state.particle_count();
    const double m = scene.cloth.particle_mass;
    const double c = scene.cloth.damping;
    const Vec3 g = scene.gravity;

    std::vector<Vec3> force(static_cast<size_t>(n));
    parallel_for(n, threads, [&](int begin, int end) {
        for (int p = begin; p < end; ++p)
            force[p] = m * g - c * m * state.velocities[p];
    });

    if (scene.wind) {
        if (scene.cloth.particle_count() != n)
            throw std::invalid_argument("wind requires the state to match the scene grid");
        const int tris = grid_triangle_count(scene.cloth);
        std::vector<Vec3> tri_force(static_cast<size_t>(tris));
        parallel_for(tris, threads, [&](int begin, int end) {
            for (int t = begin; t < end; ++t) {
                auto [a, b, cc] = grid_triangle(scene.cloth, t);
                tri_force[t] = wind_triangle_force(state.positions[a], state.positions[b],
                                                   state.positions[cc], state.velocities[a],
                                                   state.velocities[b], state.velocities[cc],
                                                   *scene.wind) / 3.0;
            }
        });
        // serial scatter in ascending triangle order keeps the sum deterministic
        for (int t = 0; t < tris; ++t) {
            auto [a, b, cc] = grid_triangle(scene.cloth, t);
            force[a] += tri_force[t];
            force[b] += tri_force[t];
            force[cc] += tri_force[t];
        }
    }
    return force;
}

SimState collide_spheres(const SimState& state, const std::vector<SphereCollider>& colliders) {
    SimState out = state;
    for (size_t p = 0; p < out.positions.size(); ++p) {
        Vec3& x = out.positions[p];
        Vec3& v = out.velocities[p];
        for (const SphereCollider& s : colliders) {
            const Vec3 rel = x - s.center;
            const double dist = rel.norm();
            if (dist >= s.radius) continue;
            const Vec3 n_hat = dist == 0.0 ? Vec3(Vec3::UnitY()) : Vec3(rel / dist);
            x = s.center + s.radius * n_hat;
            double vn = v.dot(n_hat);
            const Vec3 vt = v - vn * n_hat;
            if (vn < 0.0) vn = 0.0;
            v = vn * n_hat + (1.0 - s.friction) * vt;
        }
    }
    return out;
}

ImplicitSolver::ImplicitSolver(const SpringSystem& system, const SceneConfig& scene,
                               const SolverConfig& config)
    : system_(system), scene_(scene), config_(config), h_(scene.time_step) {
    config_.validate();
    if (!(h_ > 0.0)) throw std::invalid_argument("time_step must be > 0");
    const int n = system_.particle_count;
    if (static_cast<int>(system_.masses.size()) != n)
        throw std::invalid_argument("mass count does not match particle count");
    for (double m : system_.masses)
        if (!(m > 0.0)) throw std::invalid_argument("particle masses must be > 0");
    for (const Spring& s : system_.springs)
        if (s.a < 0 || s.a >= n || s.b < 0 || s.b >= n || s.a == s.b)
            throw std::invalid_argument("spring endpoints out of range");
    for (int p : scene_.pinned)
        if (p < 0 || p >= n) throw std::invalid_argument("pinned index out of range");

    max_rest_ = 0.0;
    incidence_.assign(static_cast<size_t>(n), {});
    const double h2 = h_ * h_;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(n) + 4 * system_.springs.size());
    for (int p = 0; p < n; ++p) trips.emplace_back(p, p, system_.masses[p]);
    for (size_t i = 0; i < system_.springs.size(); ++i) {
        const Spring& s = system_.springs[i];
        max_rest_ = std::max(max_rest_, s.rest_length);
        trips.emplace_back(s.a, s.a, h2 * s.stiffness);
        trips.emplace_back(s.b, s.b, h2 * s.stiffness);
        trips.emplace_back(s.a, s.b, -h2 * s.stiffness);
        trips.emplace_back(s.b, s.a, -h2 * s.stiffness);
        incidence_[s.a].emplace_back(static_cast<int>(i), s.stiffness);
        incidence_[s.b].emplace_back(static_cast<int>(i), -s.stiffness);
    }
    A_.resize(n, n);
    A_.setFromTriplets(trips.begin(), trips.end());

    if (config_.linear_solver == LinearSolverKind::Direct) {
        llt_.compute(A_);
        if (llt_.info() != Eigen::Success)
            throw std::invalid_argument("system matrix factorization failed");
    } else {
        cg_.setMaxIterations(config_.cg_max_iterations);
        cg_.setTolerance(config_.cg_tolerance);
        cg_.compute(A_);
    }
}

SimState ImplicitSolver::step(const SimState& state, int threads, StepStats* stats) const {
    const int n = system_.particle_count;
    if (state.particle_count() != n)
        throw std::invalid_argument("state does not match the spring system");

    const double h2 = h_ * h_;
    const std::vector<Vec3> f_ext = external_force(scene_, state, threads);

    // constant part of the global right-hand side: M y + h^2 f_ext
    Eigen::MatrixXd b0(n, 3);
    parallel_for(n, threads, [&](int begin, int end) {
        for (int p = begin; p < end; ++p) {
            const Vec3 y = state.positions[p] + h_ * state.velocities[p];
            b0.row(p) = (system_.masses[p] * y + h2 * f_ext[p]).transpose();
        }
    });

    Eigen::MatrixXd x = b0; // shape only
    parallel_for(n, threads, [&](int begin, int end) {
        for (int p = begin; p < end; ++p)
            x.row(p) = (state.positions[p] + h_ * state.velocities[p]).transpose();
    });

    const int spring_count = static_cast<int>(system_.springs.size());
    Eigen::MatrixXd d(spring_count, 3);
    Eigen::MatrixXd b(n, 3);
    Eigen::MatrixXd x_next;

    int iterations = 0;
    double rel = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (iterations < config_.max_iterations) {
        ++iterations;
        // local: optimal spring direction at the current iterate
        parallel_for(spring_count, threads, [&](int begin, int end) {
            for (int i = begin; i < end; ++i) {
                const Spring& s = system_.springs[i];
                const Vec3 diff = x.row(s.a) - x.row(s.b);
                const double len = diff.norm();
                const Vec3 dir = len == 0.0 ? Vec3(Vec3::UnitX()) : Vec3(diff / len);
                d.row(i) = (s.rest_length * dir).transpose();
            }
        });
        // global right-hand side, gathered per particle in fixed spring order
        parallel_for(n, threads, [&](int begin, int end) {
            for (int p = begin; p < end; ++p) {
                Vec3 acc = Vec3::Zero();
                for (const auto& [i, k] : incidence_[p]) acc += k * Vec3(d.row(i));
                b.row(p) = b0.row(p) + h2 * acc.transpose();
            }
        });
        if (config_.linear_solver == LinearSolverKind::Direct)
            x_next = llt_.solve(b);
        else
            x_next = cg_.solve(b);

        double max_delta = 0.0, max_pos = 0.0;
        for (int p = 0; p < n; ++p) {
            max_delta = std::max(max_delta, (x_next.row(p) - x.row(p)).cwiseAbs().maxCoeff());
            max_pos = std::max(max_pos, x_next.row(p).cwiseAbs().maxCoeff());
        }
        const double denom = std::max(max_pos, max_rest_);
        rel = denom == 0.0 ? (max_delta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                           : max_delta / denom;
        x.swap(x_next);
        if (rel <= config_.tolerance) {
            converged = true;
            break;
        }
    }
    if (stats) {
        stats->iterations = iterations;
        stats->residual = rel;
    }
    if (!converged && config_.on_nonconverged == OnNonconverged::Error)
        throw ConvergenceError("solver did not converge: residual " + std::to_string(rel) +
                                   " after " + std::to_string(iterations) + " iterations",
                               rel, iterations);

    SimState out;
    out.positions.resize(static_cast<size_t>(n));
    out.velocities.resize(static_cast<size_t>(n));
    parallel_for(n, threads, [&](int begin, int end) {
        for (int p = begin; p < end; ++p) {
            out.positions[p] = x.row(p).transpose();
            out.velocities[p] = (out.positions[p] - state.positions[p]) / h_;
        }
    });
    for (int p : scene_.pinned) {
        out.positions[p] = state.positions[p];
        out.velocities[p] = Vec3::Zero();
    }
    out = collide_spheres(out, scene_.colliders);
    out.time_index = state.time_index + 1;
    if (!out.all_finite())
        throw ConvergenceError("solver produced non-finite state",
                               std::numeric_limits<double>::quiet_NaN(), iterations);
    return out;
}

SimState step(const SpringSystem& system, const SimState& state, const SceneConfig& scene,
              const SolverConfig& config) {
    return ImplicitSolver(system, scene, config).step(state);
}

FrameSequence simulate(const SceneConfig& scene, const SolverConfig& config, int threads) {
    scene.validate();
    const SpringSystem system = build_cloth(scene.cloth);
    SimState state = rest_state(scene.cloth, scene.origin, scene.plane);
    const ImplicitSolver solver(system, scene, config);

    FrameSequence seq;
    seq.spec = scene.cloth;
    seq.scene_hash = scene.hash();
    seq.time_step = scene.time_step;
    seq.world_scale = 1.0;
    seq.warm_up_frames = 0;
    seq.frames.reserve(static_cast<size_t>(scene.frame_count) + 1);
    seq.frames.push_back(state.positions);
    seq.frame_ms.reserve(static_cast<size_t>(scene.frame_count) + 1);
    seq.frame_ms.push_back(0.0);

    for (int t = 1; t <= scene.frame_count; ++t) {
        const auto tic = std::chrono::steady_clock::now();
        try {
            state = solver.step(state, threads);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string(e.what()) + " at frame " + std::to_string(t),
                                   e.residual, e.iterations, t);
        }
        const auto toc = std::chrono::steady_clock::now();
        seq.frames.push_back(state.positions);
        seq.frame_ms.push_back(std::chrono::duration<double, std::milli>(toc - tic).count());
    }
    return seq;
}

FrameSequence simulate(const SceneConfig& scene, int threads) {
    return simulate(scene, scene.solver, threads);
}

} // namespace miniup
