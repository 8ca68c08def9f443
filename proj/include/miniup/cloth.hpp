#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace miniup {

using Vec3 = Eigen::Vector3d;

/// Rectangular particle-grid cloth. Particles are indexed row-major:
/// index = row * cols + col.
struct GridClothSpec {
    int rows = 0;
    int cols = 0;
    double spacing = 0.0;       // rest distance between grid-adjacent particles [m]
    double particle_mass = 0.0; // per-particle mass [kg]
    double k_structural = 0.0;  // 4-neighbour springs [N/m]
    double k_shear = 0.0;       // diagonal springs [N/m]
    double k_bend = 0.0;        // 2-apart springs [N/m]
    double damping = 0.0;       // velocity damping rate [1/s]; force = -damping * m * v

    int particle_count() const { return rows * cols; }
    int index(int r, int c) const { return r * cols + c; }

    /// Throws std::invalid_argument on rows/cols < 3, non-positive
    /// spacing/mass, negative stiffness/damping, or k_structural <= 0.
    void validate() const;
};

enum class SpringType : uint8_t { Structural = 0, Shear = 1, Bend = 2 };

struct Spring {
    int a = 0;
    int b = 0;
    double rest_length = 0.0;
    double stiffness = 0.0;
    SpringType type = SpringType::Structural;
};

/// The assembled mass-spring system: spring list plus the diagonal of the
/// mass matrix. Immutable once built; safe to share across threads.
struct SpringSystem {
    int particle_count = 0;
    std::vector<Spring> springs;
    std::vector<double> masses;

    int count_of(SpringType t) const;
};

/// Positions and velocities of every particle at one time index.
struct SimState {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    long time_index = 0;

    int particle_count() const { return static_cast<int>(positions.size()); }
    bool all_finite() const;
};

/// Plane the rest grid is laid out in: rows advance along the first axis,
/// cols along the second.
enum class Plane : uint8_t { XY = 0, XZ = 1, YZ = 2 };

/// Builds structural springs between 4-neighbours, shear springs between
/// diagonal neighbours and bend springs between 2-apart grid neighbours.
/// Rest lengths come from the flat rest configuration (spacing, spacing*sqrt2,
/// 2*spacing). Ordering is deterministic: all structural, then shear, then
/// bend, row-major within each tier.
SpringSystem build_cloth(const GridClothSpec& spec);

/// Flat grid at pitch = spacing, zero velocities, time_index 0.
SimState rest_state(const GridClothSpec& spec, const Vec3& origin, Plane plane);

/// Axis pair for a plane orientation (row axis, col axis).
std::pair<Vec3, Vec3> plane_axes(Plane plane);

} // namespace miniup
