#include "miniup/cloth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace miniup {

void GridClothSpec::validate() const {
    if (rows < 3) throw std::invalid_argument("cloth rows must be >= 3, got " + std::to_string(rows));
    if (cols < 3) throw std::invalid_argument("cloth cols must be >= 3, got " + std::to_string(cols));
    if (!(spacing > 0.0)) throw std::invalid_argument("cloth spacing must be > 0");
    if (!(particle_mass > 0.0)) throw std::invalid_argument("particle_mass must be > 0");
    if (!(k_structural > 0.0)) throw std::invalid_argument("k_structural must be > 0");
    if (k_shear < 0.0 || k_bend < 0.0) throw std::invalid_argument("spring stiffness must be >= 0");
    if (damping < 0.0) throw std::invalid_argument("damping must be >= 0");
}

int SpringSystem::count_of(SpringType t) const {
    int n = 0;
    for (const Spring& s : springs)
        if (s.type == t) ++n;
    return n;
}

bool SimState::all_finite() const {
    for (const Vec3& p : positions)
        if (!p.allFinite()) return false;
    for (const Vec3& v : velocities)
        if (!v.allFinite()) return false;
    return true;
}

SpringSystem build_cloth(const GridClothSpec& spec) {
    spec.validate();

    SpringSystem sys;
    sys.particle_count = spec.particle_count();
    sys.masses.assign(static_cast<size_t>(sys.particle_count), spec.particle_mass);

    const int R = spec.rows;
    const int C = spec.cols;
    const double s = spec.spacing;
    const double s_diag = s * std::sqrt(2.0);

    auto add = [&](int ra, int ca, int rb, int cb, double rest, double k, SpringType t) {
        sys.springs.push_back(Spring{spec.index(ra, ca), spec.index(rb, cb), rest, k, t});
    };

    // structural: 4-neighbours
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            if (c + 1 < C) add(r, c, r, c + 1, s, spec.k_structural, SpringType::Structural);
            if (r + 1 < R) add(r, c, r + 1, c, s, spec.k_structural, SpringType::Structural);
        }
    // shear: diagonals of each cell
    for (int r = 0; r + 1 < R; ++r)
        for (int c = 0; c + 1 < C; ++c) {
            add(r, c, r + 1, c + 1, s_diag, spec.k_shear, SpringType::Shear);
            add(r, c + 1, r + 1, c, s_diag, spec.k_shear, SpringType::Shear);
        }
    // bend: 2-apart along each axis
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            if (c + 2 < C) add(r, c, r, c + 2, 2.0 * s, spec.k_bend, SpringType::Bend);
            if (r + 2 < R) add(r, c, r + 2, c, 2.0 * s, spec.k_bend, SpringType::Bend);
        }

    return sys;
}

std::pair<Vec3, Vec3> plane_axes(Plane plane) {
    switch (plane) {
        case Plane::XY: return {Vec3::UnitX(), Vec3::UnitY()};
        case Plane::XZ: return {Vec3::UnitX(), Vec3::UnitZ()};
        case Plane::YZ: return {Vec3::UnitY(), Vec3::UnitZ()};
    }
    throw std::invalid_argument("unknown plane orientation");
}

SimState rest_state(const GridClothSpec& spec, const Vec3& origin, Plane plane) {
    spec.validate();
    auto [row_axis, col_axis] = plane_axes(plane);

    SimState st;
    st.positions.reserve(static_cast<size_t>(spec.particle_count()));
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c)
            st.positions.push_back(origin + spec.spacing * (r * row_axis + c * col_axis));
    st.velocities.assign(static_cast<size_t>(spec.particle_count()), Vec3::Zero());
    st.time_index = 0;
    return st;
}

} // namespace miniup
