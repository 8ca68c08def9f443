#include "miniup/scene_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "miniup/errors.hpp"

namespace miniup {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser {
    std::string name;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(name + ":" + std::to_string(line_no) + ": " + msg);
    }

    double to_double(const std::string& tok) const {
        try {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) fail("bad number '" + tok + "'");
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("bad number '" + tok + "'");
        }
    }

    int to_int(const std::string& tok) const {
        try {
            size_t pos = 0;
            long v = std::stol(tok, &pos);
            if (pos != tok.size()) fail("bad integer '" + tok + "'");
            return static_cast<int>(v);
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("bad integer '" + tok + "'");
        }
    }

    std::vector<std::string> tokens(const std::string& value) const {
        std::vector<std::string> out;
        std::istringstream ss(value);
        std::string t;
        while (ss >> t) out.push_back(t);
        return out;
    }

    std::vector<double> to_doubles(const std::string& value) const {
        std::vector<double> out;
        for (const auto& t : tokens(value)) out.push_back(to_double(t));
        return out;
    }

    Vec3 to_vec3(const std::string& value) const {
        auto v = to_doubles(value);
        if (v.size() != 3) fail("expected 3 numbers, got " + std::to_string(v.size()));
        return Vec3(v[0], v[1], v[2]);
    }
};

} // namespace

LoadedScene parse_scene(const std::string& text, const std::string& name) {
    Parser P;
    P.name = name;

    LoadedScene out;
    SceneConfig& sc = out.scene;
    sc.frame_count = 0;

    std::set<int> pinned;
    std::vector<int> pinned_rows, pinned_cols, pinned_indices;

    std::string section;
    SphereCollider* current_collider = nullptr;
    bool have_cloth = false;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++P.line_no;
        std::string line = raw;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') P.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section == "collider") {
                sc.colliders.emplace_back();
                current_collider = &sc.colliders.back();
            } else if (section == "wind") {
                sc.wind.emplace();
            } else if (section != "cloth" && section != "scene" && section != "solver" && section != "sweep") {
                P.fail("unknown section [" + section + "]");
            }
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string::npos) P.fail("expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) P.fail("empty key");
        if (value.empty()) P.fail("empty value for '" + key + "'");
        if (section.empty()) P.fail("key '" + key + "' outside any section");

        if (section == "cloth") {
            have_cloth = true;
            if (key == "rows") sc.cloth.rows = P.to_int(value);
            else if (key == "cols") sc.cloth.cols = P.to_int(value);
            else if (key == "spacing") sc.cloth.spacing = P.to_double(value);
            else if (key == "particle_mass") sc.cloth.particle_mass = P.to_double(value);
            else if (key == "k_structural") sc.cloth.k_structural = P.to_double(value);
            else if (key == "k_shear") sc.cloth.k_shear = P.to_double(value);
            else if (key == "k_bend") sc.cloth.k_bend = P.to_double(value);
            else if (key == "damping") sc.cloth.damping = P.to_double(value);
            else P.fail("unknown cloth key '" + key + "'");
        } else if (section == "scene") {
            if (key == "origin") sc.origin = P.to_vec3(value);
            else if (key == "plane") {
                if (value == "xy") sc.plane = Plane::XY;
                else if (value == "xz") sc.plane = Plane::XZ;
                else if (value == "yz") sc.plane = Plane::YZ;
                else P.fail("plane must be xy, xz or yz");
            } else if (key == "gravity") sc.gravity = P.to_vec3(value);
            else if (key == "time_step") sc.time_step = P.to_double(value);
            else if (key == "frame_count") sc.frame_count = P.to_int(value);
            else if (key == "pinned_indices") {
                for (const auto& t : P.tokens(value)) pinned_indices.push_back(P.to_int(t));
            } else if (key == "pinned_rows") {
                for (const auto& t : P.tokens(value)) pinned_rows.push_back(P.to_int(t));
            } else if (key == "pinned_cols") {
                for (const auto& t : P.tokens(value)) pinned_cols.push_back(P.to_int(t));
            } else P.fail("unknown scene key '" + key + "'");
        } else if (section == "wind") {
            if (key == "direction") {
                Vec3 d = P.to_vec3(value);
                double n = d.norm();
                if (!(n > 0.0)) P.fail("wind direction must be nonzero");
                sc.wind->direction = d / n;
            } else if (key == "strength") sc.wind->strength = P.to_double(value);
            else if (key == "drag") sc.wind->drag = P.to_double(value);
            else P.fail("unknown wind key '" + key + "'");
        } else if (section == "collider") {
            if (!current_collider) P.fail("collider key outside [collider]");
            if (key == "center") current_collider->center = P.to_vec3(value);
            else if (key == "radius") current_collider->radius = P.to_double(value);
            else if (key == "friction") current_collider->friction = P.to_double(value);
            else P.fail("unknown collider key '" + key + "'");
        } else if (section == "solver") {
            if (key == "max_iterations") sc.solver.max_iterations = P.to_int(value);
            else if (key == "tolerance") sc.solver.tolerance = P.to_double(value);
            else if (key == "linear_solver") {
                if (value == "direct") sc.solver.linear_solver = LinearSolverKind::Direct;
                else if (value == "iterative") sc.solver.linear_solver = LinearSolverKind::Iterative;
                else P.fail("linear_solver must be direct or iterative");
            } else if (key == "cg_max_iterations") sc.solver.cg_max_iterations = P.to_int(value);
            else if (key == "cg_tolerance") sc.solver.cg_tolerance = P.to_double(value);
            else if (key == "on_nonconverged") {
                if (value == "error") sc.solver.on_nonconverged = OnNonconverged::Error;
                else if (value == "accept") sc.solver.on_nonconverged = OnNonconverged::Accept;
                else P.fail("on_nonconverged must be error or accept");
            } else P.fail("unknown solver key '" + key + "'");
        } else if (section == "sweep") {
            if (key == "mass") out.sweep.masses = P.to_doubles(value);
            else if (key == "stiffness_scale") out.sweep.stiffness_scales = P.to_doubles(value);
            else if (key == "time_step") out.sweep.time_steps = P.to_doubles(value);
            else P.fail("unknown sweep key '" + key + "'");
        }
    }

    P.line_no = 0; // whole-file errors below
    if (!have_cloth) throw ConfigError(name + ": missing [cloth] section");

    // Resolve pins. Row/col helpers expand against the final grid dims.
    try {
        sc.cloth.validate();
    } catch (const std::exception& e) {
        throw ConfigError(name + ": " + e.what());
    }
    for (int r : pinned_rows) {
        if (r < 0 || r >= sc.cloth.rows) throw ConfigError(name + ": pinned row " + std::to_string(r) + " out of range");
        for (int c = 0; c < sc.cloth.cols; ++c) pinned.insert(sc.cloth.index(r, c));
    }
    for (int c : pinned_cols) {
        if (c < 0 || c >= sc.cloth.cols) throw ConfigError(name + ": pinned col " + std::to_string(c) + " out of range");
        for (int r = 0; r < sc.cloth.rows; ++r) pinned.insert(sc.cloth.index(r, c));
    }
    for (int p : pinned_indices) pinned.insert(p);
    sc.pinned.assign(pinned.begin(), pinned.end());

    try {
        sc.validate();
    } catch (const std::exception& e) {
        throw ConfigError(name + ": " + e.what());
    }
    for (double v : out.sweep.masses)
        if (!(v > 0.0)) throw ConfigError(name + ": sweep mass values must be > 0");
    for (double v : out.sweep.stiffness_scales)
        if (!(v > 0.0)) throw ConfigError(name + ": sweep stiffness_scale values must be > 0");
    for (double v : out.sweep.time_steps)
        if (!(v > 0.0)) throw ConfigError(name + ": sweep time_step values must be > 0");

    return out;
}

LoadedScene load_scene(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open scene file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_scene(ss.str(), path);
}

std::vector<SceneConfig> expand_sweep(const SceneConfig& base, const SceneSweep& sweep) {
    std::vector<double> masses = sweep.masses.empty() ? std::vector<double>{base.cloth.particle_mass} : sweep.masses;
    std::vector<double> kscales = sweep.stiffness_scales.empty() ? std::vector<double>{1.0} : sweep.stiffness_scales;
    std::vector<double> steps = sweep.time_steps.empty() ? std::vector<double>{base.time_step} : sweep.time_steps;

    std::vector<SceneConfig> out;
    out.reserve(masses.size() * kscales.size() * steps.size());
    for (double m : masses)
        for (double ks : kscales)
            for (double h : steps) {
                SceneConfig v = base;
                v.cloth.particle_mass = m;
                v.cloth.k_structural = base.cloth.k_structural * ks;
                v.cloth.k_shear = base.cloth.k_shear * ks;
                v.cloth.k_bend = base.cloth.k_bend * ks;
                v.time_step = h;
                out.push_back(std::move(v));
            }
    return out;
}

} // namespace miniup
