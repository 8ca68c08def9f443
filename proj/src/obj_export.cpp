#include "miniup/obj_export.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "miniup/errors.hpp"

namespace miniup {

int export_obj(const FrameSequence& seq, const std::string& dir, const std::string& prefix) {
    seq.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw FormatError("cannot create directory " + dir + ": " + ec.message());

    const int R = seq.spec.rows, C = seq.spec.cols;
    for (int t = 0; t < seq.frame_count(); ++t) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_%05d.obj", prefix.c_str(), t);
        const std::filesystem::path path = std::filesystem::path(dir) / name;
        std::ofstream os(path);
        if (!os) throw FormatError("cannot open for writing: " + path.string());

        char line[128];
        for (const Vec3& p : seq.frames[static_cast<size_t>(t)]) {
            std::snprintf(line, sizeof line, "v %.9g %.9g %.9g\n", p.x(), p.y(), p.z());
            os << line;
        }
        // quad (r,c) split along its (r,c)-(r+1,c+1) diagonal, same as the wind triangles
        for (int r = 0; r + 1 < R; ++r)
            for (int c = 0; c + 1 < C; ++c) {
                const int p00 = r * C + c + 1; // 1-based OBJ indices
                const int p01 = p00 + 1;
                const int p10 = p00 + C;
                const int p11 = p10 + 1;
                os << "f " << p00 << " " << p10 << " " << p11 << "\n";
                os << "f " << p00 << " " << p11 << " " << p01 << "\n";
            }
        if (!os) throw FormatError("write failed: " + path.string());
    }
    return seq.frame_count();
}

} // namespace miniup
