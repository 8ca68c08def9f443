#pragma once

#include <string>

#include "miniup/frames.hpp"

namespace miniup {

/// Writes one OBJ per frame into `dir` as <prefix>_00000.obj, ...: vertices
/// in particle order, faces as the grid quads split into two triangles each
/// (2 * (rows-1) * (cols-1) triangles, 1-based indices). Returns the number
/// of files written.
int export_obj(const FrameSequence& seq, const std::string& dir, const std::string& prefix = "frame");

} // namespace miniup
