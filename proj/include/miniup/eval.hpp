#pragma once

#include <string>
#include <vector>

#include "miniup/frames.hpp"

namespace miniup {

/// Per-frame and aggregate mean per-particle Euclidean distance between a
/// candidate trajectory and its ground truth, plus optional per-frame timing
/// decomposition filled in by the playback pipeline.
struct EvalReport {
    std::string candidate_id;
    std::string reference_id;
    int first_frame = 0;
    std::vector<double> frame_error; // mean over particles of |x_hat - x|
    double mean_error = 0.0;

    std::vector<double> ms_miniature; // empty unless produced by playback
    std::vector<double> ms_inference;
    std::vector<double> ms_total;
};

/// error_t = (1/P) sum_p |candidate_p,t - reference_p,t|, aggregated as the
/// mean over the evaluated frame range [first, last]; last = -1 means the
/// final frame. Grids and (range-adjusted) frame counts must match.
EvalReport evaluate(const FrameSequence& candidate, const FrameSequence& reference,
                    int first = 0, int last = -1);

std::string report_json(const EvalReport& report);
std::string report_text(const EvalReport& report);

} // namespace miniup
