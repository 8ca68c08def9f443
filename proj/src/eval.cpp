#include "miniup/eval.hpp"

#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "miniup/errors.hpp"

namespace miniup {

EvalReport evaluate(const FrameSequence& candidate, const FrameSequence& reference, int first,
                    int last) {
    if (candidate.spec.rows != reference.spec.rows || candidate.spec.cols != reference.spec.cols)
        throw CompatError("grid mismatch: candidate " + std::to_string(candidate.spec.rows) + "x" +
                          std::to_string(candidate.spec.cols) + " vs reference " +
                          std::to_string(reference.spec.rows) + "x" + std::to_string(reference.spec.cols));

    const int frames = std::min(candidate.frame_count(), reference.frame_count());
    if (last < 0) {
        if (candidate.frame_count() != reference.frame_count())
            throw CompatError("frame count mismatch: " + std::to_string(candidate.frame_count()) +
                              " vs " + std::to_string(reference.frame_count()) +
                              " (pass an explicit frame range to compare a prefix)");
        last = frames - 1;
    }
    if (first < 0 || first > last || last >= frames)
        throw std::invalid_argument("frame range [" + std::to_string(first) + ", " +
                                    std::to_string(last) + "] out of bounds for " +
                                    std::to_string(frames) + " frames");

    const int particles = candidate.particle_count();
    EvalReport report;
    report.first_frame = first;
    report.frame_error.reserve(static_cast<size_t>(last - first + 1));
    for (int t = first; t <= last; ++t) {
        const auto& a = candidate.frames[static_cast<size_t>(t)];
        const auto& b = reference.frames[static_cast<size_t>(t)];
        double sum = 0.0;
        for (int p = 0; p < particles; ++p) sum += (a[static_cast<size_t>(p)] - b[static_cast<size_t>(p)]).norm();
        report.frame_error.push_back(sum / particles);
    }
    report.mean_error = std::accumulate(report.frame_error.begin(), report.frame_error.end(), 0.0) /
                        static_cast<double>(report.frame_error.size());
    return report;
}

std::string report_json(const EvalReport& report) {
    nlohmann::json j;
    j["candidate"] = report.candidate_id;
    j["reference"] = report.reference_id;
    j["first_frame"] = report.first_frame;
    j["mean_error"] = report.mean_error;
    j["frame_error"] = report.frame_error;
    if (!report.ms_total.empty()) {
        j["ms_miniature"] = report.ms_miniature;
        j["ms_inference"] = report.ms_inference;
        j["ms_total"] = report.ms_total;
    }
    return j.dump(2);
}

std::string report_text(const EvalReport& report) {
    std::ostringstream os;
    os << "candidate: " << report.candidate_id << "\n";
    os << "reference: " << report.reference_id << "\n";
    os << std::scientific << std::setprecision(6);
    os << "mean per-particle error: " << report.mean_error << "\n";
    const bool timed = !report.ms_total.empty();
    os << std::setw(8) << "frame" << std::setw(16) << "error";
    if (timed)
        os << std::setw(14) << "mini_ms" << std::setw(14) << "infer_ms" << std::setw(14) << "total_ms";
    os << "\n";
    for (size_t i = 0; i < report.frame_error.size(); ++i) {
        os << std::setw(8) << (report.first_frame + static_cast<int>(i)) << std::setw(16)
           << report.frame_error[i];
        if (timed)
            os << std::fixed << std::setprecision(3) << std::setw(14) << report.ms_miniature[i]
               << std::setw(14) << report.ms_inference[i] << std::setw(14) << report.ms_total[i]
               << std::scientific << std::setprecision(6);
        os << "\n";
    }
    return os.str();
}

} // namespace miniup
