#pragma once

#include <stdexcept>
#include <string>

namespace miniup {

/// Scene/config file problems (bad syntax, invalid values). Messages carry
/// "file:line:" prefixes where a line is known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Binary file format problems: bad magic, version mismatch, truncation.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatch between a trained model's recorded metadata and the data or
/// scene it is applied to (dims, feature kind, factor, normalization).
class CompatError : public std::runtime_error {
public:
    explicit CompatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The implicit solve exceeded its iteration budget without meeting the
/// convergence tolerance. Carries the last residual; frame index is filled
/// in by trajectory-level callers (-1 when stepping standalone).
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double residual, int iterations, long frame = -1)
        : std::runtime_error(msg), residual(residual), iterations(iterations), frame(frame) {}
    double residual;
    int iterations;
    long frame;
};

/// Training aborted (non-finite loss). Carries diagnostics.
class TrainError : public std::runtime_error {
public:
    TrainError(const std::string& msg, double last_lr, long batch_index)
        : std::runtime_error(msg), last_lr(last_lr), batch_index(batch_index) {}
    double last_lr;
    long batch_index;
};

} // namespace miniup
