#pragma once

#include <stdexcept>
#include <string>

namespace chang {

/// Thrown when a run would exceed a configured resource budget
/// (weight-family memory gate, enumeration caps).
struct ResourceGateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an iteration exceeds its proven termination bound.
/// This cannot happen if the arithmetic is sound, so it signals a bug
/// or a tolerance breach rather than a bad input.
struct IterationOverrunError : std::logic_error {
    using std::logic_error::logic_error;
};

// Tolerance conventions used across the library.
//
// Strict inequalities in mathematical statements ("score > eps") are
// evaluated with a small additive guard so floating-point noise cannot
// flip a comparison between runs. Certificates therefore establish the
// "<= threshold + kCertSlack" form of each bound, and record the slack.
inline constexpr double kCertSlack = 1e-9;

// Guarded strict comparison: value counts as exceeding `threshold` only
// if it clears it by a relative-plus-absolute margin.
inline bool exceeds_guarded(double value, double threshold) {
    return value > threshold + 1e-9 * (1.0 + threshold);
}

}  // namespace chang
