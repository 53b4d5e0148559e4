#pragma once

#include <array>
#include <variant>

namespace prefsearch {

// Gaussian with a flat plateau of width `offset` and a hard cutoff at
// offset + cutoff_sigmas * sigma. Used for Geo and NumericPoint facets.
struct GaussianConfig {
    double sigma = 1.0;
    double offset = 0.0;
    double cutoff_sigmas = 3.0;

    bool operator==(const GaussianConfig&) const = default;
};

enum class Direction { HigherBetter, LowerBetter };

// Linear score over a directed scale such as hotel stars or ratings.
struct LinearConfig {
    double scale_min = 0.0;
    double scale_max = 1.0;
    Direction direction = Direction::HigherBetter;

    bool operator==(const LinearConfig&) const = default;
};

// Range scoring with descending segments: inner range, left border, right
// border. Anchors are (inner start, inner end, left start, left end,
// right start, right end).
struct TriLinearConfig {
    double extension_fraction = 0.2;
    std::array<double, 6> anchors{1.0, 0.75, 0.7, 0.5, 0.45, 0.25};

    bool operator==(const TriLinearConfig&) const = default;
};

using ScoringConfig = std::variant<std::monostate, GaussianConfig, LinearConfig, TriLinearConfig>;

} // namespace prefsearch
