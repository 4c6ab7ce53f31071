#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "leechsim/engine.hpp"
#include "leechsim/floorplan.hpp"

namespace leechsim {

// Per-cell visitation frequency over an ensemble, normalized so the grid
// sums to 1. Wall cells carry zero mass.
struct FrequencyMatrix {
    int width = 0;
    int height = 0;
    std::vector<double> f;
    int n_trials = 0;

    double at(int x, int y) const { return f[static_cast<size_t>(y) * width + x]; }
};

enum class FrequencyMode : std::uint8_t {
    // A cell scores 1 per trial that visited it at least once (the primary
    // estimator).
    PerTrialBinary,
    // A cell scores one count per sample spent on it (time-weighted variant
    // for sensitivity checks).
    OccupancyTime,
};

FrequencyMatrix visit_frequency(const std::vector<Trajectory>& trajectories,
                                const FloorPlan& plan,
                                FrequencyMode mode = FrequencyMode::PerTrialBinary);

struct DomainFrequencies {
    std::array<double, kNumDomains> f{};

    double of(DomainId d) const { return f[static_cast<int>(d)]; }
};

// f(d) = sum of f(x) over the cells of domain d.
DomainFrequencies domain_frequencies(const FrequencyMatrix& fm, const FloorPlan& plan);

struct ThresholdMap {
    double theta = 0.0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;  // 1 where f(x) > theta and f(x) > 0

    bool at(int x, int y) const { return mask[static_cast<size_t>(y) * width + x] != 0; }
};

ThresholdMap threshold_map(const FrequencyMatrix& fm, double theta);

// Domains sorted by descending value and grouped into ranks: a domain joins
// the group above it when the gap to the previous value is <= tie_epsilon.
std::vector<std::vector<DomainId>> hierarchy(const std::array<double, kNumDomains>& values,
                                             double tie_epsilon);

enum class Cluster : std::uint8_t {
    LowFreqModerateComplexity,
    ModerateFreqLowComplexity,
    HighFreqHighComplexity,
};

const char* cluster_name(Cluster c);

struct ClusterReport {
    std::array<Cluster, kNumDomains> assignment{};

    Cluster of(DomainId d) const { return assignment[static_cast<int>(d)]; }
};

// Rule-based clustering on banded frequency and complexity. Bands cut at
// 0.12 and 0.20 for both measures; a (frequency band, complexity band) pair
// maps to the nearest of the three cluster archetypes, lowest enum value on
// ties.
ClusterReport clusters(const DomainFrequencies& df, const ComplexityReport& cr);

}  // namespace leechsim
