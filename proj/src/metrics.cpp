#include "leechsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace leechsim {

FrequencyMatrix visit_frequency(const std::vector<Trajectory>& trajectories,
                                const FloorPlan& plan, FrequencyMode mode) {
    if (trajectories.empty()) throw ArgumentError("visit_frequency needs at least one trajectory");

    size_t n = static_cast<size_t>(plan.width) * plan.height;
    std::vector<long> counts(n, 0);
    std::vector<char> visited(n, 0);

    for (const Trajectory& t : trajectories) {
        if (mode == FrequencyMode::PerTrialBinary) std::fill(visited.begin(), visited.end(), 0);
        for (const TrajectorySample& s : t.samples) {
            if (!plan.in_bounds(s.pos.x, s.pos.y) || !plan.is_open(s.pos))
                throw ArgumentError("trajectory sample at step " + std::to_string(s.step) +
                                    " is not on an open cell of the plan");
            size_t i = static_cast<size_t>(s.pos.y) * plan.width + s.pos.x;
            if (mode == FrequencyMode::PerTrialBinary) {
                if (!visited[i]) {
                    visited[i] = 1;
                    ++counts[i];
                }
            } else {
                ++counts[i];
            }
        }
    }

    long total = std::accumulate(counts.begin(), counts.end(), 0L);
    FrequencyMatrix fm{plan.width, plan.height, std::vector<double>(n, 0.0),
                       static_cast<int>(trajectories.size())};
    for (size_t i = 0; i < n; ++i)
        fm.f[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return fm;
}

DomainFrequencies domain_frequencies(const FrequencyMatrix& fm, const FloorPlan& plan) {
    if (fm.width != plan.width || fm.height != plan.height)
        throw ArgumentError("frequency matrix dimensions do not match the plan");
    DomainFrequencies df;
    for (int y = 0; y < plan.height; ++y)
        for (int x = 0; x < plan.width; ++x) {
            double v = fm.at(x, y);
            if (v == 0.0) continue;
            auto d = plan.domain_of(x, y);
            if (d) df.f[static_cast<int>(*d)] += v;
        }
    return df;
}

ThresholdMap threshold_map(const FrequencyMatrix& fm, double theta) {
    if (theta < 0.0 || theta > 1.0) throw ArgumentError("theta must be in [0,1]");
    ThresholdMap map{theta, fm.width, fm.height,
                     std::vector<std::uint8_t>(fm.f.size(), 0)};
    for (size_t i = 0; i < fm.f.size(); ++i)
        map.mask[i] = (fm.f[i] > theta && fm.f[i] > 0.0) ? 1 : 0;
    return map;
}

std::vector<std::vector<DomainId>> hierarchy(const std::array<double, kNumDomains>& values,
                                             double tie_epsilon) {
    if (tie_epsilon < 0.0) throw ArgumentError("tie_epsilon must be >= 0");
    std::array<int, kNumDomains> order;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;  // equal values keep DomainId order
    });

    std::vector<std::vector<DomainId>> groups;
    for (int idx : order) {
        if (groups.empty() ||
            values[static_cast<int>(groups.back().back())] - values[idx] > tie_epsilon)
            groups.emplace_back();
        groups.back().push_back(static_cast<DomainId>(idx));
    }
    return groups;
}

const char* cluster_name(Cluster c) {
    switch (c) {
        case Cluster::LowFreqModerateComplexity: return "low_freq_moderate_complexity";
        case Cluster::ModerateFreqLowComplexity: return "moderate_freq_low_complexity";
        case Cluster::HighFreqHighComplexity: return "high_freq_high_complexity";
    }
    return "?";
}

namespace {

// 0 = low (< 0.12), 1 = moderate (< 0.20), 2 = high.
int band(double v) { return v < 0.12 ? 0 : (v < 0.20 ? 1 : 2); }

}  // namespace

ClusterReport clusters(const DomainFrequencies& df, const ComplexityReport& cr) {
    // Archetype band pairs (frequency, complexity) for the three clusters.
    constexpr int archetype_f[3] = {0, 1, 2};
    constexpr int archetype_c[3] = {1, 0, 2};

    ClusterReport report;
    for (int d = 0; d < kNumDomains; ++d) {
        int fb = band(df.f[d]);
        int cb = band(cr.c[d]);
        int best = 0;
        int best_dist = 1 << 20;
        for (int a = 0; a < 3; ++a) {
            int dist = std::abs(fb - archetype_f[a]) + std::abs(cb - archetype_c[a]);
            if (dist < best_dist) {
                best_dist = dist;
                best = a;
            }
        }
        report.assignment[d] = static_cast<Cluster>(best);
    }
    return report;
}

}  // namespace leechsim
