#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leechsim/behavior.hpp"
#include "leechsim/floorplan.hpp"
#include "leechsim/thermal.hpp"

namespace leechsim {

enum class OutcomeKind : std::uint8_t { Escaped, TimedOut };

struct TrajectorySample {
    int step = 0;
    Cell pos;
    std::optional<Mode> mode;  // empty for traces extracted from video frames

    bool operator==(const TrajectorySample&) const = default;
};

// Time-tagged positions at one sample per step, step 0 being the start
// position. An Escaped trajectory ends on the exit cell it escaped through.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    OutcomeKind outcome = OutcomeKind::TimedOut;
    int end_step = 0;

    bool operator==(const Trajectory&) const = default;
};

struct TrialConfig {
    const FloorPlan* plan = nullptr;
    Cell start_pos;
    BehaviorParams params;
    int max_steps = 1800;  // 30 minutes at one step per second
    std::uint64_t seed = 0;
    const ThermalField* field = nullptr;  // optional; used when taxis_beta > 0
};

// One trial: alternate transition and move until the agent reaches an exit
// cell or max_steps elapse. Deterministic function of the config.
Trajectory run_trial(const TrialConfig& config);

// n independent trials, trial i seeded with derive_seed(master_seed, i).
// `threads` = 0 picks the hardware concurrency; results are identical at any
// concurrency level.
std::vector<Trajectory> run_ensemble(const FloorPlan& plan, Cell start_pos,
                                     const BehaviorParams& params, int n,
                                     std::uint64_t master_seed,
                                     const ThermalField* field = nullptr, int max_steps = 1800,
                                     int threads = 0);

// CSV with header `step,x,y,mode,outcome`; the outcome column is filled on
// the last row only.
std::string trajectory_to_csv(const Trajectory& t);
Trajectory trajectory_from_csv(const std::string& text);

struct CalibrationResult {
    BehaviorParams best_params;
    double loss = 0.0;  // L1 distance between simulated and target domain frequencies
    int evaluations = 0;
    std::map<DomainId, double> target;
};

struct CalibrationOptions {
    int budget = 200;          // candidate evaluations
    int trials_per_eval = 100;
    std::uint64_t master_seed = 0;
    int max_steps = 1800;
    int threads = 0;
};

// Search-space bounds for one candidate draw; exposed so tests can sweep the
// same space the calibrator does. taxis_beta stays 0: calibration runs
// without a thermal field.
BehaviorParams random_candidate(Rng& rng);

// Uniform random search over BehaviorParams. Each candidate is scored by the
// L1 distance between the domain frequencies of a trials_per_eval ensemble
// and `target`; ties keep the earliest candidate. Reproducible from
// master_seed: candidate e draws from derive_seed(master_seed, 2e) and its
// ensemble runs under derive_seed(master_seed, 2e+1).
CalibrationResult calibrate(const FloorPlan& plan, Cell start_pos,
                            const std::map<DomainId, double>& target,
                            const CalibrationOptions& options);

}  // namespace leechsim
