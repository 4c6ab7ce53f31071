#include "leechsim/engine.hpp"

#include <atomic>
#include <mutex>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "leechsim/metrics.hpp"

namespace leechsim {

namespace {

// Index-sharded parallel loop. Each index is processed exactly once and
// writes only its own slot, so the result is independent of thread count.
// The first worker exception is rethrown on the calling thread.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> cursor{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    int workers = std::min(threads, n);
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            try {
                for (int i = cursor.fetch_add(1); i < n && !failed.load();
                     i = cursor.fetch_add(1))
                    body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

Trajectory run_trial(const TrialConfig& config) {
    if (config.plan == nullptr) throw ArgumentError("trial has no plan");
    const FloorPlan& plan = *config.plan;
    if (!plan.in_bounds(config.start_pos.x, config.start_pos.y) ||
        plan.kind(config.start_pos) != CellKind::Free)
        throw ArgumentError("start position (" + std::to_string(config.start_pos.x) + "," +
                            std::to_string(config.start_pos.y) + ") is not a free cell");
    if (config.max_steps <= 0) throw ArgumentError("max_steps must be positive");
    validate_params(config.params);

    Rng rng(config.seed);
    AgentState state;
    state.pos = config.start_pos;
    state.heading = rng.next_below(kNumHeadings);
    state.mode = Mode::Swimming;  // trials begin in open water
    state.wall_side = rng.bernoulli(0.5) ? WallSide::Left : WallSide::Right;

    Trajectory traj;
    traj.samples.push_back({0, state.pos, state.mode});

    bool contact = false;
    for (int t = 1; t <= config.max_steps; ++t) {
        state.mode = transition(state, contact, config.params, rng);
        MoveResult mr = move(state, plan, config.params, config.field, rng);
        state = mr.state;
        contact = mr.contact;
        traj.samples.push_back({t, state.pos, state.mode});
        if (plan.kind(state.pos) == CellKind::Exit) {
            traj.outcome = OutcomeKind::Escaped;
            traj.end_step = t;
            return traj;
        }
    }
    traj.outcome = OutcomeKind::TimedOut;
    traj.end_step = config.max_steps;
    return traj;
}

std::vector<Trajectory> run_ensemble(const FloorPlan& plan, Cell start_pos,
                                     const BehaviorParams& params, int n,
                                     std::uint64_t master_seed, const ThermalField* field,
                                     int max_steps, int threads) {
    if (n < 1) throw ArgumentError("ensemble needs at least one trial");
    std::vector<Trajectory> out(static_cast<size_t>(n));
    parallel_for(n, threads, [&](int i) {
        TrialConfig config;
        config.plan = &plan;
        config.start_pos = start_pos;
        config.params = params;
        config.max_steps = max_steps;
        config.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
        config.field = field;
        out[static_cast<size_t>(i)] = run_trial(config);
    });
    return out;
}

std::string trajectory_to_csv(const Trajectory& t) {
    std::ostringstream out;
    out << "step,x,y,mode,outcome\n";
    for (size_t i = 0; i < t.samples.size(); ++i) {
        const TrajectorySample& s = t.samples[i];
        out << s.step << ',' << s.pos.x << ',' << s.pos.y << ','
            << (s.mode ? mode_name(*s.mode) : "unknown") << ',';
        if (i + 1 == t.samples.size())
            out << (t.outcome == OutcomeKind::Escaped ? "escaped" : "timed_out");
        out << '\n';
    }
    return out.str();
}

namespace {

int parse_int_field(const std::string& field, int row) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw FormatError("trace row " + std::to_string(row) + ": bad integer '" + field + "'");
    return v;
}

std::optional<Mode> parse_mode_field(const std::string& field, int row) {
    if (field == "unknown") return std::nullopt;
    for (Mode m : {Mode::Resting, Mode::Swimming, Mode::Crawling, Mode::Exploring})
        if (field == mode_name(m)) return m;
    throw FormatError("trace row " + std::to_string(row) + ": bad mode '" + field + "'");
}

}  // namespace

Trajectory trajectory_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty trace");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "step,x,y,mode,outcome")
        throw FormatError("trace header must be 'step,x,y,mode,outcome'");

    Trajectory traj;
    std::optional<OutcomeKind> outcome;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (outcome)
            throw FormatError("trace row " + std::to_string(row) + ": rows after the outcome row");

        std::vector<std::string> fields;
        size_t start = 0;
        while (true) {
            size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != 5)
            throw FormatError("trace row " + std::to_string(row) + ": expected 5 fields, got " +
                              std::to_string(fields.size()));

        TrajectorySample s;
        s.step = parse_int_field(fields[0], row);
        s.pos.x = parse_int_field(fields[1], row);
        s.pos.y = parse_int_field(fields[2], row);
        s.mode = parse_mode_field(fields[3], row);
        if (!traj.samples.empty() && s.step <= traj.samples.back().step)
            throw FormatError("trace row " + std::to_string(row) + ": steps must increase");
        traj.samples.push_back(s);

        if (!fields[4].empty()) {
            if (fields[4] == "escaped")
                outcome = OutcomeKind::Escaped;
            else if (fields[4] == "timed_out")
                outcome = OutcomeKind::TimedOut;
            else
                throw FormatError("trace row " + std::to_string(row) + ": bad outcome '" +
                                  fields[4] + "'");
        }
    }
    if (traj.samples.empty()) throw FormatError("trace has no samples");
    if (!outcome) throw FormatError("trace is missing an outcome on its last row");
    traj.outcome = *outcome;
    traj.end_step = traj.samples.back().step;
    return traj;
}

BehaviorParams random_candidate(Rng& rng) {
    BehaviorParams p;
    p.p0_return = rng.uniform(0.0, 1.0);
    p.d_max = rng.uniform(5.0, 200.0);
    p.p_rest_enter = rng.uniform(0.0, 1.0);
    p.p_rest_exit = rng.uniform(0.0, 1.0);
    p.p_swim_spont = rng.uniform(0.0, 1.0);
    p.v_swim = rng.uniform(0.05, 3.0);
    p.v_crawl = rng.uniform(0.05, 3.0);
    p.v_explore = rng.uniform(0.05, 3.0);
    p.turn_sigma_explore = rng.uniform(5.0, 120.0);
    p.wall_follow_side_flip = rng.uniform(0.0, 1.0);
    p.taxis_beta = 0.0;
    return p;
}

CalibrationResult calibrate(const FloorPlan& plan, Cell start_pos,
                            const std::map<DomainId, double>& target,
                            const CalibrationOptions& options) {
    if (options.budget < 1) throw ArgumentError("calibration budget must be at least 1");
    if (options.trials_per_eval < 1) throw ArgumentError("trials_per_eval must be at least 1");
    double sum = 0.0;
    for (const auto& [d, v] : target) {
        if (v < 0.0) throw ArgumentError("target frequencies must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 0.02)
        throw ArgumentError("target frequencies must sum to 1 +/- 0.02, got " +
                            std::to_string(sum));

    CalibrationResult result;
    result.target = target;
    result.loss = std::numeric_limits<double>::infinity();

    for (int e = 0; e < options.budget; ++e) {
        Rng draw(derive_seed(options.master_seed, 2ull * e));
        BehaviorParams candidate = random_candidate(draw);
        std::uint64_t ensemble_seed = derive_seed(options.master_seed, 2ull * e + 1);
        auto trajectories =
            run_ensemble(plan, start_pos, candidate, options.trials_per_eval, ensemble_seed,
                         nullptr, options.max_steps, options.threads);
        FrequencyMatrix fm = visit_frequency(trajectories, plan);
        DomainFrequencies df = domain_frequencies(fm, plan);
        double loss = 0.0;
        for (int d = 0; d < kNumDomains; ++d) {
            auto it = target.find(static_cast<DomainId>(d));
            double want = it == target.end() ? 0.0 : it->second;
            loss += std::abs(df.f[d] - want);
        }
        if (loss < result.loss) {
            result.loss = loss;
            result.best_params = candidate;
        }
        ++result.evaluations;
    }
    return result;
}

}  // namespace leechsim
