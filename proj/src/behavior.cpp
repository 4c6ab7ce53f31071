#include "leechsim/behavior.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "leechsim/thermal.hpp"

namespace leechsim {

const int heading_dx[kNumHeadings] = {1, 1, 0, -1, -1, -1, 0, 1};
const int heading_dy[kNumHeadings] = {0, -1, -1, -1, 0, 1, 1, 1};

namespace {

// Swimming keeps its course apart from weak jitter; exploring gets its own
// configurable turning noise.
constexpr double kSwimTurnSigmaDeg = 22.5;

int wrap_heading(int h) { return ((h % kNumHeadings) + kNumHeadings) % kNumHeadings; }

}  // namespace

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Resting: return "resting";
        case Mode::Swimming: return "swimming";
        case Mode::Crawling: return "crawling";
        case Mode::Exploring: return "exploring";
    }
    return "?";
}

double return_probability(double dist_since_contact, const BehaviorParams& p) {
    double d = std::max(0.0, dist_since_contact);
    return p.p0_return * std::max(0.0, 1.0 - d / p.d_max);
}

Mode transition(const AgentState& state, bool contact, const BehaviorParams& p, Rng& rng) {
    switch (state.mode) {
        case Mode::Swimming:
            return contact ? Mode::Crawling : Mode::Swimming;
        case Mode::Crawling:
            if (contact) return Mode::Exploring;
            if (rng.bernoulli(p.p_swim_spont)) return Mode::Swimming;
            if (rng.bernoulli(p.p_rest_enter)) return Mode::Resting;
            return Mode::Crawling;
        case Mode::Exploring:
            if (!contact && rng.bernoulli(return_probability(state.dist_since_contact, p)))
                return Mode::Crawling;
            return Mode::Exploring;
        case Mode::Resting:
            return rng.bernoulli(p.p_rest_exit) ? Mode::Crawling : Mode::Resting;
    }
    return state.mode;
}

namespace {

// Fractional speeds: floor(v) guaranteed displacements plus one more with
// probability frac(v).
int displacement_budget(double v, Rng& rng) {
    double vi = std::floor(v);
    int n = static_cast<int>(vi);
    if (rng.bernoulli(v - vi)) ++n;
    return n;
}

bool wall_within_one_cell(const FloorPlan& plan, Cell pos) {
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (plan.kind(pos.x + dx, pos.y + dy) == CellKind::Wall) return true;
        }
    return false;
}

// Pick the next heading from a wrapped-Gaussian turn kernel centered on the
// current heading, optionally tilted toward warmer target cells. Exactly one
// uniform draw regardless of field presence, so a zero gain reproduces the
// field-free stream bit for bit.
int sample_heading(const FloorPlan& plan, const ThermalField* field, double beta, Cell pos,
                   int current, double sigma_deg, Rng& rng) {
    double weights[kNumHeadings];
    double total = 0.0;
    for (int k = 0; k < kNumHeadings; ++k) {
        int turn = std::abs(k - current);
        turn = std::min(turn, kNumHeadings - turn);
        double ang = 45.0 * turn;
        double w;
        if (sigma_deg <= 0.0) {
            w = (turn == 0) ? 1.0 : 0.0;
        } else {
            w = std::exp(-ang * ang / (2.0 * sigma_deg * sigma_deg));
        }
        if (field != nullptr && beta > 0.0 && w > 0.0) {
            Cell target{pos.x + heading_dx[k], pos.y + heading_dy[k]};
            if (plan.is_open(target)) {
                double dt = field->at(target.x, target.y) - field->at(pos.x, pos.y);
                w *= std::exp(beta * dt);
            }
        }
        weights[k] = w;
        total += w;
    }
    double u = rng.next_double() * total;
    for (int k = 0; k < kNumHeadings; ++k) {
        u -= weights[k];
        if (u < 0.0) return k;
    }
    return current;
}

struct Displacement {
    Cell to;
    int cells = 0;     // path length in cells (2 for a diagonal)
    bool moved = false;
};

// One displacement along `heading`. A diagonal is two axis steps, both
// wall-checked: it completes only if the target and at least one of the two
// intermediate cells are open, so the agent never cuts a wall corner.
Displacement attempt_displacement(const FloorPlan& plan, Cell pos, int heading) {
    int dx = heading_dx[heading];
    int dy = heading_dy[heading];
    Cell to{pos.x + dx, pos.y + dy};
    if (dx == 0 || dy == 0) {
        if (plan.is_open(to)) return {to, 1, true};
        return {pos, 0, false};
    }
    if (plan.is_open(to) &&
        (plan.is_open(pos.x + dx, pos.y) || plan.is_open(pos.x, pos.y + dy)))
        return {to, 2, true};
    return {pos, 0, false};
}

int snap_to_cardinal(int heading) {
    // Even indices are cardinal; diagonals snap one step toward the lower index.
    return (heading % 2 != 0) ? wrap_heading(heading - 1) : heading;
}

struct StepOutcome {
    Cell pos;
    int heading;
    int traveled = 0;
    bool contact = false;
};

StepOutcome swim_or_explore(const FloorPlan& plan, const ThermalField* field,
                            const BehaviorParams& p, Cell pos, int heading, double sigma,
                            double speed, Rng& rng) {
    StepOutcome out{pos, heading};
    out.heading = sample_heading(plan, field, p.taxis_beta, pos, heading, sigma, rng);
    int budget = displacement_budget(speed, rng);
    for (int i = 0; i < budget; ++i) {
        Displacement d = attempt_displacement(plan, out.pos, out.heading);
        if (!d.moved) {
            // Course blocked by a wall.
            out.contact = true;
            break;
        }
        out.pos = d.to;
        out.traveled += d.cells;
        if (plan.kind(out.pos) == CellKind::Exit) break;
    }
    return out;
}

StepOutcome crawl(const FloorPlan& plan, const BehaviorParams& p, Cell pos, int heading,
                  WallSide side, Rng& rng) {
    StepOutcome out{pos, heading};
    int budget = displacement_budget(p.v_crawl, rng);
    for (int i = 0; i < budget; ++i) {
        if (!wall_within_one_cell(plan, out.pos)) {
            // Open water on all sides: keep course until a wall turns up.
            Displacement d = attempt_displacement(plan, out.pos, out.heading);
            if (!d.moved) {
                out.contact = true;
                break;
            }
            out.pos = d.to;
            out.traveled += d.cells;
        } else {
            int fwd = snap_to_cardinal(out.heading);
            // Hand rule: wall-side turn first, then straight, away-side, back.
            int to_side = (side == WallSide::Right) ? -2 : 2;
            int order[4] = {wrap_heading(fwd + to_side), fwd, wrap_heading(fwd - to_side),
                            wrap_heading(fwd + 4)};
            Cell ahead{out.pos.x + heading_dx[fwd], out.pos.y + heading_dy[fwd]};
            if (!plan.is_open(ahead)) out.contact = true;

            bool moved = false;
            for (int cand : order) {
                Cell to{out.pos.x + heading_dx[cand], out.pos.y + heading_dy[cand]};
                if (plan.is_open(to)) {
                    out.pos = to;
                    out.heading = cand;
                    out.traveled += 1;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                // Fully enclosed.
                out.contact = true;
                break;
            }
        }
        if (plan.kind(out.pos) == CellKind::Exit) break;
    }
    return out;
}

}  // namespace

MoveResult move(const AgentState& state, const FloorPlan& plan, const BehaviorParams& p,
                const ThermalField* field, Rng& rng) {
    MoveResult result{state, false};
    AgentState& s = result.state;
    s.step = state.step + 1;

    switch (state.mode) {
        case Mode::Resting:
            return result;
        case Mode::Swimming: {
            StepOutcome o = swim_or_explore(plan, field, p, state.pos, state.heading,
                                            kSwimTurnSigmaDeg, p.v_swim, rng);
            s.pos = o.pos;
            s.heading = o.heading;
            result.contact = o.contact;
            s.dist_since_contact = o.contact ? 0 : state.dist_since_contact + o.traveled;
            return result;
        }
        case Mode::Exploring: {
            StepOutcome o = swim_or_explore(plan, field, p, state.pos, state.heading,
                                            p.turn_sigma_explore, p.v_explore, rng);
            s.pos = o.pos;
            s.heading = o.heading;
            result.contact = o.contact;
            s.dist_since_contact = o.contact ? 0 : state.dist_since_contact + o.traveled;
            return result;
        }
        case Mode::Crawling: {
            if (rng.bernoulli(p.wall_follow_side_flip))
                s.wall_side = (state.wall_side == WallSide::Right) ? WallSide::Left
                                                                   : WallSide::Right;
            StepOutcome o = crawl(plan, p, state.pos, state.heading, s.wall_side, rng);
            s.pos = o.pos;
            s.heading = o.heading;
            result.contact = o.contact;
            s.dist_since_contact = o.contact ? 0 : state.dist_since_contact + o.traveled;
            return result;
        }
    }
    return result;
}

namespace {

struct ParamField {
    const char* key;
    double BehaviorParams::*member;
};

constexpr ParamField kParamFields[] = {
    {"p0_return", &BehaviorParams::p0_return},
    {"d_max", &BehaviorParams::d_max},
    {"p_rest_enter", &BehaviorParams::p_rest_enter},
    {"p_rest_exit", &BehaviorParams::p_rest_exit},
    {"p_swim_spont", &BehaviorParams::p_swim_spont},
    {"v_swim", &BehaviorParams::v_swim},
    {"v_crawl", &BehaviorParams::v_crawl},
    {"v_explore", &BehaviorParams::v_explore},
    {"turn_sigma_explore", &BehaviorParams::turn_sigma_explore},
    {"wall_follow_side_flip", &BehaviorParams::wall_follow_side_flip},
    {"taxis_beta", &BehaviorParams::taxis_beta},
};

}  // namespace

void validate_params(const BehaviorParams& p) {
    auto check_prob = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError(std::string(name) + " must be in [0,1]");
    };
    check_prob(p.p0_return, "p0_return");
    check_prob(p.p_rest_enter, "p_rest_enter");
    check_prob(p.p_rest_exit, "p_rest_exit");
    check_prob(p.p_swim_spont, "p_swim_spont");
    check_prob(p.wall_follow_side_flip, "wall_follow_side_flip");
    if (!(p.d_max > 0.0)) throw ValidationError("d_max must be positive");
    if (p.v_swim < 0.0 || p.v_crawl < 0.0 || p.v_explore < 0.0)
        throw ValidationError("speeds must be non-negative");
    if (p.turn_sigma_explore < 0.0) throw ValidationError("turn_sigma_explore must be >= 0");
    if (!std::isfinite(p.taxis_beta)) throw ValidationError("taxis_beta must be finite");
}

BehaviorParams parse_params(const std::string& text) {
    BehaviorParams p;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("params line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        double parsed = 0.0;
        auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), parsed);
        if (ec != std::errc() || ptr != val.data() + val.size())
            throw FormatError("params line " + std::to_string(lineno) + ": bad number '" + val +
                              "'");
        bool known = false;
        for (const auto& f : kParamFields) {
            if (key == f.key) {
                p.*(f.member) = parsed;
                known = true;
                break;
            }
        }
        if (!known)
            throw FormatError("params line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
    }
    validate_params(p);
    return p;
}

std::string serialize_params(const BehaviorParams& p) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& f : kParamFields) out << f.key << "=" << p.*(f.member) << "\n";
    return out.str();
}

}  // namespace leechsim
