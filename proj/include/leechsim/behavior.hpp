#pragma once

#include <cstdint>
#include <string>

#include "leechsim/floorplan.hpp"
#include "leechsim/rng.hpp"

namespace leechsim {

struct ThermalField;

// Behavioral modes. Contact with walls is the only stimulus driving the
// automaton; the thermal field, when present, only biases movement.
enum class Mode : std::uint8_t { Resting, Swimming, Crawling, Exploring };

const char* mode_name(Mode m);

enum class WallSide : std::uint8_t { Left, Right };

// Eight compass headings, index k points at angle 45*k degrees with grid
// north (k=2) toward decreasing y. Even indices are cardinal.
inline constexpr int kNumHeadings = 8;
extern const int heading_dx[kNumHeadings];
extern const int heading_dy[kNumHeadings];

struct AgentState {
    Cell pos;
    int heading = 0;               // 0..7
    Mode mode = Mode::Swimming;
    int dist_since_contact = 0;    // cells traveled since the last wall contact
    long step = 0;                 // trial clock, one step per second
    WallSide wall_side = WallSide::Right;  // which side crawling keeps the wall on
};

struct BehaviorParams {
    double p0_return = 0.5;          // return probability at zero distance
    double d_max = 40.0;             // decay span of the return probability, cells
    double p_rest_enter = 0.01;
    double p_rest_exit = 0.1;
    double p_swim_spont = 0.05;      // spontaneous crawl -> swim
    double v_swim = 2.0;             // cells per step; fractional speeds realized
    double v_crawl = 1.0;            //   by Bernoulli step-skipping
    double v_explore = 1.0;
    double turn_sigma_explore = 55.0;  // degrees
    double wall_follow_side_flip = 0.02;
    double taxis_beta = 0.0;         // per-degree-Celsius gain; 0 disables taxis
};

// Flat key=value config, keys named exactly as the struct fields.
BehaviorParams parse_params(const std::string& text);
std::string serialize_params(const BehaviorParams& p);

// Throws ValidationError on out-of-range fields (probabilities outside [0,1],
// non-positive d_max, negative speeds).
void validate_params(const BehaviorParams& p);

// p0_return * max(0, 1 - d / d_max): linear decay, zero at and beyond d_max.
double return_probability(double dist_since_contact, const BehaviorParams& p);

// Mode update from one step's contact observation:
//   Swimming  + contact    -> Crawling
//   Crawling  + contact    -> Exploring
//   Exploring + no contact -> Crawling with probability return_probability(d)
//   Crawling  + no contact -> Swimming w.p. p_swim_spont, else Resting w.p.
//                             p_rest_enter (two draws, swim checked first)
//   Resting                -> Crawling w.p. p_rest_exit
// anything else keeps the current mode.
Mode transition(const AgentState& state, bool contact, const BehaviorParams& p, Rng& rng);

struct MoveResult {
    AgentState state;
    bool contact = false;  // a wall blocked this step's path
};

// One simulation step of per-mode kinematics. Resting is stationary; Swimming
// is persistent motion with weak heading noise; Crawling follows walls with
// the wall kept on wall_side (straight-line motion when no wall is within one
// cell); Exploring is a correlated random walk. Diagonal displacement is two
// axis steps, both wall-checked, so corners are never cut. When `field` is
// non-null and taxis_beta > 0, stochastic heading choices are reweighted by
// exp(taxis_beta * dT) toward warmer cells.
MoveResult move(const AgentState& state, const FloorPlan& plan, const BehaviorParams& p,
                const ThermalField* field, Rng& rng);

}  // namespace leechsim
