#pragma once

#include <vector>

#include "leechsim/floorplan.hpp"

namespace leechsim {

// Converged steady-state temperature over a plan's open cells, degrees
// Celsius. Wall cells hold the ambient value but carry no meaning.
struct ThermalField {
    int width = 0;
    int height = 0;
    std::vector<double> temperature;

    double at(int x, int y) const { return temperature[static_cast<size_t>(y) * width + x]; }
};

// Steady-state heat equation on the open cells by Jacobi relaxation.
// Dirichlet conditions: source cells pinned at source_temp, exit cells at
// ambient. Walls are insulating; a cell relaxes to the mean of its non-wall
// 4-neighbors. Converged when the largest per-cell update drops below `tol`;
// ConvergenceError if `max_iters` sweeps do not get there.
ThermalField thermal_field(const FloorPlan& plan, const std::vector<Cell>& source,
                           double source_temp, double ambient, double tol = 1e-6,
                           long max_iters = 1000000);

}  // namespace leechsim
