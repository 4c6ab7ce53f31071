#include "leechsim/thermal.hpp"

#include <algorithm>
#include <cmath>

namespace leechsim {

ThermalField thermal_field(const FloorPlan& plan, const std::vector<Cell>& source,
                           double source_temp, double ambient, double tol, long max_iters) {
    if (source.empty()) throw ArgumentError("thermal source is empty");
    if (!(source_temp > ambient)) throw ArgumentError("source_temp must exceed ambient");

    size_t n = static_cast<size_t>(plan.width) * plan.height;
    std::vector<char> fixed(n, 0);
    for (Cell c : source) {
        if (plan.kind(c) != CellKind::Free)
            throw ArgumentError("thermal source cell (" + std::to_string(c.x) + "," +
                                std::to_string(c.y) + ") is not a free cell");
        fixed[static_cast<size_t>(c.y) * plan.width + c.x] = 1;
    }

    ThermalField field{plan.width, plan.height, std::vector<double>(n, ambient)};
    for (Cell c : source) field.temperature[static_cast<size_t>(c.y) * plan.width + c.x] = source_temp;
    // Exit openings sit on the template edge and stay at room temperature.
    for (int y = 0; y < plan.height; ++y)
        for (int x = 0; x < plan.width; ++x)
            if (plan.kind(x, y) == CellKind::Exit) fixed[static_cast<size_t>(y) * plan.width + x] = 1;

    std::vector<double> next = field.temperature;
    constexpr int dx[4] = {0, 1, 0, -1};
    constexpr int dy[4] = {-1, 0, 1, 0};

    for (long iter = 0; iter < max_iters; ++iter) {
        double max_update = 0.0;
        for (int y = 0; y < plan.height; ++y) {
            for (int x = 0; x < plan.width; ++x) {
                size_t i = static_cast<size_t>(y) * plan.width + x;
                if (plan.kind(x, y) == CellKind::Wall || fixed[i]) {
                    next[i] = field.temperature[i];
                    continue;
                }
                double sum = 0.0;
                int cnt = 0;
                for (int k = 0; k < 4; ++k) {
                    int nx = x + dx[k];
                    int ny = y + dy[k];
                    if (plan.is_open(nx, ny)) {
                        sum += field.temperature[static_cast<size_t>(ny) * plan.width + nx];
                        ++cnt;
                    }
                }
                double t = cnt > 0 ? sum / cnt : field.temperature[i];
                next[i] = t;
                max_update = std::max(max_update, std::abs(t - field.temperature[i]));
            }
        }
        field.temperature.swap(next);
        if (max_update < tol) return field;
    }
    throw ConvergenceError("thermal relaxation did not converge within " +
                           std::to_string(max_iters) + " sweeps");
}

}  // namespace leechsim
