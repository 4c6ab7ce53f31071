#include "leechsim/floorplan.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <deque>
#include <sstream>

namespace leechsim {

namespace {

constexpr int dir4_dx[4] = {0, 1, 0, -1};  // N, E, S, W
constexpr int dir4_dy[4] = {-1, 0, 1, 0};

}  // namespace

int WallContacts::count() const { return std::popcount(bits); }

std::optional<DomainId> domain_from_char(char c) {
    if (c >= 'A' && c <= 'F') return static_cast<DomainId>(c - 'A');
    return std::nullopt;
}

bool FloorPlan::has_domain(DomainId d) const {
    return std::find(domain.begin(), domain.end(), static_cast<std::int8_t>(d)) != domain.end();
}

std::vector<DomainId> FloorPlan::domains_present() const {
    std::array<bool, kNumDomains> seen{};
    for (std::int8_t d : domain)
        if (d >= 0) seen[d] = true;
    std::vector<DomainId> out;
    for (int i = 0; i < kNumDomains; ++i)
        if (seen[i]) out.push_back(static_cast<DomainId>(i));
    return out;
}

int FloorPlan::count_kind(CellKind k) const {
    return static_cast<int>(std::count(cells.begin(), cells.end(), k));
}

namespace {

// Exit cells carry the domain of the nearest free cell (by 4-connected BFS
// through open cells), smallest DomainId on ties. Keeps domain mass defined
// for every reachable cell, including escape openings.
void assign_exit_domains(FloorPlan& plan) {
    std::deque<Cell> queue;
    for (int y = 0; y < plan.height; ++y)
        for (int x = 0; x < plan.width; ++x)
            if (plan.kind(x, y) == CellKind::Free) queue.push_back({x, y});

    while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        std::int8_t d = plan.domain[static_cast<size_t>(c.y) * plan.width + c.x];
        if (d < 0) continue;
        for (int k = 0; k < 4; ++k) {
            int nx = c.x + dir4_dx[k];
            int ny = c.y + dir4_dy[k];
            if (plan.kind(nx, ny) != CellKind::Exit) continue;
            std::int8_t& nd = plan.domain[static_cast<size_t>(ny) * plan.width + nx];
            if (nd < 0) {
                nd = d;
                queue.push_back({nx, ny});
            } else if (d < nd) {
                // Smaller domain reached this exit in the same BFS layer.
                nd = d;
                queue.push_back({nx, ny});
            }
        }
    }
}

}  // namespace

void validate_plan(const FloorPlan& plan) {
    if (plan.width < 3 || plan.height < 3)
        throw ValidationError("plan must be at least 3x3 cells");
    if (plan.cell_size_mm <= 0.0)
        throw ValidationError("cell size must be positive");
    size_t n = static_cast<size_t>(plan.width) * plan.height;
    if (plan.cells.size() != n || plan.domain.size() != n)
        throw ValidationError("cell and domain grids must match plan dimensions");

    int open_cells = 0;
    for (int y = 0; y < plan.height; ++y) {
        for (int x = 0; x < plan.width; ++x) {
            CellKind k = plan.kind(x, y);
            bool boundary = x == 0 || y == 0 || x == plan.width - 1 || y == plan.height - 1;
            if (boundary && k == CellKind::Free)
                throw ValidationError("boundary cell (" + std::to_string(x) + "," +
                                      std::to_string(y) + ") must be wall or exit");
            if (k == CellKind::Free && !plan.domain_of(x, y))
                throw ValidationError("free cell (" + std::to_string(x) + "," +
                                      std::to_string(y) + ") has no domain label");
            if (k == CellKind::Wall && plan.domain_of(x, y))
                throw ValidationError("wall cell (" + std::to_string(x) + "," +
                                      std::to_string(y) + ") carries a domain label");
            if (k != CellKind::Wall) ++open_cells;
        }
    }
    if (open_cells == 0) throw ValidationError("plan has no open cells");

    // Free and exit cells must form one 4-connected component.
    std::vector<char> seen(n, 0);
    std::deque<Cell> queue;
    for (int y = 0; y < plan.height && queue.empty(); ++y)
        for (int x = 0; x < plan.width && queue.empty(); ++x)
            if (plan.is_open(x, y)) {
                queue.push_back({x, y});
                seen[static_cast<size_t>(y) * plan.width + x] = 1;
            }
    int reached = 0;
    while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        ++reached;
        for (int k = 0; k < 4; ++k) {
            int nx = c.x + dir4_dx[k];
            int ny = c.y + dir4_dy[k];
            if (!plan.in_bounds(nx, ny) || !plan.is_open(nx, ny)) continue;
            char& s = seen[static_cast<size_t>(ny) * plan.width + nx];
            if (!s) {
                s = 1;
                queue.push_back({nx, ny});
            }
        }
    }
    if (reached != open_cells)
        throw ValidationError("open space is disconnected: " + std::to_string(reached) + " of " +
                              std::to_string(open_cells) + " open cells reachable");
}

FloorPlan parse_plan(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty plan file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    constexpr std::string_view kScaleKey = "scale_mm_per_cell=";
    if (line.rfind(kScaleKey, 0) != 0)
        throw FormatError("first line must be 'scale_mm_per_cell=<decimal>'");
    double scale = 0.0;
    {
        const char* begin = line.data() + kScaleKey.size();
        const char* end = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(begin, end, scale);
        if (ec != std::errc() || ptr != end || scale <= 0.0)
            throw FormatError("bad scale value '" + line.substr(kScaleKey.size()) + "'");
    }

    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty()) throw FormatError("plan has no grid rows");

    FloorPlan plan;
    plan.height = static_cast<int>(rows.size());
    plan.width = static_cast<int>(rows[0].size());
    plan.cell_size_mm = scale;
    plan.cells.assign(static_cast<size_t>(plan.width) * plan.height, CellKind::Wall);
    plan.domain.assign(static_cast<size_t>(plan.width) * plan.height, -1);

    for (int y = 0; y < plan.height; ++y) {
        if (static_cast<int>(rows[y].size()) != plan.width)
            throw FormatError("ragged row " + std::to_string(y + 1) + ": expected " +
                              std::to_string(plan.width) + " cells, got " +
                              std::to_string(rows[y].size()));
        for (int x = 0; x < plan.width; ++x) {
            char c = rows[y][x];
            size_t i = static_cast<size_t>(y) * plan.width + x;
            if (c == '#') {
                plan.cells[i] = CellKind::Wall;
            } else if (c == 'X') {
                plan.cells[i] = CellKind::Exit;
            } else if (auto d = domain_from_char(c)) {
                plan.cells[i] = CellKind::Free;
                plan.domain[i] = static_cast<std::int8_t>(*d);
            } else {
                throw FormatError(std::string("unknown cell character '") + c + "' at row " +
                                  std::to_string(y + 1) + ", column " + std::to_string(x + 1));
            }
        }
    }

    validate_plan(plan);
    assign_exit_domains(plan);
    return plan;
}

std::string serialize_plan(const FloorPlan& plan) {
    std::ostringstream out;
    out << "scale_mm_per_cell=" << plan.cell_size_mm << "\n";
    for (int y = 0; y < plan.height; ++y) {
        for (int x = 0; x < plan.width; ++x) {
            switch (plan.kind(x, y)) {
                case CellKind::Wall: out << '#'; break;
                case CellKind::Exit: out << 'X'; break;
                case CellKind::Free: out << domain_char(*plan.domain_of(x, y)); break;
            }
        }
        out << "\n";
    }
    return out.str();
}

namespace {

// Corner rule, evaluated per lattice vertex from its 2x2 cell neighborhood
// (out of bounds counts as wall):
//   1 or 3 walls            -> one 90-degree turn
//   2 walls diagonally      -> two turns meeting at the vertex, one per open cell
//   otherwise               -> boundary straight or absent, no turn
// Each turn is attributed to the domain of an adjacent open cell, smallest
// DomainId when several open cells with different domains touch the vertex.
void accumulate_corners(const FloorPlan& plan, std::array<int, kNumDomains>& per_domain) {
    for (int vy = 0; vy <= plan.height; ++vy) {
        for (int vx = 0; vx <= plan.width; ++vx) {
            Cell quad[4] = {{vx - 1, vy - 1}, {vx, vy - 1}, {vx - 1, vy}, {vx, vy}};
            int walls = 0;
            unsigned open_mask = 0;
            for (int i = 0; i < 4; ++i) {
                if (plan.kind(quad[i]) == CellKind::Wall)
                    ++walls;
                else
                    open_mask |= 1u << i;
            }

            auto domain_at = [&](int i) -> int {
                auto d = plan.domain_of(quad[i]);
                return d ? static_cast<int>(*d) : -1;
            };

            if (walls == 1 || walls == 3) {
                int best = kNumDomains;
                for (int i = 0; i < 4; ++i)
                    if (open_mask & (1u << i)) {
                        int d = domain_at(i);
                        if (d >= 0 && d < best) best = d;
                    }
                if (best < kNumDomains) ++per_domain[best];
            } else if (walls == 2 && (open_mask == 0b1001 || open_mask == 0b0110)) {
                // Checkerboard vertex: each open cell's boundary turns here.
                for (int i = 0; i < 4; ++i)
                    if (open_mask & (1u << i)) {
                        int d = domain_at(i);
                        if (d >= 0) ++per_domain[d];
                    }
            }
        }
    }
}

}  // namespace

int count_corners(const FloorPlan& plan, DomainId d) {
    std::array<int, kNumDomains> per_domain{};
    accumulate_corners(plan, per_domain);
    return per_domain[static_cast<int>(d)];
}

ComplexityReport complexity(const FloorPlan& plan) {
    ComplexityReport report;
    accumulate_corners(plan, report.corners_per_domain);
    for (int c : report.corners_per_domain) report.total_corners += c;
    if (report.total_corners == 0)
        throw DegenerateGeometryError("plan has no boundary corners");
    for (int i = 0; i < kNumDomains; ++i)
        report.c[i] = static_cast<double>(report.corners_per_domain[i]) / report.total_corners;
    return report;
}

WallContacts contact_walls(const FloorPlan& plan, Cell pos) {
    if (!plan.in_bounds(pos.x, pos.y))
        throw ArgumentError("position (" + std::to_string(pos.x) + "," + std::to_string(pos.y) +
                            ") is out of bounds");
    if (plan.kind(pos) == CellKind::Wall)
        throw ArgumentError("position (" + std::to_string(pos.x) + "," + std::to_string(pos.y) +
                            ") is a wall cell");
    WallContacts contacts;
    for (int k = 0; k < 4; ++k)
        if (plan.kind(pos.x + dir4_dx[k], pos.y + dir4_dy[k]) == CellKind::Wall)
            contacts.set(static_cast<Dir4>(k));
    return contacts;
}

}  // namespace leechsim
