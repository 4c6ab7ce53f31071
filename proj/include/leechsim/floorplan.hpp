#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leechsim/errors.hpp"

namespace leechsim {

enum class CellKind : std::uint8_t { Wall, Free, Exit };

// The six labeled regions of a plan. Values order lexicographically, which is
// also the tie-break order wherever two domains meet.
enum class DomainId : std::uint8_t { A, B, C, D, E, F };

inline constexpr int kNumDomains = 6;

constexpr char domain_char(DomainId d) { return static_cast<char>('A' + static_cast<int>(d)); }

std::optional<DomainId> domain_from_char(char c);

struct Cell {
    int x = 0;
    int y = 0;
    auto operator<=>(const Cell&) const = default;
};

// Cardinal directions for wall-contact queries; grid north is decreasing y.
enum class Dir4 : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

struct WallContacts {
    std::uint8_t bits = 0;

    bool has(Dir4 d) const { return bits & (1u << static_cast<int>(d)); }
    void set(Dir4 d) { bits |= (1u << static_cast<int>(d)); }
    bool empty() const { return bits == 0; }
    int count() const;
};

// An occupancy-grid floor plan. Immutable after parsing; one instance may be
// shared across concurrently running trials without synchronization.
struct FloorPlan {
    int width = 0;
    int height = 0;
    double cell_size_mm = 1.0;
    std::vector<CellKind> cells;        // row-major, y * width + x
    std::vector<std::int8_t> domain;    // DomainId index, -1 = none

    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

    // Out-of-bounds reads as Wall so boundary openings behave like walls
    // beyond the template edge.
    CellKind kind(int x, int y) const {
        return in_bounds(x, y) ? cells[static_cast<size_t>(y) * width + x] : CellKind::Wall;
    }
    CellKind kind(Cell c) const { return kind(c.x, c.y); }

    bool is_open(int x, int y) const { return kind(x, y) != CellKind::Wall; }
    bool is_open(Cell c) const { return is_open(c.x, c.y); }

    std::optional<DomainId> domain_of(int x, int y) const {
        if (!in_bounds(x, y)) return std::nullopt;
        std::int8_t d = domain[static_cast<size_t>(y) * width + x];
        return d < 0 ? std::nullopt : std::optional<DomainId>(static_cast<DomainId>(d));
    }
    std::optional<DomainId> domain_of(Cell c) const { return domain_of(c.x, c.y); }

    bool has_domain(DomainId d) const;
    std::vector<DomainId> domains_present() const;
    int count_kind(CellKind k) const;
};

struct ComplexityReport {
    std::array<int, kNumDomains> corners_per_domain{};
    int total_corners = 0;
    std::array<double, kNumDomains> c{};  // corners_per_domain / total_corners

    double of(DomainId d) const { return c[static_cast<int>(d)]; }
};

// Plan file format: line 1 `scale_mm_per_cell=<decimal>`, then one row per
// line, one character per cell: '#' wall, 'X' exit, 'A'..'F' free cell of
// that domain. Rows must be equal length.
FloorPlan parse_plan(const std::string& text);

std::string serialize_plan(const FloorPlan& plan);

// Checks all structural invariants; throws ValidationError on the first
// violation. parse_plan calls this, hand-built plans can too.
void validate_plan(const FloorPlan& plan);

// Number of 90-degree turns of the wall/free boundary attributable to domain
// d. Both convex and reflex turns count; doorway jambs count. A domain absent
// from the plan has zero corners.
int count_corners(const FloorPlan& plan, DomainId d);

ComplexityReport complexity(const FloorPlan& plan);

// Which 4-neighbors of pos are walls. pos must be an open cell.
WallContacts contact_walls(const FloorPlan& plan, Cell pos);

}  // namespace leechsim
