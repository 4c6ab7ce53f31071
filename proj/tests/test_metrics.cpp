#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "leechsim/engine.hpp"
#include "leechsim/metrics.hpp"
#include "test_util.hpp"

using namespace leechsim;
using namespace leechsim::test;

namespace {

Trajectory path_of(const std::vector<Cell>& cells) {
    Trajectory t;
    int step = 0;
    for (Cell c : cells) t.samples.push_back({step++, c, Mode::Crawling});
    t.outcome = OutcomeKind::TimedOut;
    t.end_step = step - 1;
    return t;
}

// Reference f values reported for the template experiments.
const std::array<double, kNumDomains> kReportedF{0.09, 0.11, 0.17, 0.11, 0.23, 0.30};
// Reference complexity values.
const std::array<double, kNumDomains> kReportedC{0.15, 0.14, 0.10, 0.16, 0.22, 0.22};

}  // namespace

TEST_CASE("per-trial binary visit frequency") {
    FloorPlan plan = make_plan({"#####", "#AAA#", "#####"});
    Cell a{1, 1}, b{2, 1};

    SUBCASE("one trial visiting two cells") {
        auto fm = visit_frequency({path_of({a, b})}, plan);
        CHECK(fm.at(a.x, a.y) == doctest::Approx(0.5));
        CHECK(fm.at(b.x, b.y) == doctest::Approx(0.5));
    }
    SUBCASE("two trials with overlapping coverage") {
        auto fm = visit_frequency({path_of({a, a, a}), path_of({a, b})}, plan);
        CHECK(fm.at(a.x, a.y) == doctest::Approx(2.0 / 3.0));
        CHECK(fm.at(b.x, b.y) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("occupancy-time variant counts samples") {
        auto fm = visit_frequency({path_of({a, a, b})}, plan, FrequencyMode::OccupancyTime);
        CHECK(fm.at(a.x, a.y) == doctest::Approx(2.0 / 3.0));
        CHECK(fm.at(b.x, b.y) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("empty ensemble is rejected") {
        CHECK_THROWS_AS(visit_frequency({}, plan), ArgumentError);
    }
    SUBCASE("off-plan samples are rejected") {
        CHECK_THROWS_AS(visit_frequency({path_of({{0, 0}})}, plan), ArgumentError);
    }
}

TEST_CASE("visit frequency equals a brute-force recount") {
    // Independent oracle: per-trial visited sets via std::set, integer
    // counts, then the same normalization.
    Rng rng(60);
    for (int round = 0; round < 10; ++round) {
        FloorPlan plan = random_plan(rng);
        std::vector<Cell> open_cells;
        for (int y = 0; y < plan.height; ++y)
            for (int x = 0; x < plan.width; ++x)
                if (plan.is_open(x, y)) open_cells.push_back({x, y});

        int n_trials = 1 + rng.next_below(5);
        std::vector<Trajectory> trajectories;
        for (int i = 0; i < n_trials; ++i) {
            std::vector<Cell> cells;
            int len = 1 + rng.next_below(40);
            for (int j = 0; j < len; ++j)
                cells.push_back(open_cells[static_cast<size_t>(
                    rng.next_below(static_cast<int>(open_cells.size())))]);
            trajectories.push_back(path_of(cells));
        }

        std::map<Cell, long> counts;
        for (const auto& t : trajectories) {
            std::set<Cell> seen;
            for (const auto& s : t.samples) seen.insert(s.pos);
            for (Cell c : seen) counts[c] += 1;
        }
        long total = 0;
        for (const auto& [c, n] : counts) total += n;

        FrequencyMatrix fm = visit_frequency(trajectories, plan);
        for (int y = 0; y < plan.height; ++y)
            for (int x = 0; x < plan.width; ++x) {
                auto it = counts.find({x, y});
                double expected =
                    it == counts.end()
                        ? 0.0
                        : static_cast<double>(it->second) / static_cast<double>(total);
                CHECK(fm.at(x, y) == expected);  // bit-exact: same integer ratio
            }
    }
}

TEST_CASE("frequency matrix sums to one and is permutation invariant") {
    FloorPlan plan = load_bundled_plan();
    BehaviorParams p;
    auto trajectories = run_ensemble(plan, bundled_start(), p, 6, 17, nullptr, 400);

    FrequencyMatrix fm = visit_frequency(trajectories, plan);
    CHECK(std::abs(std::accumulate(fm.f.begin(), fm.f.end(), 0.0) - 1.0) < 1e-9);
    for (int y = 0; y < plan.height; ++y)
        for (int x = 0; x < plan.width; ++x)
            if (plan.kind(x, y) == CellKind::Wall) CHECK(fm.at(x, y) == 0.0);

    std::reverse(trajectories.begin(), trajectories.end());
    FrequencyMatrix fm2 = visit_frequency(trajectories, plan);
    CHECK(fm.f == fm2.f);
}

TEST_CASE("domain frequencies sum the matrix by domain") {
    FloorPlan plan = make_plan({"######", "#AABB#", "######"});
    Cell a1{1, 1}, a2{2, 1}, b1{3, 1}, b2{4, 1};

    SUBCASE("all visits in one domain") {
        auto df = domain_frequencies(visit_frequency({path_of({a1, a2})}, plan), plan);
        CHECK(df.of(DomainId::A) == doctest::Approx(1.0));
        CHECK(df.of(DomainId::B) == 0.0);
    }
    SUBCASE("uniform coverage of two equal domains") {
        auto df =
            domain_frequencies(visit_frequency({path_of({a1, a2, b1, b2})}, plan), plan);
        CHECK(df.of(DomainId::A) == doctest::Approx(0.5));
        CHECK(df.of(DomainId::B) == doctest::Approx(0.5));
    }
    SUBCASE("sums to one on simulated ensembles") {
        FloorPlan big = load_bundled_plan();
        BehaviorParams p;
        auto trajectories = run_ensemble(big, bundled_start(), p, 5, 23, nullptr, 500);
        auto df = domain_frequencies(visit_frequency(trajectories, big), big);
        double sum = std::accumulate(df.f.begin(), df.f.end(), 0.0);
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("threshold maps") {
    FloorPlan plan = make_plan({"#####", "#AAA#", "#####"});
    auto fm = visit_frequency({path_of({{1, 1}, {1, 1}, {2, 1}}),
                               path_of({{1, 1}})},
                              plan);  // f: (1,1)=2/3, (2,1)=1/3

    SUBCASE("theta 0 keeps exactly the visited cells") {
        ThresholdMap m = threshold_map(fm, 0.0);
        CHECK(m.at(1, 1));
        CHECK(m.at(2, 1));
        CHECK(!m.at(3, 1));
        CHECK(!m.at(0, 0));
    }
    SUBCASE("theta 1 keeps nothing") {
        ThresholdMap m = threshold_map(fm, 1.0);
        CHECK(std::count(m.mask.begin(), m.mask.end(), 1) == 0);
    }
    SUBCASE("masks shrink monotonically in theta") {
        FloorPlan big = load_bundled_plan();
        BehaviorParams p;
        auto fmx = visit_frequency(run_ensemble(big, bundled_start(), p, 5, 3, nullptr, 600),
                                   big);
        ThresholdMap prev = threshold_map(fmx, 0.0);
        for (double theta : {0.05, 0.10, 0.15, 0.5}) {
            ThresholdMap cur = threshold_map(fmx, theta);
            for (size_t i = 0; i < cur.mask.size(); ++i)
                if (cur.mask[i]) CHECK(prev.mask[i]);
            prev = cur;
        }
    }
    SUBCASE("theta outside [0,1] is rejected") {
        CHECK_THROWS_AS(threshold_map(fm, -0.1), ArgumentError);
        CHECK_THROWS_AS(threshold_map(fm, 1.5), ArgumentError);
    }
}

namespace {

std::vector<std::vector<DomainId>> groups_of(const char* spec) {
    // "F|E|C|BD|A" -> [[F],[E],[C],[B,D],[A]]
    std::vector<std::vector<DomainId>> out(1);
    for (const char* c = spec; *c; ++c) {
        if (*c == '|')
            out.emplace_back();
        else
            out.back().push_back(static_cast<DomainId>(*c - 'A'));
    }
    return out;
}

}  // namespace

TEST_CASE("hierarchy grouping") {
    SUBCASE("reported frequency values") {
        CHECK(hierarchy(kReportedF, 0.005) == groups_of("F|E|C|BD|A"));
    }
    SUBCASE("reported complexity values") {
        CHECK(hierarchy(kReportedC, 0.01) == groups_of("EF|D|AB|C"));
    }
    SUBCASE("all equal collapses to one group") {
        CHECK(hierarchy({0.2, 0.2, 0.2, 0.2, 0.2, 0.2}, 0.0) == groups_of("ABCDEF"));
    }
    SUBCASE("output is a total preorder with non-increasing values") {
        Rng rng(8);
        for (int i = 0; i < 100; ++i) {
            std::array<double, kNumDomains> values;
            for (double& v : values) v = rng.next_double();
            double eps = rng.next_double() * 0.3;
            auto groups = hierarchy(values, eps);
            std::set<DomainId> seen;
            double prev = 2.0;
            for (const auto& g : groups) {
                CHECK(!g.empty());
                for (DomainId d : g) {
                    CHECK(!seen.count(d));
                    seen.insert(d);
                    CHECK(values[static_cast<int>(d)] <= prev);
                    prev = values[static_cast<int>(d)];
                }
            }
            CHECK(seen.size() == kNumDomains);
        }
    }
}

TEST_CASE("cluster assignment") {
    DomainFrequencies df;
    df.f = kReportedF;
    ComplexityReport cr;
    cr.c = kReportedC;
    cr.total_corners = 100;

    ClusterReport report = clusters(df, cr);
    CHECK(report.of(DomainId::A) == Cluster::LowFreqModerateComplexity);
    CHECK(report.of(DomainId::B) == Cluster::LowFreqModerateComplexity);
    CHECK(report.of(DomainId::D) == Cluster::LowFreqModerateComplexity);
    CHECK(report.of(DomainId::C) == Cluster::ModerateFreqLowComplexity);
    CHECK(report.of(DomainId::E) == Cluster::HighFreqHighComplexity);
    CHECK(report.of(DomainId::F) == Cluster::HighFreqHighComplexity);

    // The F/E visit ratio reported alongside the clusters.
    CHECK(df.of(DomainId::F) / df.of(DomainId::E) == doctest::Approx(1.304).epsilon(0.001));

    // Six identical domains land in a single cluster.
    DomainFrequencies flat;
    flat.f.fill(1.0 / 6);
    ComplexityReport flat_c;
    flat_c.c.fill(1.0 / 6);
    ClusterReport degenerate = clusters(flat, flat_c);
    for (int d = 1; d < kNumDomains; ++d)
        CHECK(degenerate.assignment[d] == degenerate.assignment[0]);
}
