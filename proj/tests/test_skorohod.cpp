#include <catch2/catch.hpp>

#include <cmath>

#include "sweeping/rng.hpp"
#include "sweeping/sets.hpp"
#include "sweeping/skorohod.hpp"

using namespace sweeping;

namespace {

Driver scalar_driver(const TimeGrid& grid, const std::function<double(double)>& f,
                     DriverKind kind = DriverKind::analytic) {
    return Driver::from_function(grid, [&](double t) { return Vec{f(t)}; }, kind);
}

Driver random_walk_driver(const TimeGrid& grid, std::uint64_t seed) {
    std::vector<Vec> vals;
    double v = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        vals.push_back({v});
        v += rng::uniform(rng::key(seed, 1, i), -0.2, 0.15);
    }
    return Driver(grid, std::move(vals), DriverKind::sampled);
}

} // namespace

TEST_CASE("half-line reflection oracle hand cases") {
    const TimeGrid g(2.0, 1.0);
    auto x = halfline_reflection_oracle(
        Driver(g, {{0.0}, {-1.0}, {-2.0}}), 0.0);
    REQUIRE(x == std::vector<double>{0.0, 0.0, 0.0});

    x = halfline_reflection_oracle(Driver(g, {{0.0}, {-1.0}, {1.0}}), 0.0);
    REQUIRE(x == std::vector<double>{0.0, 0.0, 2.0});

    x = halfline_reflection_oracle(Driver(g, {{0.0}, {1.0}, {2.0}}), 0.5);
    REQUIRE(x == std::vector<double>{0.5, 1.5, 2.5});

    REQUIRE_THROWS_AS(halfline_reflection_oracle(Driver(g, {{0.0}, {0.0}, {0.0}}), -1.0),
                      ConfigError);
}

TEST_CASE("catching-up on the half-line: wall push, free motion, moving wall") {
    const TimeGrid grid(1.0, 0.1);
    const Halfspace halfline(Vec{1.0}, 0.0);

    // l(t) = -t: the wall absorbs all motion
    auto sol = catching_up(halfline, scalar_driver(grid, [](double t) { return -t; }),
                           Vec{0.0}, grid);
    for (std::size_t n = 0; n <= 10; ++n) {
        REQUIRE(sol.x[n][0] == Approx(0.0).margin(1e-15));
        REQUIRE(sol.k[n][0] == Approx(-grid.node(n)).margin(1e-15));
        REQUIRE(sol.tv_k[n] == Approx(grid.node(n)).margin(1e-14));
        if (n > 0) REQUIRE(sol.contact[n]);
    }

    // l(t) = +t: never touches the boundary
    sol = catching_up(halfline, scalar_driver(grid, [](double t) { return t; }), Vec{0.0}, grid);
    for (std::size_t n = 0; n <= 10; ++n) {
        REQUIRE(sol.x[n][0] == Approx(grid.node(n)).margin(1e-15));
        REQUIRE(norm(sol.k[n]) == Approx(0.0).margin(1e-15));
        REQUIRE_FALSE(sol.contact[n]);
    }

    // moving wall [t, inf) with l = 0: the wall pushes the point
    const Halfspace moving(Vec{1.0}, 0.0, 1.0);
    sol = catching_up(moving, scalar_driver(grid, [](double) { return 0.0; }), Vec{0.0}, grid);
    for (std::size_t n = 0; n <= 10; ++n) {
        REQUIRE(sol.x[n][0] == Approx(grid.node(n)).margin(1e-15));
        REQUIRE(sol.k[n][0] == Approx(-grid.node(n)).margin(1e-15));
    }
}

TEST_CASE("catching-up equals the reflection oracle node-for-node") {
    const TimeGrid grid(1.0, 1e-3);
    const Halfspace halfline(Vec{1.0}, 0.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Driver l = random_walk_driver(grid, seed);
        const auto sol = catching_up(halfline, l, Vec{0.0}, grid);
        const auto oracle = halfline_reflection_oracle(l, 0.0);
        for (std::size_t n = 0; n < oracle.size(); ++n)
            REQUIRE(std::fabs(sol.x[n][0] - oracle[n]) <= 1e-14);
    }
}

TEST_CASE("decomposition identity and nondecreasing variation") {
    const TimeGrid grid(1.0, 0.01);
    const Halfspace halfline(Vec{1.0}, 0.0);
    const Driver l = random_walk_driver(grid, 77);
    const auto sol = catching_up(halfline, l, Vec{0.0}, grid);
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
        REQUIRE(sol.k[n][0] == l.values[n][0] - sol.x[n][0]); // exact by construction
        REQUIRE(sol.x[n][0] + sol.k[n][0] == Approx(l.values[n][0]).margin(5e-16));
        if (n > 0) REQUIRE(sol.tv_k[n] >= sol.tv_k[n - 1]);
        REQUIRE(halfline.distance(grid.node(n), sol.x[n]) <= halfline.boundary_tolerance());
    }
}

TEST_CASE("catching-up validates its preconditions") {
    const TimeGrid grid(1.0, 0.1);
    const Halfspace halfline(Vec{1.0}, 0.0);
    REQUIRE_THROWS_AS(
        catching_up(halfline, scalar_driver(grid, [](double) { return 0.0; }), Vec{-1.0}, grid),
        ConfigError);
    REQUIRE_THROWS_AS(
        catching_up(halfline, scalar_driver(grid, [](double t) { return t - 0.5; }), Vec{0.0},
                    grid),
        ConfigError); // driver starts infeasible
}

TEST_CASE("step too large names the offending node") {
    const TimeGrid grid(1.0, 0.25);
    const BallExterior ball(Vec{0.0, 0.0}, 1.0);
    // driver dives toward the center at t = 0.5 (node 2)
    const Driver l = Driver::from_function(grid, [](double t) {
        return t < 0.4 ? Vec{2.0, 0.0} : Vec{0.05, 0.0};
    });
    try {
        catching_up(ball, l, Vec{2.0, 0.0}, grid);
        FAIL("expected StepTooLargeError");
    } catch (const StepTooLargeError& e) {
        REQUIRE(e.node() == 2);
        REQUIRE(std::string(e.what()).find("reduce the step") != std::string::npos);
    }
}

TEST_CASE("support check: clean runs pass, corrupted increments are caught") {
    const TimeGrid grid(1.0, 0.05);
    const Halfspace halfline(Vec{1.0}, 0.0);

    auto reflected = catching_up(halfline, scalar_driver(grid, [](double t) { return -t; }),
                                 Vec{0.0}, grid);
    REQUIRE(support_check(reflected, halfline, 1e-10).empty());

    auto free = catching_up(halfline, scalar_driver(grid, [](double t) { return t; }),
                            Vec{0.0}, grid);
    REQUIRE(support_check(free, halfline, 1e-10).empty());

    // corrupt: bump k at an interior node without contact
    auto corrupted = free;
    corrupted.k[7][0] += 0.5;
    const auto report = support_check(corrupted, halfline, 1e-10);
    REQUIRE(report.size() == 2); // the increment at node 7 and its reversal at node 8
    REQUIRE(report[0].node == 7);

    // corrupt: contact flagged but increment points inward (not a normal)
    auto wrong_dir = reflected;
    wrong_dir.k[5][0] += 0.3;
    wrong_dir.k[6][0] += 0.3; // step increment at node 5 now points inward
    const auto report2 = support_check(wrong_dir, halfline, 1e-10);
    REQUIRE_FALSE(report2.empty());
    REQUIRE(report2[0].node == 5);
    REQUIRE(report2[0].reason.find("not a proximal normal") != std::string::npos);
}

TEST_CASE("refinement table: smooth driver converges, constant driver is exact") {
    const Halfspace halfline(Vec{1.0}, 0.0);
    const TimeGrid fine(1.0, std::pow(2.0, -10.0));
    const Driver l = scalar_driver(fine, [](double t) { return std::sin(5.0 * t); });

    const auto rows = refine_compare(halfline, l, Vec{0.0},
                                     {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
    REQUIRE(rows.size() == 4);
    // errors never increase; dyadic grids sharing the minimizing node can
    // plateau exactly, so only the overall decrease is strict
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        REQUIRE(rows[i].h > rows[i + 1].h);
        REQUIRE(rows[i].sup_error >= rows[i + 1].sup_error);
    }
    REQUIRE(rows.back().sup_error < rows.front().sup_error);

    const Driver flat = scalar_driver(fine, [](double) { return 0.5; });
    const auto zero = refine_compare(halfline, flat, Vec{0.5}, {1.0 / 16, 1.0 / 64});
    for (const auto& row : zero) REQUIRE(row.sup_error == 0.0);

    // moving wall, l = 0: exact solution x(t) = t, node error bounded by h
    const Halfspace moving(Vec{1.0}, 0.0, 1.0);
    const Driver zero_l = scalar_driver(fine, [](double) { return 0.0; });
    const auto wall = refine_compare(moving, zero_l, Vec{0.0}, {1.0 / 16, 1.0 / 32});
    for (const auto& row : wall) {
        REQUIRE(row.sup_error <= row.h);
        const TimeGrid g(1.0, row.h);
        const auto sol = catching_up(moving, zero_l.restricted_to(g), Vec{0.0}, g);
        for (std::size_t i = 0; i < g.node_count(); ++i)
            REQUIRE(std::fabs(sol.x[i][0] - g.node(i)) <= row.h);
    }

    REQUIRE_THROWS_AS(refine_compare(halfline, l, Vec{0.0}, {0.3}), ConfigError); // non-nested
}

TEST_CASE("BV uniformity of the compensator across refinements") {
    const Halfspace halfline(Vec{1.0}, 0.0);
    const TimeGrid fine(1.0, std::pow(2.0, -10.0));
    const Driver l = scalar_driver(fine, [](double t) { return std::sin(5.0 * t); });
    const auto rows = refine_compare(halfline, l, Vec{0.0}, {1.0 / 64, 1.0 / 128, 1.0 / 256});
    const double ref = rows[0].tv_k;
    REQUIRE(ref > 0.9); // the exact total variation is 1 (depth of the sine's dip)
    for (const auto& row : rows)
        REQUIRE(std::fabs(row.tv_k - ref) / ref < 0.10);
}

TEST_CASE("Holder stability of the solution map in the driver") {
    const TimeGrid grid(1.0, 0.01);
    const Halfspace halfline(Vec{1.0}, 0.0);
    const double c = 8.0; // scenario-declared constant
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Driver a = random_walk_driver(grid, 100 + seed);
        Driver b = a;
        for (std::size_t i = 1; i < b.values.size(); ++i)
            b.values[i][0] += rng::uniform(rng::key(seed, 9, i), -0.05, 0.05);
        const auto xa = catching_up(halfline, a, Vec{0.0}, grid);
        const auto xb = catching_up(halfline, b, Vec{0.0}, grid);
        double dx = 0.0, dl = 0.0;
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            dx = std::max(dx, std::fabs(xa.x[i][0] - xb.x[i][0]));
            dl = std::max(dl, std::fabs(a.values[i][0] - b.values[i][0]));
        }
        REQUIRE(dx * dx <= c * (dl + dl * dl) + 1e-12);
    }
}

TEST_CASE("driver interpolation and restriction") {
    const TimeGrid grid(1.0, 0.25);
    const Driver l = scalar_driver(grid, [](double t) { return t * t; });
    REQUIRE(l.at(0.125)[0] == Approx(0.5 * (0.0 + 0.0625)));
    REQUIRE(l.at(1.0)[0] == Approx(1.0));
    REQUIRE(l.at(-1.0)[0] == 0.0);

    const TimeGrid coarse(1.0, 0.5);
    const Driver r = l.restricted_to(coarse);
    REQUIRE(r.values.size() == 3);
    REQUIRE(r.values[1][0] == Approx(0.25));
    REQUIRE_THROWS_AS(l.restricted_to(TimeGrid(1.0, 0.4)), ConfigError);
}
