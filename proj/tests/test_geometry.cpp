#include <catch2/catch.hpp>

#include <cmath>
#include <limits>
#include <memory>

#include "sweeping/moving_set.hpp"
#include "sweeping/rng.hpp"
#include "sweeping/sets.hpp"

using namespace sweeping;

TEST_CASE("halfspace projection closed form") {
    REQUIRE(project_halfspace(Vec{0.0, 1.0}, 0.0, Vec{3.0, -2.0}) == Vec{3.0, 0.0});
    REQUIRE(project_halfspace(Vec{0.0, 1.0}, 0.0, Vec{3.0, 5.0}) == Vec{3.0, 5.0});
    const Vec p = project_halfspace(Vec{1.0, 1.0}, 0.0, Vec{-1.0, -1.0});
    REQUIRE(p[0] == Approx(0.0).margin(1e-15));
    REQUIRE(p[1] == Approx(0.0).margin(1e-15));
    REQUIRE_THROWS_AS(project_halfspace(Vec{0.0, 0.0}, 0.0, Vec{1.0, 1.0}), ConfigError);
}

TEST_CASE("ball exterior projection closed form") {
    const Vec c{0.0, 0.0};
    REQUIRE(project_ball_exterior(c, 1.0, Vec{0.5, 0.0}) == Vec{1.0, 0.0});
    REQUIRE(project_ball_exterior(c, 1.0, Vec{2.0, 0.0}) == Vec{2.0, 0.0});
    REQUIRE(project_ball_exterior(c, 1.0, Vec{0.0, 0.0}) == Vec{1.0, 0.0}); // tie-break
    REQUIRE_THROWS_AS(project_ball_exterior(c, 0.0, Vec{1.0, 0.0}), ConfigError);
}

TEST_CASE("projection idempotence and optimality on concrete sets") {
    const BallExterior ball(Vec{0.0, 0.0}, 1.0);
    const Halfspace half(Vec{1.0, 2.0}, 0.5);
    const MovingSet* sets[] = {&ball, &half};
    for (const MovingSet* set : sets) {
        for (std::uint64_t k = 0; k < 200; ++k) {
            Vec z{rng::uniform(rng::key(1, 0, k), -2.0, 2.0),
                  rng::uniform(rng::key(1, 1, k), -2.0, 2.0)};
            const double d = set->distance(0.0, z);
            if (std::isfinite(set->prox_constant()) && d >= 0.85 * set->prox_constant()) continue;
            const Vec p = set->project(0.0, z);
            REQUIRE(set->distance(0.0, p) <= set->boundary_tolerance());
            REQUIRE(distance(set->project(0.0, p), p) <= 1e-9);
            REQUIRE(distance(z, p) == Approx(d).margin(1e-9));
            // optimality against sampled feasible points
            for (std::uint64_t s = 0; s < 20; ++s) {
                Vec y{rng::uniform(rng::key(2, 0, 20 * k + s), -3.0, 3.0),
                      rng::uniform(rng::key(2, 1, 20 * k + s), -3.0, 3.0)};
                if (set->distance(0.0, y) > set->boundary_tolerance()) continue;
                REQUIRE(distance(z, p) <= distance(z, y) + 1e-9);
            }
        }
    }
}

TEST_CASE("projection refuses outside the prox tube") {
    const BallExterior ball(Vec{0.0, 0.0}, 1.0);
    REQUIRE_THROWS_AS(ball.project(0.0, Vec{0.01, 0.0}), StepTooLargeError);
    // convex sets have an infinite tube
    const Halfspace half(Vec{0.0, 1.0}, 0.0);
    REQUIRE_NOTHROW(half.project(0.0, Vec{0.0, -1e9}));
}

TEST_CASE("proximal normal test on catalogue sets") {
    const Halfspace half(Vec{0.0, 1.0}, 0.0);
    REQUIRE(proximal_normal_test(half, 0.0, Vec{0.0, 0.0}, Vec{0.0, -1.0}, 0.1));
    REQUIRE_FALSE(proximal_normal_test(half, 0.0, Vec{0.0, 0.0}, Vec{0.0, 1.0}, 0.1));

    const BallExterior ball(Vec{0.0, 0.0}, 1.0);
    REQUIRE(proximal_normal_test(ball, 0.0, Vec{1.0, 0.0}, Vec{-1.0, 0.0}, 0.25));
    REQUIRE_FALSE(proximal_normal_test(ball, 0.0, Vec{1.0, 0.0}, Vec{1.0, 1.0}, 0.25));

    REQUIRE_THROWS_AS(proximal_normal_test(ball, 0.0, Vec{1.0, 0.0}, Vec{-1.0, 0.0}, 0.6),
                      ConfigError); // s >= eta/2 refused
    // interior point: normal cone is {0}, every direction fails the test
    REQUIRE_FALSE(proximal_normal_test(ball, 0.0, Vec{2.0, 0.0}, Vec{-1.0, 0.0}, 0.25));
    REQUIRE_THROWS_AS(proximal_normal_test(ball, 0.0, Vec{0.5, 0.0}, Vec{-1.0, 0.0}, 0.25),
                      ConfigError); // infeasible point
}

TEST_CASE("hypomonotonicity check accepts true eta and refutes inflated eta") {
    const BallExterior ball(Vec{0.0, 0.0}, 1.0);
    const SamplingWindow window(Vec{-2.0, -2.0}, Vec{2.0, 2.0});

    const auto ok = hypomonotonicity_check(ball, 0.0, 1.0, 10000, 99, window);
    REQUIRE(ok.samples_tested == 10000);
    REQUIRE(ok.passed());

    const auto bad = hypomonotonicity_check(ball, 0.0, 10.0, 10000, 99, window);
    REQUIRE_FALSE(bad.passed());

    const Halfspace half(Vec{0.0, 1.0}, 0.0);
    const auto convex = hypomonotonicity_check(
        half, 0.0, std::numeric_limits<double>::infinity(), 10000, 7, window);
    REQUIRE(convex.passed());
}

TEST_CASE("hypomonotonicity check rejects an empty window") {
    const Halfspace half(Vec{0.0, 1.0}, 0.0);
    const SamplingWindow below(Vec{-1.0, -5.0}, Vec{1.0, -4.0}); // no feasible points
    REQUIRE_THROWS_AS(hypomonotonicity_check(half, 0.0, 1.0, 10, 3, below), ConfigError);
}

TEST_CASE("dilation: distance identity, projection, refusal") {
    auto ball = std::make_shared<BallExterior>(Vec{0.0, 0.0}, 1.0);
    const auto dilated = dilate(ball, 0.1);

    REQUIRE(dilated->distance(0.0, Vec{0.0, 0.0}) == Approx(0.9));
    REQUIRE(dilated->distance(0.0, Vec{0.96, 0.0}) == Approx(0.0).margin(1e-12));
    REQUIRE(dilated->prox_constant() == Approx(1.0 / 8.0));

    const Vec p = dilated->project(0.0, Vec{0.5, 0.0});
    REQUIRE(p[0] == Approx(0.9).margin(1e-12));
    REQUIRE(p[1] == Approx(0.0).margin(1e-12));

    REQUIRE_THROWS_AS(dilate(ball, 0.2), ConfigError); // eps >= eta/8

    // pointwise identity d_{C+eps B} = max(d_C - eps, 0) on random samples
    for (std::uint64_t k = 0; k < 200; ++k) {
        Vec z{rng::uniform(rng::key(4, 0, k), -2.0, 2.0),
              rng::uniform(rng::key(4, 1, k), -2.0, 2.0)};
        REQUIRE(dilated->distance(0.0, z) ==
                Approx(std::max(ball->distance(0.0, z) - 0.1, 0.0)).margin(1e-12));
    }
}

TEST_CASE("dilating a convex set keeps an infinite prox constant") {
    auto half = std::make_shared<Halfspace>(Vec{0.0, 1.0}, 0.0);
    const auto dilated = dilate(half, 3.0);
    REQUIRE(std::isinf(dilated->prox_constant()));
    REQUIRE(dilated->distance(0.0, Vec{0.0, -4.0}) == Approx(1.0));
}

TEST_CASE("hausdorff estimate on known pairs") {
    const SamplingWindow window(Vec{-3.0, -3.0}, Vec{3.0, 3.0});
    const Halfspace a(Vec{0.0, 1.0}, 0.0);
    const Halfspace b(Vec{0.0, 1.0}, 1.0);

    REQUIRE(hausdorff_estimate(a, 0.0, a, 0.0, window, 2000, 5) == Approx(0.0).margin(1e-12));
    REQUIRE(hausdorff_estimate(a, 0.0, b, 0.0, window, 2000, 5) == Approx(1.0).margin(0.02));

    // moving half-line [t, inf): translation distance between snapshots
    const Halfspace wall(Vec{1.0}, 0.0, 1.0);
    const SamplingWindow win1(Vec{-1.0}, Vec{3.0});
    REQUIRE(hausdorff_estimate(wall, 0.0, wall, 0.5, win1, 4000, 5) == Approx(0.5).margin(0.01));
    REQUIRE(wall.variation_rate().value() == Approx(1.0));
}

TEST_CASE("hausdorff estimate is monotone in the sample count") {
    const Halfspace a(Vec{0.0, 1.0}, 0.0);
    const BallExterior b(Vec{0.0, 0.5}, 1.0);
    const SamplingWindow window(Vec{-2.0, -2.0}, Vec{2.0, 2.0});
    double prev = 0.0;
    for (std::size_t n : {10, 50, 250, 1250}) {
        const double est = hausdorff_estimate(a, 0.0, b, 0.0, window, n, 17);
        REQUIRE(est >= prev - 1e-15);
        prev = est;
    }
}

TEST_CASE("ball exterior union validates separation and projects") {
    using Ball = BallExteriorUnion::Ball;
    REQUIRE_THROWS_AS(
        BallExteriorUnion({Ball{{0.0, 0.0}, 1.0}, Ball{{1.5, 0.0}, 1.0}}),
        ConfigError);

    const BallExteriorUnion set({Ball{{0.0, 0.0}, 1.0}, Ball{{4.0, 0.0}, 1.0}});
    REQUIRE(set.prox_constant() == Approx(1.0)); // min(radius, gap/2)
    REQUIRE(set.distance(0.0, Vec{0.5, 0.0}) == Approx(0.5));
    REQUIRE(set.distance(0.0, Vec{4.0, 0.5}) == Approx(0.5));
    const Vec p = set.project(0.0, Vec{4.2, 0.0});
    REQUIRE(p[0] == Approx(5.0));
}

TEST_CASE("hypomonotonicity holds with the declared eta on every catalogue set") {
    const SamplingWindow window(Vec{-3.0, -3.0}, Vec{7.0, 3.0});
    using Ball = BallExteriorUnion::Ball;
    const auto union_set =
        std::make_shared<BallExteriorUnion>(std::vector<Ball>{{{0.0, 0.0}, 1.0}, {{4.0, 0.0}, 1.0}});
    const auto dilated = dilate(std::make_shared<BallExterior>(Vec{0.0, 0.0}, 1.0), 0.1);

    REQUIRE(hypomonotonicity_check(*union_set, 0.0, union_set->prox_constant(), 4000, 12, window)
                .passed());
    REQUIRE(hypomonotonicity_check(*dilated, 0.0, dilated->prox_constant(), 4000, 12, window)
                .passed());
}
