#include <catch2/catch.hpp>

#include <cmath>

#include "sweeping/constraint_set.hpp"
#include "sweeping/crowd.hpp"
#include "sweeping/rng.hpp"

using namespace sweeping;

namespace {

SmoothConstraint affine(std::string name, Vec normal, double offset, double rate = 0.0) {
    SmoothConstraint c;
    c.name = std::move(name);
    c.value = [normal, offset, rate](double t, std::span<const double> x) {
        return dot(normal, x) - offset - rate * t;
    };
    c.gradient = [normal](double, std::span<const double>) { return normal; };
    c.time_derivative = [rate](double, std::span<const double>) { return -rate; };
    c.time_derivative_bound = std::fabs(rate);
    return c;
}

// two disks of radius 1 at contact along the x-axis, as a 4-D constraint set
ConstraintSet two_disk_contact_set() {
    std::vector<SmoothConstraint> cs;
    cs.push_back(disk_contact_constraint(2, 0, 1, RadiusSchedule::constant(1.0),
                                         RadiusSchedule::constant(1.0)));
    ConstraintSet::Params p;
    p.alpha = std::sqrt(2.0);
    p.beta = std::sqrt(2.0);
    p.hessian_bound = 2.0;
    p.rho = 0.1;
    return ConstraintSet(std::move(cs), 4, p);
}

} // namespace

TEST_CASE("active constraints select exactly the rho-near ones") {
    const Vec q{-1.0, 0.0, 1.0, 0.0}; // contact: D12 = 0
    const auto set = two_disk_contact_set();
    REQUIRE(active_constraints(set, 0.0, q, 0.0).indices == std::vector<std::size_t>{0});
    const Vec far{-1.0, 0.0, 6.0, 0.0}; // D12 = 5
    REQUIRE(active_constraints(set, 0.0, far, 0.1).indices.empty());

    // three disks with pair distances {0, 0.05, ~3}: exactly two pairs active
    std::vector<SmoothConstraint> cs;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            cs.push_back(disk_contact_constraint(3, i, j, RadiusSchedule::constant(0.5),
                                                 RadiusSchedule::constant(0.5)));
    ConstraintSet::Params p;
    p.alpha = std::sqrt(2.0);
    p.beta = std::sqrt(2.0);
    p.rho = 0.1;
    const ConstraintSet three(std::move(cs), 6, p);
    const Vec q3{0.0, 0.0, 1.0, 0.0, 2.05, 0.0}; // D01 = 0, D12 = 0.05, D02 = 1.05
    const auto act = active_constraints(three, 0.0, q3, 0.1);
    REQUIRE(act.indices == std::vector<std::size_t>{0, 2}); // pairs (0,1) and (1,2)
}

TEST_CASE("active constraints validate input") {
    const auto set = two_disk_contact_set();
    const Vec q{-1.0, 0.0, 1.0, 0.0};
    REQUIRE_THROWS_AS(active_constraints(set, 0.0, q, -0.1), ConfigError);
    REQUIRE_THROWS_AS(
        active_constraints(set, 0.0, Vec{std::nan(""), 0.0, 1.0, 0.0}, 0.1), ConfigError);
}

TEST_CASE("gamma estimate against hand values") {
    REQUIRE(gamma_estimate({{1.0, 0.0}}) == Approx(1.0));
    REQUIRE(gamma_estimate({{1.0, 0.0}, {0.0, 1.0}}) == Approx(std::sqrt(2.0)).margin(1e-9));
    REQUIRE_THROWS_AS(gamma_estimate({{1.0, 0.0}, {-1.0, 0.0}}), AdmissibilityError);
    REQUIRE_THROWS_AS(gamma_estimate({{2.0, 0.0}}), ConfigError); // not unit
}

TEST_CASE("gamma estimate matches dense simplex brute force") {
    // brute force over barycentric weights, step 1e-3, for up to 3 normals
    auto brute = [](const std::vector<Vec>& ns) {
        double best = 1e300;
        const double step = 1e-3;
        if (ns.size() == 2) {
            for (double a = 0.0; a <= 1.0 + 1e-12; a += step) {
                Vec p = scaled(ns[0], a);
                axpy(1.0 - a, ns[1], p);
                best = std::min(best, norm(p));
            }
        } else {
            for (double a = 0.0; a <= 1.0 + 1e-12; a += step)
                for (double b = 0.0; a + b <= 1.0 + 1e-12; b += step) {
                    Vec p = scaled(ns[0], a);
                    axpy(b, ns[1], p);
                    axpy(1.0 - a - b, ns[2], p);
                    best = std::min(best, norm(p));
                }
        }
        return 1.0 / best;
    };

    const std::vector<Vec> ortho{{1.0, 0.0}, {0.0, 1.0}};
    REQUIRE(gamma_estimate(ortho) == Approx(brute(ortho)).margin(1e-6));

    const double c = std::cos(0.4), s = std::sin(0.4);
    const std::vector<Vec> three{{1.0, 0.0}, {c, s}, {std::cos(1.2), std::sin(1.2)}};
    REQUIRE(gamma_estimate(three) == Approx(brute(three)).margin(1e-5));
}

TEST_CASE("good direction on hand-checkable configurations") {
    // single active constraint: u is the normalized gradient
    std::vector<SmoothConstraint> cs{affine("g", Vec{0.0, 1.0}, 0.0)};
    ConstraintSet::Params p;
    p.alpha = 1.0;
    p.beta = 1.0;
    p.rho = 0.1;
    const ConstraintSet set(std::move(cs), 2, p);
    const auto gd = good_direction(set, 0.0, Vec{0.3, 0.0});
    REQUIRE(gd.u[0] == Approx(0.0).margin(1e-12));
    REQUIRE(gd.u[1] == Approx(1.0).margin(1e-12));
    REQUIRE(gd.nu == Approx(0.25)); // alpha^2/(4 gamma^2 p beta), gamma = p = 1
    REQUIRE(gd.min_inner >= gd.nu);

    // two orthogonal active constraints: u along the diagonal
    std::vector<SmoothConstraint> cs2{affine("gx", Vec{1.0, 0.0}, 0.0),
                                      affine("gy", Vec{0.0, 1.0}, 0.0)};
    const ConstraintSet set2(std::move(cs2), 2, p);
    const auto gd2 = good_direction(set2, 0.0, Vec{0.0, 0.0});
    REQUIRE(gd2.u[0] == Approx(1.0 / std::sqrt(2.0)).margin(1e-10));
    REQUIRE(gd2.u[1] == Approx(1.0 / std::sqrt(2.0)).margin(1e-10));
    REQUIRE(gd2.min_inner == Approx(1.0 / std::sqrt(2.0)).margin(1e-10));
    REQUIRE(gd2.active_count == 2);
    REQUIRE(gd2.min_inner >= gd2.nu);

    // two-disk contact: u pushes the disks apart along the contact axis
    const auto disks = two_disk_contact_set();
    const auto gd3 = good_direction(disks, 0.0, Vec{-1.0, 0.0, 1.0, 0.0});
    REQUIRE(gd3.active_count == 1);
    REQUIRE(gd3.u[0] == Approx(-1.0 / std::sqrt(2.0)).margin(1e-10));
    REQUIRE(gd3.u[2] == Approx(1.0 / std::sqrt(2.0)).margin(1e-10));
    REQUIRE(gd3.min_inner >= gd3.nu);
}

TEST_CASE("good direction failure modes") {
    ConstraintSet::Params p;
    p.alpha = 1.0;
    p.beta = 1.0;
    p.rho = 0.1;
    // opposite normals: a thin slab squeezes with no escape direction
    std::vector<SmoothConstraint> slab{affine("up", Vec{0.0, 1.0}, 0.0),
                                       affine("down", Vec{0.0, -1.0}, -0.05)};
    const ConstraintSet squeeze(std::move(slab), 2, p);
    REQUIRE_THROWS_AS(good_direction(squeeze, 0.0, Vec{0.0, 0.025}), AdmissibilityError);
    // no active constraint at an interior probe
    std::vector<SmoothConstraint> one{affine("up", Vec{0.0, 1.0}, 0.0)};
    const ConstraintSet half(std::move(one), 2, p);
    REQUIRE_THROWS_AS(good_direction(half, 0.0, Vec{0.0, 0.5}), ConfigError);
}

TEST_CASE("smooth constraint gradients pass the finite-difference check") {
    const auto aff = affine("g", Vec{0.7, -0.3}, 0.2, 0.5);
    REQUIRE(gradient_consistency(aff, 0.3, Vec{0.4, 1.1}) < 1e-7);

    const auto disk = disk_contact_constraint(2, 0, 1, RadiusSchedule::constant(1.0),
                                              RadiusSchedule::constant(1.0));
    REQUIRE(gradient_consistency(disk, 0.0, Vec{-1.0, 0.2, 1.0, -0.3}) < 1e-6);
}

TEST_CASE("constraint set projection reaches feasibility; linearization sits inside Q") {
    const auto set = two_disk_contact_set();
    // overlapping disks, project back to contact
    const Vec q{-0.8, 0.0, 0.8, 0.0}; // D = -0.4
    REQUIRE(set.min_value(0.0, q) == Approx(-0.4));
    const Vec proj = set.project(0.0, q);
    REQUIRE(set.feasible(0.0, proj, 1e-8));
    // each disk backs off 0.2 along the axis: |(0.2,0,-0.2,0)| = 0.2 sqrt(2)
    REQUIRE(set.distance(0.0, q) == Approx(0.2 * std::sqrt(2.0)).margin(1e-6));
    // the projection moves the pair apart symmetrically
    REQUIRE(proj[0] == Approx(-1.0).margin(1e-6));
    REQUIRE(proj[2] == Approx(1.0).margin(1e-6));

    // inclusion Q~(t,x) subset of Q(t): random feasible-side samples
    for (std::uint64_t k = 0; k < 200; ++k) {
        Vec x{rng::uniform(rng::key(31, 0, k), -1.4, -0.6), rng::uniform(rng::key(31, 1, k), -0.4, 0.4),
              rng::uniform(rng::key(31, 2, k), 0.6, 1.4), rng::uniform(rng::key(31, 3, k), -0.4, 0.4)};
        const Polyhedron lin = set.linearized_at(0.0, x);
        // sample y in the polyhedron by projecting random points onto it
        Vec cand{rng::uniform(rng::key(32, 0, k), -2.0, 2.0), rng::uniform(rng::key(32, 1, k), -2.0, 2.0),
                 rng::uniform(rng::key(32, 2, k), -2.0, 2.0), rng::uniform(rng::key(32, 3, k), -2.0, 2.0)};
        Vec y;
        try {
            y = polyhedron_project(cand, lin).point;
        } catch (const SolverError&) {
            continue;
        }
        REQUIRE(set.min_value(0.0, y) >= -1e-10);
    }
}
