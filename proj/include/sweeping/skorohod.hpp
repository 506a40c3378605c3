#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sweeping/errors.hpp"
#include "sweeping/moving_set.hpp"
#include "sweeping/time_grid.hpp"
#include "sweeping/vec.hpp"

namespace sweeping {

enum class DriverKind { analytic, sampled, stochastic_integral };

/// Driving term of the Skorohod problem, sampled at grid nodes with
/// piecewise-linear interpolation in between. (Classically written h; named
/// l here to avoid clashing with the step size.)
struct Driver {
    TimeGrid grid;
    std::vector<Vec> values; // one per node
    DriverKind provenance = DriverKind::analytic;

    Driver(TimeGrid g, std::vector<Vec> v, DriverKind kind = DriverKind::analytic)
        : grid(g), values(std::move(v)), provenance(kind) {
        if (values.size() != grid.node_count())
            throw ConfigError("Driver: need one sample per grid node");
        for (const auto& x : values)
            if (x.size() != values[0].size()) throw ConfigError("Driver: dimension mismatch");
    }

    static Driver from_function(const TimeGrid& g,
                                const std::function<Vec(double)>& f,
                                DriverKind kind = DriverKind::analytic) {
        std::vector<Vec> v;
        v.reserve(g.node_count());
        for (std::size_t i = 0; i < g.node_count(); ++i) v.push_back(f(g.node(i)));
        return Driver(g, std::move(v), kind);
    }

    std::size_t dim() const { return values[0].size(); }

    /// Piecewise-linear value at an arbitrary time in [0, T].
    Vec at(double t) const {
        if (t <= 0.0) return values.front();
        if (t >= grid.horizon()) return values.back();
        std::size_t n = std::min(static_cast<std::size_t>(t / grid.step()),
                                 grid.step_count() - 1);
        while (grid.node(n + 1) < t) ++n;
        while (grid.node(n) > t) --n;
        const double w = (t - grid.node(n)) / grid.step_width(n);
        Vec out = scaled(values[n], 1.0 - w);
        axpy(w, values[n + 1], out);
        return out;
    }

    /// Restriction to a coarser grid whose nodes must all be nodes of this
    /// driver's grid (within 1e-12); rejects non-nested grids.
    Driver restricted_to(const TimeGrid& coarse) const {
        std::vector<Vec> v;
        v.reserve(coarse.node_count());
        const double tol = 1e-12 * std::max(1.0, grid.horizon());
        for (std::size_t i = 0; i < coarse.node_count(); ++i) {
            const double t = coarse.node(i);
            const auto idx = static_cast<std::size_t>(std::llround(t / grid.step()));
            const std::size_t j = std::min(idx, grid.step_count());
            if (std::fabs(grid.node(j) - t) > tol)
                throw ConfigError("Driver: grids are not nested at t = " + std::to_string(t));
            v.push_back(values[j]);
        }
        return Driver(coarse, std::move(v), provenance);
    }
};

/// Discrete solution of the Skorohod problem: feasible path x, compensator
/// k = l - x (exact at nodes), its running total variation, and per-node
/// boundary-contact flags.
struct SkorohodSolution {
    TimeGrid grid;
    std::vector<Vec> x;
    std::vector<Vec> k;
    std::vector<double> tv_k;
    std::vector<char> contact;
};

/// Semi-implicit catching-up scheme
///   x_{n+1} = P_{C(t_{n+1})} [ x_n + l(t_{n+1}) - l(t_n) ].
/// Contact is flagged when the projection moved the predicted point by more
/// than the boundary tolerance. A predicted point outside the 0.9*eta tube
/// aborts with the offending node.
inline SkorohodSolution catching_up(const MovingSet& C, const Driver& l,
                                    std::span<const double> u0, const TimeGrid& grid) {
    if (!(l.grid == grid))
        throw ConfigError("catching_up: driver grid does not match the solve grid");
    if (u0.size() != C.dim() || l.dim() != C.dim())
        throw ConfigError("catching_up: dimension mismatch");
    if (C.distance(0.0, u0) > C.boundary_tolerance())
        throw ConfigError("catching_up: u0 is not in C(0)");
    if (C.distance(0.0, l.values.front()) > C.boundary_tolerance())
        throw ConfigError("catching_up: driver start l(0) is not in C(0)");

    const std::size_t steps = grid.step_count();
    SkorohodSolution sol{grid, {}, {}, {}, {}};
    sol.x.reserve(steps + 1);
    sol.k.reserve(steps + 1);
    sol.tv_k.assign(steps + 1, 0.0);
    sol.contact.assign(steps + 1, 0);

    sol.x.emplace_back(u0.begin(), u0.end());
    sol.k.push_back(sub(l.values[0], sol.x[0]));

    for (std::size_t n = 0; n < steps; ++n) {
        Vec pred = sol.x[n];
        axpy(1.0, l.values[n + 1], pred);
        axpy(-1.0, l.values[n], pred);
        Vec next;
        try {
            next = C.project(grid.node(n + 1), pred);
        } catch (const StepTooLargeError& e) {
            throw StepTooLargeError("catching_up: " + std::string(e.what()) + " (node " +
                                        std::to_string(n + 1) + ")",
                                    static_cast<std::int64_t>(n + 1));
        }
        const double moved = distance(pred, next);
        sol.contact[n + 1] = moved > C.boundary_tolerance();
        sol.x.push_back(std::move(next));
        sol.k.push_back(sub(l.values[n + 1], sol.x[n + 1]));
        sol.tv_k[n + 1] = sol.tv_k[n] + distance(sol.k[n + 1], sol.k[n]);
    }
    return sol;
}

/// Classical discrete 1-D reflection x_{n+1} = max(0, x_n + dl), the
/// independent oracle for the half-line C = [0, inf).
inline std::vector<double> halfline_reflection_oracle(const Driver& l, double u0) {
    if (l.dim() != 1) throw ConfigError("halfline_reflection_oracle: scalar drivers only");
    if (u0 < 0.0) throw ConfigError("halfline_reflection_oracle: u0 must be nonnegative");
    std::vector<double> x(l.grid.node_count());
    x[0] = u0;
    for (std::size_t n = 0; n + 1 < x.size(); ++n)
        x[n + 1] = std::max(0.0, x[n] + (l.values[n + 1][0] - l.values[n][0]));
    return x;
}

struct SupportViolation {
    std::size_t node = 0;
    std::string reason;
};

/// Discrete measure-support and normal-cone check: every nontrivial k
/// increment must occur at a contact node and point along a proximal normal
/// at the new state.
inline std::vector<SupportViolation> support_check(const SkorohodSolution& sol,
                                                   const MovingSet& C, double tol) {
    std::vector<SupportViolation> report;
    const double eta = C.prox_constant();
    const double s = std::isfinite(eta) ? 0.25 * eta : 1.0;
    for (std::size_t n = 1; n < sol.k.size(); ++n) {
        const Vec dk = sub(sol.k[n], sol.k[n - 1]);
        if (norm(dk) <= tol) continue;
        if (!sol.contact[n]) {
            report.push_back({n, "compensator increment without boundary contact"});
            continue;
        }
        if (!proximal_normal_test(C, sol.grid.node(n), sol.x[n], dk, s,
                                  std::max(tol, 10.0 * C.boundary_tolerance())))
            report.push_back({n, "increment direction is not a proximal normal"});
    }
    return report;
}

struct RefineRow {
    double h = 0.0;
    double sup_error = 0.0;
    double tv_k = 0.0;
};

/// Catching-up on a ladder of nested grids against the finest run; rows
/// ordered by decreasing h. Errors are sup over each grid's nodes against
/// the finest solution at the same times.
inline std::vector<RefineRow> refine_compare(const MovingSet& C, const Driver& l_finest,
                                             std::span<const double> u0,
                                             std::vector<double> steps) {
    if (steps.empty()) throw ConfigError("refine_compare: empty step list");
    std::sort(steps.begin(), steps.end(), std::greater<>());
    const SkorohodSolution fine = catching_up(C, l_finest, u0, l_finest.grid);
    const double T = l_finest.grid.horizon();
    const double tol = 1e-12 * std::max(1.0, T);

    std::vector<RefineRow> rows;
    for (double h : steps) {
        const TimeGrid grid(T, h);
        const Driver l = l_finest.restricted_to(grid);
        const SkorohodSolution sol = catching_up(C, l, u0, grid);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            const double t = grid.node(i);
            const auto fi = static_cast<std::size_t>(std::llround(t / l_finest.grid.step()));
            const std::size_t j = std::min(fi, l_finest.grid.step_count());
            if (std::fabs(l_finest.grid.node(j) - t) > tol)
                throw ConfigError("refine_compare: non-nested grid at h = " + std::to_string(h));
            err = std::max(err, distance(sol.x[i], fine.x[j]));
        }
        rows.push_back({h, err, sol.tv_k.back()});
    }
    return rows;
}

} // namespace sweeping
