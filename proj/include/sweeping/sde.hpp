#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sweeping/errors.hpp"
#include "sweeping/moving_set.hpp"
#include "sweeping/rng.hpp"
#include "sweeping/skorohod.hpp"
#include "sweeping/time_grid.hpp"
#include "sweeping/vec.hpp"

namespace sweeping {

/// Scalar Brownian increments on a grid, fully determined by (seed, grid,
/// refinement level). Each increment is a pure function of its key, so paths
/// reproduce bit-identically regardless of evaluation order.
struct BrownianPath {
    std::uint64_t seed = 0;
    std::uint32_t level = 0; // refinement depth; part of the variate keys
    TimeGrid grid;
    std::vector<double> increments; // one per step, ~ Normal(0, step width)

    static BrownianPath generate(std::uint64_t seed, const TimeGrid& grid) {
        BrownianPath p{seed, 0, grid, {}};
        p.increments.resize(grid.step_count());
        for (std::size_t i = 0; i < p.increments.size(); ++i)
            p.increments[i] = std::sqrt(grid.step_width(i)) * rng::normal(seed, 0, i);
        return p;
    }

    /// Brownian values at nodes (B(0) = 0).
    std::vector<double> partial_sums() const {
        std::vector<double> b(increments.size() + 1, 0.0);
        for (std::size_t i = 0; i < increments.size(); ++i) b[i + 1] = b[i] + increments[i];
        return b;
    }
};

/// Brownian-bridge refinement onto the half-step grid: the midpoint of each
/// step is drawn conditionally on the endpoints (variance h/4), keyed by
/// (seed, level+1, midpoint node index). Coarse-node partial sums are
/// preserved exactly (left + right telescopes to the original increment),
/// and repeated refinements commute because keys depend only on the level
/// and node index.
inline BrownianPath brownian_refine(const BrownianPath& path) {
    if (!path.grid.is_uniform())
        throw ConfigError("brownian_refine: grid must be uniform to halve");
    const double h = path.grid.step();
    BrownianPath fine{path.seed, path.level + 1, path.grid.refined(), {}};
    fine.increments.resize(2 * path.increments.size());
    const double half_sd = 0.5 * std::sqrt(h);
    for (std::size_t i = 0; i < path.increments.size(); ++i) {
        const double coarse = path.increments[i];
        const double z = rng::normal(path.seed, fine.level, 2 * i + 1);
        const double left = 0.5 * coarse + half_sd * z;
        fine.increments[2 * i] = left;
        fine.increments[2 * i + 1] = coarse - left;
    }
    return fine;
}

/// Drift and diffusion with their declared bound/Lipschitz constant L:
/// |f| + |sigma| <= L and both L-Lipschitz in x. The diffusion is vector
/// valued against a scalar Brownian motion.
struct FieldPair {
    std::function<Vec(double, std::span<const double>)> drift;
    std::function<Vec(double, std::span<const double>)> diffusion;
    double bound = 0.0;
};

/// Spot check of the declared field constants on sampled pairs: returns the
/// largest observed |f| + |sigma| and difference ratio. Values above
/// fields.bound falsify the declaration.
struct FieldCheck {
    double max_magnitude = 0.0;
    double max_lipschitz_ratio = 0.0;
};

inline FieldCheck check_field_bounds(const FieldPair& fields, const SamplingWindow& window,
                                     double horizon, std::size_t n, std::uint64_t seed) {
    FieldCheck out;
    for (std::uint64_t k = 0; k < n; ++k) {
        const double t = rng::uniform(rng::key(seed, 900, k), 0.0, horizon);
        const Vec x = window.sample(seed ^ 0x11c9ULL, k);
        const Vec y = window.sample(seed ^ 0x22d3ULL, k);
        const Vec fx = fields.drift(t, x);
        const Vec sx = fields.diffusion(t, x);
        out.max_magnitude = std::max(out.max_magnitude, norm(fx) + norm(sx));
        const double dxy = distance(x, y);
        if (dxy > 1e-9) {
            const double df = distance(fields.drift(t, y), fx);
            const double ds = distance(fields.diffusion(t, y), sx);
            out.max_lipschitz_ratio = std::max(out.max_lipschitz_ratio, (df + ds) / dxy);
        }
    }
    return out;
}

/// Same sampled-path contract as the deterministic solution; the driver is
/// the accumulated stochastic integral u0 + sum h f + sum sigma dB.
using SdeSolution = SkorohodSolution;

/// Projected Euler scheme of the stochastic sweeping process:
///   X_{n+1} = P_{C(t_{n+1})} [ X_n + h f(t_n, X_n) + sigma(t_n, X_n) dB_n ].
/// K is the driver-minus-state compensator; contact and step-too-large
/// behave exactly as in catching_up. Large |dB_n| can legitimately throw the
/// predicted point out of the tube; callers decide whether to discard.
inline SdeSolution euler_project(const MovingSet& C, const FieldPair& fields,
                                 std::span<const double> u0, const BrownianPath& path) {
    const TimeGrid& grid = path.grid;
    if (u0.size() != C.dim()) throw ConfigError("euler_project: dimension mismatch");
    if (C.distance(0.0, u0) > C.boundary_tolerance())
        throw ConfigError("euler_project: u0 is not in C(0)");

    const std::size_t steps = grid.step_count();
    SdeSolution sol{grid, {}, {}, {}, {}};
    sol.x.reserve(steps + 1);
    sol.k.reserve(steps + 1);
    sol.tv_k.assign(steps + 1, 0.0);
    sol.contact.assign(steps + 1, 0);

    sol.x.emplace_back(u0.begin(), u0.end());
    sol.k.emplace_back(u0.size(), 0.0);
    Vec driver(u0.begin(), u0.end());

    for (std::size_t n = 0; n < steps; ++n) {
        const double t = grid.node(n);
        const double h = grid.step_width(n);
        const Vec f = fields.drift(t, sol.x[n]);
        const Vec s = fields.diffusion(t, sol.x[n]);
        if (f.size() != C.dim() || s.size() != C.dim())
            throw ConfigError("euler_project: field dimension mismatch");

        Vec pred = sol.x[n];
        axpy(h, f, pred);
        axpy(path.increments[n], s, pred);
        axpy(h, f, driver);
        axpy(path.increments[n], s, driver);

        Vec next;
        try {
            next = C.project(grid.node(n + 1), pred);
        } catch (const StepTooLargeError& e) {
            throw StepTooLargeError("euler_project: " + std::string(e.what()) + " (node " +
                                        std::to_string(n + 1) + ")",
                                    static_cast<std::int64_t>(n + 1));
        }
        sol.contact[n + 1] = distance(pred, next) > C.boundary_tolerance();
        sol.x.push_back(std::move(next));
        sol.k.push_back(sub(driver, sol.x[n + 1]));
        sol.tv_k[n + 1] = sol.tv_k[n] + distance(sol.k[n + 1], sol.k[n]);
    }
    return sol;
}

struct ConvergenceRow {
    double h = 0.0;
    double sup_error = 0.0;
    double tv_k = 0.0;
};

/// Fixed-omega convergence study: one Brownian path at the coarsest grid,
/// bridge-refined through `levels` grids, the projected Euler scheme run at
/// every level on the same realization. Errors are sup over the finest grid
/// against the finest level, with each coarser trajectory evaluated at the
/// intermediate times by the scheme's own in-step definition
///   P_{C(t^{n+1})} [ X_n + h f(t_n, X_n) + sigma(t_n, X_n) (B_t - B_{t_n}) ].
inline std::vector<ConvergenceRow> pathwise_convergence(const MovingSet& C,
                                                        const FieldPair& fields,
                                                        std::span<const double> u0,
                                                        std::uint64_t seed, std::size_t levels,
                                                        const TimeGrid& coarse_grid) {
    if (levels < 3) throw ConfigError("pathwise_convergence: need at least 3 levels");

    std::vector<BrownianPath> paths;
    paths.reserve(levels);
    paths.push_back(BrownianPath::generate(seed, coarse_grid));
    for (std::size_t l = 1; l < levels; ++l) paths.push_back(brownian_refine(paths.back()));

    const BrownianPath& finest = paths.back();
    const std::vector<double> bsum = finest.partial_sums();
    const SdeSolution ref = euler_project(C, fields, u0, finest);

    std::vector<ConvergenceRow> rows;
    for (std::size_t l = 0; l + 1 < levels; ++l) {
        const SdeSolution sol = euler_project(C, fields, u0, paths[l]);
        const TimeGrid& g = paths[l].grid;
        const std::size_t stride = std::size_t{1} << (levels - 1 - l);
        const double h = g.step();
        double err = 0.0;
        for (std::size_t n = 0; n < g.step_count(); ++n) {
            const double t = g.node(n);
            const Vec f = fields.drift(t, sol.x[n]);
            const Vec s = fields.diffusion(t, sol.x[n]);
            const std::size_t base = n * stride;
            for (std::size_t j = 1; j <= stride; ++j) {
                Vec pred = sol.x[n];
                axpy(h, f, pred);
                axpy(bsum[base + j] - bsum[base], s, pred);
                const Vec val = C.project(g.node(n + 1), pred);
                err = std::max(err, distance(val, ref.x[base + j]));
            }
        }
        rows.push_back({h, err, sol.tv_k.back()});
    }
    return rows;
}

struct StabilityRow {
    double epsilon = 0.0;
    double estimate = 0.0;  // E[sup_t |X^eps - X|^4]^(1/4), Monte Carlo
    double std_error = 0.0; // delta-method SE of the estimate
    std::size_t n_paths = 0;
    std::size_t discarded = 0;
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    std::optional<double> slope; // log-log regression of estimate vs epsilon
    bool low_power_warning = false;
    std::vector<Vec> deterministic_limit;
};

/// Noise-to-zero stability sweep: the deterministic sweeping solution is
/// computed once (projected Euler with sigma = 0, i.e. catching-up on the
/// inline-accumulated drift driver); each epsilon runs n_paths independent
/// paths with sigma_eps = eps * sigma_base, sub-seeded by (master_seed, path
/// index). Paths that leave the tube are discarded and counted. The L4
/// estimator is the plain empirical mean of the sup-norm to the fourth.
inline StabilityReport stability_sweep(const MovingSet& C,
                                       const std::function<Vec(double, std::span<const double>)>& drift,
                                       const std::function<Vec(double, std::span<const double>)>& sigma_base,
                                       std::vector<double> eps_list, std::size_t n_paths,
                                       std::uint64_t master_seed, std::span<const double> u0,
                                       const TimeGrid& grid, double field_bound) {
    if (eps_list.empty()) throw ConfigError("stability_sweep: empty epsilon list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw ConfigError("stability_sweep: epsilons must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ConfigError("stability_sweep: epsilons must be decreasing");
    }
    if (n_paths == 0) throw ConfigError("stability_sweep: need at least one path");

    const std::size_t dim = u0.size();
    StabilityReport report;
    report.low_power_warning = n_paths < 30;

    const FieldPair zero_noise{drift,
                               [dim](double, std::span<const double>) { return Vec(dim, 0.0); },
                               field_bound};
    const BrownianPath dummy = BrownianPath::generate(rng::derive_seed(master_seed, ~0ULL), grid);
    const SdeSolution det = euler_project(C, zero_noise, u0, dummy);
    report.deterministic_limit = det.x;

    for (double eps : eps_list) {
        const FieldPair fields{
            drift,
            [&sigma_base, eps](double t, std::span<const double> x) {
                return scaled(sigma_base(t, x), eps);
            },
            field_bound};
        double sum4 = 0.0, sum8 = 0.0;
        std::size_t kept = 0, discarded = 0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            const BrownianPath path = BrownianPath::generate(rng::derive_seed(master_seed, p), grid);
            try {
                const SdeSolution sol = euler_project(C, fields, u0, path);
                double sup = 0.0;
                for (std::size_t n = 0; n < sol.x.size(); ++n)
                    sup = std::max(sup, distance(sol.x[n], det.x[n]));
                const double s4 = sup * sup * sup * sup;
                sum4 += s4;
                sum8 += s4 * s4;
                ++kept;
            } catch (const StepTooLargeError&) {
                ++discarded;
            }
        }
        if (kept == 0)
            throw SolverError("stability_sweep: all paths discarded at epsilon = " +
                              std::to_string(eps));
        const double mean4 = sum4 / static_cast<double>(kept);
        const double var4 =
            std::max(0.0, sum8 / static_cast<double>(kept) - mean4 * mean4);
        const double se4 = std::sqrt(var4 / static_cast<double>(kept));
        const double estimate = std::pow(mean4, 0.25);
        const double se = estimate > 0.0 ? se4 / (4.0 * std::pow(mean4, 0.75)) : 0.0;
        report.rows.push_back({eps, estimate, se, kept, discarded});
    }

    // least-squares slope of log(estimate) against log(epsilon)
    std::size_t m = 0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& row : report.rows) {
        if (row.estimate <= 0.0) continue;
        const double lx = std::log(row.epsilon), ly = std::log(row.estimate);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m >= 2) {
        const double denom = static_cast<double>(m) * sxx - sx * sx;
        if (denom != 0.0) report.slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    }
    return report;
}

} // namespace sweeping
