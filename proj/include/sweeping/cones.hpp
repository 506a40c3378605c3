#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sweeping/errors.hpp"
#include "sweeping/linalg.hpp"
#include "sweeping/vec.hpp"

namespace sweeping {

/// Finitely generated convex cone {sum lambda_i g_i : lambda_i >= 0}.
/// An empty generator list denotes the trivial cone {0}.
struct GeneratedCone {
    std::vector<Vec> generators;
};

/// Intersection of half-spaces <a_i, y> >= b_i.
struct Polyhedron {
    struct Row {
        Vec a;
        double b;
    };
    std::vector<Row> rows;
};

/// Iteration count and final KKT residual, returned by every solver so tests
/// and the CLI can log certificates instead of trusting convergence flags.
struct SolveDiagnostics {
    std::size_t iterations = 0;
    double kkt_residual = 0.0;
};

struct SolverOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 10000;
    double relaxation = 1.0; // dual ascent relaxation factor, in (0, 2)
};

struct ConeProjection {
    Vec point;
    std::vector<double> coefficients;
    SolveDiagnostics diag;
};

struct PolarDecomposition {
    Vec cone_part;  // projection onto the cone
    Vec polar_part; // z - cone_part, lies in the polar cone
    SolveDiagnostics diag;
};

struct MinNormPoint {
    Vec point;
    double distance = 0.0;
    std::vector<double> weights;
    SolveDiagnostics diag;
};

struct PolyhedronProjection {
    Vec point;
    std::vector<double> multipliers;
    SolveDiagnostics diag;
};

namespace detail {

inline void check_generators(const GeneratedCone& cone, std::size_t dim) {
    if (cone.generators.size() > 64)
        throw ConfigError("cone projection: more than 64 generators");
    for (const auto& g : cone.generators) {
        if (g.size() != dim) throw ConfigError("cone projection: generator dimension mismatch");
        if (norm(g) == 0.0) throw ConfigError("cone projection: zero generator");
    }
}

// Least squares min |G_P mu - z| on the passive set via normal equations.
inline std::optional<std::vector<double>> passive_ls(const std::vector<Vec>& gens,
                                                     const std::vector<std::size_t>& passive,
                                                     std::span<const double> z) {
    const std::size_t m = passive.size();
    std::vector<double> gram(m * m), rhs(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c)
            gram[r * m + c] = dot(gens[passive[r]], gens[passive[c]]);
        rhs[r] = dot(gens[passive[r]], z);
    }
    return gauss_solve(std::move(gram), std::move(rhs));
}

} // namespace detail

/// Euclidean projection of z onto a finitely generated cone, expressed as
/// nonnegative generator coefficients. Lawson-Hanson active-set NNLS on
/// min |G lambda - z|, lambda >= 0. The returned point satisfies the KKT
/// certificate <z - p, g_i> <= tol for all i and <z - p, p> = 0 within tol.
inline ConeProjection nnls_cone_project(std::span<const double> z, const GeneratedCone& cone,
                                        const SolverOptions& opts = {}) {
    detail::check_generators(cone, z.size());
    const auto& gens = cone.generators;
    const std::size_t m = gens.size();

    ConeProjection out;
    out.coefficients.assign(m, 0.0);
    out.point.assign(z.size(), 0.0);
    if (m == 0) return out;

    const double scale = std::max(1.0, norm(z));
    const double tol = opts.tolerance * scale;

    std::vector<std::size_t> passive;
    std::vector<char> in_passive(m, 0), banned(m, 0);
    Vec residual(z.begin(), z.end());
    std::size_t iters = 0;

    auto rebuild = [&](const std::vector<double>& lambda) {
        std::fill(out.point.begin(), out.point.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (lambda[i] != 0.0) axpy(lambda[i], gens[i], out.point);
        residual = sub(z, out.point);
    };

    while (iters++ < opts.max_iterations) {
        // dual feasibility: w_i = <g_i, z - G lambda>
        double w_best = -1.0;
        std::size_t enter = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (in_passive[i] || banned[i]) continue;
            const double w = dot(gens[i], residual);
            if (w > w_best) {
                w_best = w;
                enter = i;
            }
        }
        if (enter == m || w_best <= tol) break; // KKT reached

        passive.push_back(enter);
        in_passive[enter] = 1;

        // inner loop: unconstrained LS on the passive set, stepping back to
        // the feasible boundary whenever a coefficient would turn negative
        bool entered_ok = true;
        while (true) {
            auto mu = detail::passive_ls(gens, passive, z);
            if (!mu) {
                // numerically dependent column: discard the newest entry
                in_passive[passive.back()] = 0;
                banned[passive.back()] = 1;
                passive.pop_back();
                entered_ok = false;
                break;
            }
            bool all_pos = true;
            for (double v : *mu)
                if (v <= 0.0) all_pos = false;
            if (all_pos) {
                for (std::size_t k = 0; k < passive.size(); ++k)
                    out.coefficients[passive[k]] = (*mu)[k];
                break;
            }
            double alpha = 1.0;
            for (std::size_t k = 0; k < passive.size(); ++k) {
                const double lk = out.coefficients[passive[k]];
                const double mk = (*mu)[k];
                if (mk <= 0.0 && lk - mk > 0.0) alpha = std::min(alpha, lk / (lk - mk));
            }
            std::vector<std::size_t> keep;
            for (std::size_t k = 0; k < passive.size(); ++k) {
                const std::size_t idx = passive[k];
                double v = out.coefficients[idx] + alpha * ((*mu)[k] - out.coefficients[idx]);
                if (v <= opts.tolerance) {
                    out.coefficients[idx] = 0.0;
                    in_passive[idx] = 0;
                } else {
                    out.coefficients[idx] = v;
                    keep.push_back(idx);
                }
            }
            passive = std::move(keep);
            if (passive.empty()) break;
        }
        rebuild(out.coefficients);
        if (!entered_ok) continue;
    }

    // certificate
    double kkt = std::fabs(dot(residual, out.point));
    for (const auto& g : gens) kkt = std::max(kkt, dot(g, residual));
    out.diag = {iters, kkt};
    if (kkt > 10.0 * tol)
        throw SolverError("nnls_cone_project: KKT residual " + std::to_string(kkt) +
                          " above tolerance after " + std::to_string(iters) + " iterations");
    return out;
}

/// Moreau decomposition z = a + b with a in the cone, b in its polar,
/// <a, b> = 0. The cone part is the NNLS projection; b = z - a.
inline PolarDecomposition polar_decompose(std::span<const double> z, const GeneratedCone& cone,
                                          const SolverOptions& opts = {}) {
    auto proj = nnls_cone_project(z, cone, opts);
    PolarDecomposition out;
    out.polar_part = sub(z, proj.point);
    out.cone_part = std::move(proj.point);
    out.diag = proj.diag;
    return out;
}

/// Minimum-norm point of the convex hull of the given points (Wolfe's
/// algorithm). Returns the point, its norm, and hull weights with the
/// optimality certificate <p*, x_i - p*> >= -tol for every input point.
inline MinNormPoint min_norm_in_hull(const std::vector<Vec>& points,
                                     const SolverOptions& opts = {}) {
    if (points.empty()) throw ConfigError("min_norm_in_hull: no points");
    if (points.size() > 64) throw ConfigError("min_norm_in_hull: more than 64 points");
    const std::size_t m = points.size();
    const std::size_t dim = points[0].size();
    for (const auto& p : points)
        if (p.size() != dim) throw ConfigError("min_norm_in_hull: dimension mismatch");

    double scale = 1.0;
    for (const auto& p : points) scale = std::max(scale, norm(p));
    const double tol = opts.tolerance * scale;

    // affine minimum-norm weights over a corral: KKT system
    // [2 Gram, 1; 1^T, 0] [mu; nu] = [0; 1]
    auto affine_weights =
        [&](const std::vector<std::size_t>& corral) -> std::optional<std::vector<double>> {
        const std::size_t k = corral.size();
        std::vector<double> a((k + 1) * (k + 1), 0.0), b(k + 1, 0.0);
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c)
                a[r * (k + 1) + c] = 2.0 * dot(points[corral[r]], points[corral[c]]);
            a[r * (k + 1) + k] = 1.0;
            a[k * (k + 1) + r] = 1.0;
        }
        b[k] = 1.0;
        auto sol = detail::gauss_solve(std::move(a), std::move(b));
        if (!sol) return std::nullopt;
        sol->resize(k);
        return sol;
    };

    std::size_t start = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (norm_sq(points[i]) < norm_sq(points[start])) start = i;

    std::vector<std::size_t> corral{start};
    std::vector<double> lambda{1.0};
    Vec p = points[start];
    std::size_t iters = 0;

    auto rebuild = [&] {
        p.assign(dim, 0.0);
        for (std::size_t k = 0; k < corral.size(); ++k) axpy(lambda[k], points[corral[k]], p);
    };

    while (iters++ < opts.max_iterations) {
        std::size_t j = 0;
        double best = dot(p, points[0]);
        for (std::size_t i = 1; i < m; ++i) {
            const double v = dot(p, points[i]);
            if (v < best) {
                best = v;
                j = i;
            }
        }
        if (best >= norm_sq(p) - tol) break; // optimal
        if (std::find(corral.begin(), corral.end(), j) != corral.end()) break; // stall
        corral.push_back(j);
        lambda.push_back(0.0);

        while (true) {
            auto mu = affine_weights(corral);
            if (!mu) {
                corral.pop_back();
                lambda.pop_back();
                break;
            }
            bool interior = true;
            for (double v : *mu)
                if (v < 1e-12) interior = false;
            if (interior) {
                lambda = *mu;
                break;
            }
            double theta = 1.0;
            for (std::size_t k = 0; k < corral.size(); ++k)
                if ((*mu)[k] < 1e-12 && lambda[k] - (*mu)[k] > 0.0)
                    theta = std::min(theta, lambda[k] / (lambda[k] - (*mu)[k]));
            std::vector<std::size_t> keep_c;
            std::vector<double> keep_l;
            for (std::size_t k = 0; k < corral.size(); ++k) {
                double v = lambda[k] + theta * ((*mu)[k] - lambda[k]);
                if (v > 1e-12) {
                    keep_c.push_back(corral[k]);
                    keep_l.push_back(v);
                }
            }
            corral = std::move(keep_c);
            lambda = std::move(keep_l);
            if (corral.empty()) { // can only happen by roundoff; restart from j
                corral = {j};
                lambda = {1.0};
                break;
            }
        }
        rebuild();
    }

    // certificate and expanded weights
    double kkt = 0.0;
    const double psq = norm_sq(p);
    for (const auto& x : points) kkt = std::max(kkt, psq - dot(p, x));
    if (kkt > 10.0 * tol)
        throw SolverError("min_norm_in_hull: optimality residual " + std::to_string(kkt) +
                          " above tolerance after " + std::to_string(iters) + " iterations");

    MinNormPoint out;
    out.weights.assign(m, 0.0);
    for (std::size_t k = 0; k < corral.size(); ++k) out.weights[corral[k]] = lambda[k];
    out.point = std::move(p);
    out.distance = norm(out.point);
    out.diag = {iters, kkt};
    return out;
}

/// Euclidean projection onto a polyhedron {<a_i, y> >= b_i} by dual
/// coordinate ascent (Hildreth / Uzawa) with optional over-relaxation.
/// Returns the projection with its KKT multipliers: y - z = sum mu_i a_i,
/// mu >= 0, complementary slackness within tolerance.
inline PolyhedronProjection polyhedron_project(std::span<const double> z, const Polyhedron& poly,
                                               const SolverOptions& opts = {}) {
    if (poly.rows.empty()) throw ConfigError("polyhedron_project: empty row list");
    for (const auto& row : poly.rows) {
        if (row.a.size() != z.size())
            throw ConfigError("polyhedron_project: row dimension mismatch");
        if (norm(row.a) == 0.0) throw ConfigError("polyhedron_project: zero row normal");
    }
    const std::size_t m = poly.rows.size();
    std::vector<double> inv_norm_sq(m), row_norm(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double nsq = norm_sq(poly.rows[i].a);
        inv_norm_sq[i] = 1.0 / nsq;
        row_norm[i] = std::sqrt(nsq);
    }

    double scale = std::max(1.0, norm(z));
    for (const auto& row : poly.rows) scale = std::max(scale, std::fabs(row.b));
    const double tol = opts.tolerance;
    const double omega = opts.relaxation;

    PolyhedronProjection out;
    out.point.assign(z.begin(), z.end());
    out.multipliers.assign(m, 0.0);
    Vec& y = out.point;
    std::vector<double>& mu = out.multipliers;

    std::size_t sweep = 0;
    for (; sweep < opts.max_iterations; ++sweep) {
        double max_change = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = poly.rows[i].b - dot(poly.rows[i].a, y);
            const double target = std::max(0.0, mu[i] + omega * r * inv_norm_sq[i]);
            const double delta = target - mu[i];
            if (delta != 0.0) {
                axpy(delta, poly.rows[i].a, y);
                mu[i] = target;
                // primal movement of this update
                max_change = std::max(max_change, std::fabs(delta) * row_norm[i]);
            }
        }
        double max_mu = 0.0, max_viol = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            max_mu = std::max(max_mu, mu[i]);
            max_viol = std::max(max_viol, poly.rows[i].b - dot(poly.rows[i].a, y));
        }
        if (max_mu > 1e14 * scale)
            throw SolverError("polyhedron_project: dual divergence, polyhedron infeasible");
        if (max_viol <= tol && max_change <= 1e-14 * scale) break;
    }

    double max_viol = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double slack = dot(poly.rows[i].a, y) - poly.rows[i].b;
        max_viol = std::max(max_viol, -slack);
        comp = std::max(comp, std::fabs(mu[i] * slack));
    }
    out.diag = {sweep, std::max(max_viol, comp)};
    if (sweep >= opts.max_iterations)
        throw SolverError("polyhedron_project: iteration cap reached, violation " +
                          std::to_string(max_viol) + ", complementarity " + std::to_string(comp));
    return out;
}

} // namespace sweeping
