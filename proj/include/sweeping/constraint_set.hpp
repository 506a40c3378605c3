#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sweeping/cones.hpp"
#include "sweeping/errors.hpp"
#include "sweeping/moving_set.hpp"
#include "sweeping/vec.hpp"

namespace sweeping {

/// One smooth constraint g(t, x) >= 0 with its gradient and the declared
/// bound on |d/dt g| (assumption A2).
struct SmoothConstraint {
    std::string name;
    std::function<double(double, std::span<const double>)> value;
    std::function<Vec(double, std::span<const double>)> gradient;
    std::function<double(double, std::span<const double>)> time_derivative; // optional
    double time_derivative_bound = 0.0;
};

/// Indices of the rho-active constraints I_rho(t, x) = {i : g_i(t,x) <= rho}.
struct ActiveSet {
    std::vector<std::size_t> indices;
    double threshold = 0.0;
};

/// Finite-difference consistency residual between a constraint's value and
/// its declared gradient at (t, x); O(eps) for a correct pair.
inline double gradient_consistency(const SmoothConstraint& c, double t, std::span<const double> x,
                                   double eps = 1e-6) {
    const Vec g = c.gradient(t, x);
    const double base = c.value(t, x);
    double worst = 0.0;
    Vec probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] += eps;
        const double fd = (c.value(t, probe) - base) / eps;
        worst = std::max(worst, std::fabs(fd - g[i]));
        probe[i] = x[i];
    }
    return worst;
}

/// Intersection of smooth sublevel complements Q(t) = {x : g_i(t, x) >= 0}
/// with the certified constants of the admissibility framework:
/// gradient bounds alpha <= |grad g_i| <= beta, Hessian bound M, activation
/// threshold rho, and the reverse-triangle constant gamma (supplied or
/// estimated pointwise).
///
/// Exact Euclidean projection onto Q(t) has no closed form; project()
/// iterates projection onto the re-linearized polyhedron Q~(t, y_k), every
/// iterate of which is feasible (Q~ is contained in Q by convexity of the
/// g_i). This converges for points inside the eta-tube; eta itself is
/// configuration. When not supplied it defaults to the non-certified
/// heuristic alpha / (2 M gamma^2), which degenerates to +inf for affine
/// constraints (M = 0, Q convex).
class ConstraintSet final : public MovingSet {
public:
    struct Params {
        double alpha = 1.0;
        double beta = 1.0;
        double hessian_bound = 0.0; // M
        double rho = 0.1;
        std::optional<double> gamma;
        std::optional<double> eta;
        double boundary_tolerance = 1e-8;
    };

    ConstraintSet(std::vector<SmoothConstraint> constraints, std::size_t dim, Params params)
        : MovingSet(params.boundary_tolerance),
          constraints_(std::move(constraints)),
          dim_(dim),
          params_(params) {
        if (constraints_.empty()) throw ConfigError("ConstraintSet: no constraints");
        if (constraints_.size() > 64) throw ConfigError("ConstraintSet: more than 64 constraints");
        if (!(params_.alpha > 0.0) || !(params_.beta >= params_.alpha))
            throw ConfigError("ConstraintSet: need 0 < alpha <= beta");
        if (!(params_.rho > 0.0)) throw ConfigError("ConstraintSet: rho must be positive");
        if (params_.hessian_bound < 0.0) throw ConfigError("ConstraintSet: M must be nonnegative");
        if (params_.gamma && !(*params_.gamma >= 1.0))
            throw ConfigError("ConstraintSet: gamma must be at least 1");
        if (params_.eta && !(*params_.eta > 0.0))
            throw ConfigError("ConstraintSet: eta must be positive");
    }

    std::size_t dim() const override { return dim_; }

    const std::vector<SmoothConstraint>& constraints() const { return constraints_; }
    double alpha() const { return params_.alpha; }
    double beta() const { return params_.beta; }
    double hessian_bound() const { return params_.hessian_bound; }
    double rho() const { return params_.rho; }
    std::optional<double> gamma() const { return params_.gamma; }

    double min_value(double t, std::span<const double> x) const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : constraints_) m = std::min(m, c.value(t, x));
        return m;
    }

    bool feasible(double t, std::span<const double> x, double slack = 0.0) const {
        return min_value(t, x) >= -slack;
    }

    double distance(double t, std::span<const double> x) const override {
        if (min_value(t, x) >= 0.0) return 0.0;
        return sweeping::distance(x, project_infeasible(t, x));
    }

    double prox_constant() const override {
        if (params_.eta) return *params_.eta;
        if (params_.hessian_bound == 0.0) return std::numeric_limits<double>::infinity();
        const double g = params_.gamma.value_or(1.0);
        return params_.alpha / (2.0 * params_.hessian_bound * g * g);
    }

    /// First-order feasible polyhedron Q~(t, x): rows
    /// g_i(t,x) + <grad g_i(t,x), y - x> >= 0, convex and contained in Q(t).
    Polyhedron linearized_at(double t, std::span<const double> x) const {
        Polyhedron poly;
        poly.rows.reserve(constraints_.size());
        for (const auto& c : constraints_) {
            Vec a = c.gradient(t, x);
            const double b = dot(a, x) - c.value(t, x);
            poly.rows.push_back({std::move(a), b});
        }
        return poly;
    }

private:
    Vec do_project(double t, std::span<const double> z) const override {
        if (min_value(t, z) >= 0.0) return Vec(z.begin(), z.end());
        return project_infeasible(t, z);
    }

    Vec project_infeasible(double t, std::span<const double> z) const {
        Vec y(z.begin(), z.end());
        const double scale = std::max(1.0, norm(z));
        for (int it = 0; it < 50; ++it) {
            const Vec next = polyhedron_project(z, linearized_at(t, y)).point;
            const double move = sweeping::distance(next, y);
            y = next;
            if (move <= 1e-12 * scale) break;
        }
        if (!feasible(t, y, boundary_tolerance()))
            throw SolverError("ConstraintSet: linearized projection failed to reach feasibility");
        return y;
    }

    std::vector<SmoothConstraint> constraints_;
    std::size_t dim_;
    Params params_;
};

inline ActiveSet active_constraints(const ConstraintSet& set, double t, std::span<const double> x,
                                    double rho) {
    if (rho < 0.0) throw ConfigError("active_constraints: rho must be nonnegative");
    for (double v : x)
        if (!std::isfinite(v)) throw ConfigError("active_constraints: non-finite point");
    ActiveSet out;
    out.threshold = rho;
    const auto& cs = set.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i].value(t, x) <= rho) out.indices.push_back(i);
    return out;
}

/// Tight reverse-triangle constant of (R_rho): the smallest gamma with
/// sum lambda_i <= gamma |sum lambda_i n_i| over nonnegative weights, equal
/// to 1 / dist(0, conv hull of the unit normals). Throws AdmissibilityError
/// when the hull contains the origin (no finite gamma exists).
inline double gamma_estimate(const std::vector<Vec>& unit_normals,
                             const SolverOptions& opts = {}) {
    if (unit_normals.empty()) throw ConfigError("gamma_estimate: no normals");
    for (const auto& n : unit_normals)
        if (std::fabs(norm(n) - 1.0) > 1e-6)
            throw ConfigError("gamma_estimate: normals must be unit vectors");
    const auto mnp = min_norm_in_hull(unit_normals, opts);
    if (mnp.distance < 1e-9)
        throw AdmissibilityError(
            "R_rho fails: the origin lies in the convex hull of the active normals");
    return 1.0 / mnp.distance;
}

struct GoodDirection {
    Vec u;                       // unit vector with <grad g_i, u> >= nu for all active i
    double nu = 0.0;             // certified lower bound alpha^2 / (4 gamma^2 p beta)
    double gamma = 0.0;          // constant used (supplied or estimated)
    std::size_t active_count = 0;
    double min_inner = 0.0;      // measured min_i <grad g_i, u>
};

/// Pointwise admissibility certificate: Moreau-decompose each active
/// gradient against the cone spanned by the negated active gradients,
/// u = sum of the polar parts normalized. p is the active-constraint count
/// at the probe, the sharp version of the same bound.
inline GoodDirection good_direction(const ConstraintSet& set, double t,
                                    std::span<const double> x, const SolverOptions& opts = {}) {
    const ActiveSet active = active_constraints(set, t, x, set.rho());
    if (active.indices.empty())
        throw ConfigError("good_direction: no active constraints at the probe point");

    std::vector<Vec> grads;
    grads.reserve(active.indices.size());
    for (std::size_t i : active.indices)
        grads.push_back(set.constraints()[i].gradient(t, x));

    // (R_rho) first: without a finite gamma the construction cannot work
    GoodDirection out;
    out.active_count = active.indices.size();
    if (set.gamma()) {
        out.gamma = *set.gamma();
    } else {
        std::vector<Vec> normals;
        normals.reserve(grads.size());
        for (const auto& g : grads) normals.push_back(unit(g));
        out.gamma = gamma_estimate(normals, opts);
    }

    GeneratedCone cone;
    cone.generators.reserve(grads.size());
    for (const auto& g : grads) cone.generators.push_back(scaled(g, -1.0));

    Vec sum_b(set.dim(), 0.0);
    for (const auto& g : grads) {
        const auto split = polar_decompose(g, cone, opts);
        axpy(1.0, split.polar_part, sum_b);
    }
    const double sn = norm(sum_b);
    if (sn < 1e-12)
        throw AdmissibilityError("good_direction: polar parts cancel; admissibility fails");
    out.u = scaled(sum_b, 1.0 / sn);

    const double p = static_cast<double>(out.active_count);
    out.nu = set.alpha() * set.alpha() /
             (4.0 * out.gamma * out.gamma * p * set.beta());

    out.min_inner = std::numeric_limits<double>::infinity();
    for (const auto& g : grads) out.min_inner = std::min(out.min_inner, dot(g, out.u));
    if (out.min_inner < out.nu)
        throw AdmissibilityError("good_direction: certificate failed, min inner product " +
                                 std::to_string(out.min_inner) + " below nu = " +
                                 std::to_string(out.nu));
    return out;
}

} // namespace sweeping
