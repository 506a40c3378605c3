#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sweeping/errors.hpp"
#include "sweeping/rng.hpp"
#include "sweeping/vec.hpp"

namespace sweeping {

/// Axis-aligned sampling box for the Monte Carlo estimators. Windows are
/// always explicit configuration; nothing infers a bounding box.
struct SamplingWindow {
    Vec lo, hi;

    SamplingWindow(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size() || lo.empty())
            throw ConfigError("SamplingWindow: bounds dimension mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw ConfigError("SamplingWindow: lo must be below hi");
    }

    std::size_t dim() const { return lo.size(); }

    /// Deterministic candidate point for counter index k under the given seed.
    Vec sample(std::uint64_t seed, std::uint64_t k) const {
        Vec p(dim());
        for (std::size_t i = 0; i < dim(); ++i)
            p[i] = rng::uniform(rng::key(seed, 0x77u + i, k), lo[i], hi[i]);
        return p;
    }
};

/// A moving constraint set C(t): distance queries, single-valued projection
/// inside the prox-regularity tube, and the motion bound of the absolutely
/// continuous variation assumption d_H(C(t), C(s)) <= rate * |t - s|.
///
/// Projection is guaranteed single-valued only within distance eta of the
/// set; project() refuses (step-too-large) beyond 0.9 * eta so that a
/// scheme running too coarse a step fails loudly instead of silently
/// following one branch of a multivalued projection.
class MovingSet {
public:
    explicit MovingSet(double boundary_tolerance = 1e-8) : btol_(boundary_tolerance) {
        if (!(boundary_tolerance > 0.0))
            throw ConfigError("MovingSet: boundary tolerance must be positive");
    }
    virtual ~MovingSet() = default;

    virtual std::size_t dim() const = 0;

    /// Euclidean distance from x to C(t); 1-Lipschitz in x.
    virtual double distance(double t, std::span<const double> x) const = 0;

    /// Uniform prox-regularity constant eta; +infinity for convex sets.
    virtual double prox_constant() const = 0;

    /// Lipschitz rate of the Hausdorff motion, when declared:
    /// d_H(C(t), C(s)) <= rate * |t - s|.
    virtual std::optional<double> variation_rate() const { return std::nullopt; }

    double boundary_tolerance() const { return btol_; }

    /// Largest distance at which project() is accepted. 0.9 * eta by
    /// default; sets whose projection delegates to a better-behaved base
    /// (dilations) widen it.
    virtual double projection_radius() const { return 0.9 * prox_constant(); }

    Vec project(double t, std::span<const double> z) const {
        const double radius = projection_radius();
        if (std::isfinite(radius)) {
            const double d = distance(t, z);
            if (d >= radius)
                throw StepTooLargeError(
                    "projection request at distance " + std::to_string(d) +
                    " >= " + std::to_string(radius) + " (eta = " +
                    std::to_string(prox_constant()) + ", t = " + std::to_string(t) +
                    "); reduce the step size");
        }
        return do_project(t, z);
    }

private:
    virtual Vec do_project(double t, std::span<const double> z) const = 0;

    double btol_;
};

/// True iff w points along a proximal normal of C(t) at the boundary point x,
/// by the defining property x in P_C(x + s*w/|w|).
inline bool proximal_normal_test(const MovingSet& set, double t, std::span<const double> x,
                                 std::span<const double> w, double s, double tol = 1e-7) {
    if (set.distance(t, x) > set.boundary_tolerance())
        throw ConfigError("proximal_normal_test: x is not in the set");
    const double wn = norm(w);
    if (wn == 0.0) throw ConfigError("proximal_normal_test: zero direction");
    const double eta = set.prox_constant();
    if (!(s > 0.0) || s >= 0.5 * eta)
        throw ConfigError("proximal_normal_test: s must lie in (0, eta/2), got s = " +
                          std::to_string(s));
    Vec probe(x.begin(), x.end());
    axpy(s / wn, w, probe);
    const Vec back = set.project(t, probe);
    return distance(back, x) <= tol;
}

/// Dilation C + eps*B. Prox-regular with constant eta/8 for eps < eta/8; a
/// dilated convex set stays convex.
class DilatedSet final : public MovingSet {
public:
    DilatedSet(std::shared_ptr<const MovingSet> base, double eps)
        : MovingSet(base->boundary_tolerance()), base_(std::move(base)), eps_(eps) {
        const double eta = base_->prox_constant();
        if (!(eps > 0.0)) throw ConfigError("dilate: epsilon must be positive");
        if (std::isfinite(eta) && !(eps < eta / 8.0))
            throw ConfigError("dilate: epsilon must be below eta/8 = " + std::to_string(eta / 8.0));
    }

    std::size_t dim() const override { return base_->dim(); }

    double distance(double t, std::span<const double> x) const override {
        return std::max(base_->distance(t, x) - eps_, 0.0);
    }

    double prox_constant() const override {
        const double eta = base_->prox_constant();
        return std::isfinite(eta) ? eta / 8.0 : eta;
    }

    std::optional<double> variation_rate() const override { return base_->variation_rate(); }

    /// Projection delegates to the base set, so it stays single-valued as
    /// long as the base projection does: d_C(z) < 0.9 eta_base, i.e. the
    /// dilated distance stays below 0.9 eta_base - eps.
    double projection_radius() const override {
        return std::max(base_->projection_radius() - eps_, 0.0);
    }

    const MovingSet& base() const { return *base_; }
    double epsilon() const { return eps_; }

private:
    Vec do_project(double t, std::span<const double> z) const override {
        if (base_->distance(t, z) <= eps_) return Vec(z.begin(), z.end());
        const Vec y = base_->project(t, z);
        // one step back along the projection ray, onto the dilated boundary
        Vec dir = sub(z, y);
        const double n = norm(dir);
        Vec out = y;
        axpy(eps_ / n, dir, out);
        return out;
    }

    std::shared_ptr<const MovingSet> base_;
    double eps_;
};

inline std::shared_ptr<const MovingSet> dilate(std::shared_ptr<const MovingSet> base, double eps) {
    return std::make_shared<DilatedSet>(std::move(base), eps);
}

/// One violating triple of the hypomonotonicity inequality
/// <y - x, v> <= |v| / (2 eta) * |x - y|^2.
struct HypoViolation {
    Vec x;      // boundary point
    Vec normal; // unit proximal normal at x
    Vec y;      // feasible point
    double lhs = 0.0;
    double rhs = 0.0;
};

struct HypoReport {
    std::vector<HypoViolation> violations;
    std::size_t samples_tested = 0;
    bool passed() const { return violations.empty(); }
};

/// Samples boundary points with unit proximal normals (outside point ->
/// projection -> normal direction) and feasible points, then checks the
/// prox-regularity inequality with the *claimed* eta. An empty report means
/// no sampled triple contradicts eta-prox-regularity.
inline HypoReport hypomonotonicity_check(const MovingSet& set, double t, double eta_claimed,
                                         std::size_t n_samples, std::uint64_t seed,
                                         const SamplingWindow& window, double tol = 1e-12) {
    if (window.dim() != set.dim())
        throw ConfigError("hypomonotonicity_check: window dimension mismatch");
    if (!(eta_claimed > 0.0)) throw ConfigError("hypomonotonicity_check: eta must be positive");

    const double eta_set = set.prox_constant();
    const double tube = std::isfinite(eta_set) ? 0.85 * eta_set : 1e300;
    const std::uint64_t cap = 1000 * static_cast<std::uint64_t>(std::max<std::size_t>(n_samples, 1));

    HypoReport report;
    std::uint64_t k_out = 0, k_in = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        // outside point in the tube -> boundary point + unit proximal normal
        Vec z;
        double d = 0.0;
        bool found = false;
        while (k_out < cap) {
            z = window.sample(seed, k_out++);
            d = set.distance(t, z);
            if (d > set.boundary_tolerance() && d < tube) {
                found = true;
                break;
            }
        }
        if (!found)
            throw ConfigError("hypomonotonicity_check: no exterior points found in the window");
        const Vec x = set.project(t, z);
        const Vec v = unit(sub(z, x));

        // feasible point
        Vec y;
        found = false;
        while (k_in < cap) {
            y = window.sample(seed ^ 0x5bf03635ULL, k_in++);
            if (set.distance(t, y) <= set.boundary_tolerance()) {
                found = true;
                break;
            }
        }
        if (!found)
            throw ConfigError("hypomonotonicity_check: no feasible points found in the window");

        const double lhs = dot(sub(y, x), v);
        const double r2 = norm_sq(sub(y, x));
        const double rhs =
            (std::isfinite(eta_claimed) ? r2 / (2.0 * eta_claimed) : 0.0) + tol;
        ++report.samples_tested;
        if (lhs > rhs) report.violations.push_back({x, v, y, lhs, rhs - tol});
    }
    return report;
}

/// Sampled two-sided Hausdorff estimate between A at time tA and B at time
/// tB, restricted to the window. Rejection sampling over a deterministic
/// counter stream, so the estimate is nondecreasing in n for a fixed seed.
/// The value is a lower bound on d_H restricted to the window.
inline double hausdorff_estimate(const MovingSet& A, double tA, const MovingSet& B, double tB,
                                 const SamplingWindow& window, std::size_t n, std::uint64_t seed) {
    if (window.dim() != A.dim() || window.dim() != B.dim())
        throw ConfigError("hausdorff_estimate: window dimension mismatch");
    const std::uint64_t cap = 1000 * static_cast<std::uint64_t>(std::max<std::size_t>(n, 1));

    auto one_side = [&](const MovingSet& from, double t_from, const MovingSet& to, double t_to,
                        std::uint64_t stream) {
        double worst = 0.0;
        std::size_t accepted = 0;
        for (std::uint64_t k = 0; k < cap && accepted < n; ++k) {
            const Vec p = window.sample(seed ^ stream, k);
            if (from.distance(t_from, p) > from.boundary_tolerance()) continue;
            ++accepted;
            worst = std::max(worst, to.distance(t_to, p));
        }
        if (accepted == 0)
            throw ConfigError("hausdorff_estimate: no feasible samples found in the window");
        return worst;
    };

    return std::max(one_side(A, tA, B, tB, 0), one_side(B, tB, A, tA, 0x9221ULL));
}

} // namespace sweeping
