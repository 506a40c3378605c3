#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sweeping/errors.hpp"
#include "sweeping/moving_set.hpp"
#include "sweeping/vec.hpp"

namespace sweeping {

/// Closed-form projection onto the half-space {y : <a, y> >= b}.
inline Vec project_halfspace(std::span<const double> a, double b, std::span<const double> z) {
    const double nsq = norm_sq(a);
    if (nsq == 0.0) throw ConfigError("project_halfspace: zero normal vector");
    const double g = dot(a, z);
    Vec out(z.begin(), z.end());
    if (g >= b) return out;
    axpy((b - g) / nsq, a, out);
    return out;
}

/// Closed-form projection onto the exterior {y : |y - center| >= radius}.
/// The singular point z == center resolves along the first coordinate axis.
inline Vec project_ball_exterior(std::span<const double> center, double radius,
                                 std::span<const double> z) {
    if (!(radius > 0.0)) throw ConfigError("project_ball_exterior: radius must be positive");
    Vec d = sub(z, center);
    const double n = norm(d);
    if (n >= radius) return Vec(z.begin(), z.end());
    Vec out(center.begin(), center.end());
    if (n == 0.0) {
        out[0] += radius; // documented tie-break
        return out;
    }
    axpy(radius / n, d, out);
    return out;
}

/// Moving half-space {x : <a, x> >= b0 + b1 * t}. Convex, eta = +inf.
class Halfspace final : public MovingSet {
public:
    Halfspace(Vec normal, double offset, double offset_rate = 0.0,
              double boundary_tolerance = 1e-8)
        : MovingSet(boundary_tolerance),
          normal_(std::move(normal)),
          offset_(offset),
          rate_(offset_rate),
          norm_(norm(normal_)) {
        if (norm_ == 0.0) throw ConfigError("Halfspace: zero normal vector");
    }

    std::size_t dim() const override { return normal_.size(); }

    double distance(double t, std::span<const double> x) const override {
        return std::max(0.0, (offset_at(t) - dot(normal_, x)) / norm_);
    }

    double prox_constant() const override { return std::numeric_limits<double>::infinity(); }

    std::optional<double> variation_rate() const override {
        return rate_ == 0.0 ? std::optional<double>{} : std::fabs(rate_) / norm_;
    }

    double offset_at(double t) const { return offset_ + rate_ * t; }

private:
    Vec do_project(double t, std::span<const double> z) const override {
        return project_halfspace(normal_, offset_at(t), z);
    }

    Vec normal_;
    double offset_, rate_, norm_;
};

/// Moving/shrinking ball exterior {x : |x - c(t)| >= r(t)} with affine
/// center and radius motion. r-prox-regular; a moving instance needs an
/// explicit eta (the worst-case radius over the horizon).
class BallExterior final : public MovingSet {
public:
    BallExterior(Vec center, double radius, Vec center_velocity = {}, double radius_rate = 0.0,
                 std::optional<double> eta = std::nullopt, double boundary_tolerance = 1e-8)
        : MovingSet(boundary_tolerance),
          center_(std::move(center)),
          radius_(radius),
          velocity_(std::move(center_velocity)),
          radius_rate_(radius_rate) {
        if (!(radius > 0.0)) throw ConfigError("BallExterior: radius must be positive");
        if (velocity_.empty()) velocity_.assign(center_.size(), 0.0);
        if (velocity_.size() != center_.size())
            throw ConfigError("BallExterior: velocity dimension mismatch");
        const bool moving = radius_rate_ != 0.0 || norm(velocity_) != 0.0;
        if (eta) {
            eta_ = *eta;
            if (!(eta_ > 0.0)) throw ConfigError("BallExterior: eta must be positive");
        } else if (moving) {
            throw ConfigError("BallExterior: a moving instance requires an explicit eta");
        } else {
            eta_ = radius_;
        }
    }

    std::size_t dim() const override { return center_.size(); }

    double distance(double t, std::span<const double> x) const override {
        return std::max(0.0, radius_at(t) - sweeping::distance(center_at(t), x));
    }

    double prox_constant() const override { return eta_; }

    std::optional<double> variation_rate() const override {
        const double r = norm(velocity_) + std::fabs(radius_rate_);
        return r == 0.0 ? std::optional<double>{} : r;
    }

    Vec center_at(double t) const {
        Vec c = center_;
        axpy(t, velocity_, c);
        return c;
    }
    double radius_at(double t) const { return radius_ + radius_rate_ * t; }

private:
    Vec do_project(double t, std::span<const double> z) const override {
        return project_ball_exterior(center_at(t), radius_at(t), z);
    }

    Vec center_;
    double radius_;
    Vec velocity_;
    double radius_rate_;
    double eta_ = 0.0;
};

/// Complement of a collection of strictly separated open balls:
/// {x : |x - c_i| >= r_i for all i}. Separation keeps the distance formula
/// max_i (r_i - |x - c_i|)+ exact and single-ball radial projection valid.
class BallExteriorUnion final : public MovingSet {
public:
    struct Ball {
        Vec center;
        double radius;
    };

    explicit BallExteriorUnion(std::vector<Ball> balls, std::optional<double> eta = std::nullopt,
                               double boundary_tolerance = 1e-8)
        : MovingSet(boundary_tolerance), balls_(std::move(balls)) {
        if (balls_.empty()) throw ConfigError("BallExteriorUnion: no balls");
        double min_r = std::numeric_limits<double>::infinity();
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < balls_.size(); ++i) {
            if (!(balls_[i].radius > 0.0))
                throw ConfigError("BallExteriorUnion: radii must be positive");
            if (balls_[i].center.size() != balls_[0].center.size())
                throw ConfigError("BallExteriorUnion: center dimension mismatch");
            min_r = std::min(min_r, balls_[i].radius);
            for (std::size_t j = 0; j < i; ++j) {
                const double gap = sweeping::distance(balls_[i].center, balls_[j].center) -
                                   balls_[i].radius - balls_[j].radius;
                if (!(gap > 0.0))
                    throw ConfigError("BallExteriorUnion: balls must be strictly separated");
                min_gap = std::min(min_gap, gap);
            }
        }
        eta_ = eta ? *eta : std::min(min_r, balls_.size() > 1 ? min_gap / 2.0 : min_r);
        if (!(eta_ > 0.0)) throw ConfigError("BallExteriorUnion: eta must be positive");
    }

    std::size_t dim() const override { return balls_[0].center.size(); }

    double distance(double, std::span<const double> x) const override {
        double d = 0.0;
        for (const auto& b : balls_)
            d = std::max(d, b.radius - sweeping::distance(b.center, x));
        return d;
    }

    double prox_constant() const override { return eta_; }

private:
    Vec do_project(double t, std::span<const double> z) const override {
        Vec y(z.begin(), z.end());
        for (int pass = 0; pass < 100; ++pass) {
            double worst = 0.0;
            const Ball* violated = nullptr;
            for (const auto& b : balls_) {
                const double deficit = b.radius - sweeping::distance(b.center, y);
                if (deficit > worst) {
                    worst = deficit;
                    violated = &b;
                }
            }
            if (!violated || worst <= 0.0) return y;
            y = project_ball_exterior(violated->center, violated->radius, y);
        }
        if (distance(t, y) > boundary_tolerance())
            throw SolverError("BallExteriorUnion: cyclic projection failed to converge");
        return y;
    }

    std::vector<Ball> balls_;
    double eta_ = 0.0;
};

} // namespace sweeping
