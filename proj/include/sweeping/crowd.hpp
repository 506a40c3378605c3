#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sweeping/cones.hpp"
#include "sweeping/constraint_set.hpp"
#include "sweeping/errors.hpp"
#include "sweeping/rng.hpp"
#include "sweeping/sde.hpp"
#include "sweeping/time_grid.hpp"
#include "sweeping/vec.hpp"

namespace sweeping {

/// Disk radius over time: constant or a time-Lipschitz schedule with a
/// declared constant and positive lower bound.
struct RadiusSchedule {
    std::function<double(double)> value;
    double lipschitz = 0.0;
    double lower_bound = 0.0;

    static RadiusSchedule constant(double r) {
        return {[r](double) { return r; }, 0.0, r};
    }
    static RadiusSchedule linear(double r0, double rate, double horizon) {
        const double lo = std::min(r0, r0 + rate * horizon);
        return {[r0, rate](double t) { return r0 + rate * t; }, std::fabs(rate), lo};
    }
};

/// Non-overlapping disks with spontaneous velocities and a scalar-Brownian
/// stochastic perturbation. Positions live in R^{2N}, disk i at slots
/// (2i, 2i+1).
struct CrowdConfig {
    std::size_t count = 0;
    Vec initial_positions; // 2N
    std::vector<RadiusSchedule> radii;
    std::function<Vec(std::span<const double>)> velocity;      // U(q) in R^{2N}
    std::function<Vec(double, std::span<const double>)> noise; // sigma(t, q) in R^{2N}
    std::optional<double> rho;  // activation threshold; defaulted from bounds below
    double speed_bound = 0.0;   // L such that per-disk |U_i| <= L
    double noise_bound = 0.0;   // sup |sigma|
    TimeGrid grid{1.0, 0.1};
    double contact_tolerance = 1e-8;
    std::vector<SmoothConstraint> walls; // extra constraints over R^{2N} (extension)

    void validate() const {
        if (count == 0) throw ConfigError("CrowdConfig: need at least one disk");
        if (initial_positions.size() != 2 * count)
            throw ConfigError("CrowdConfig: positions must have 2N entries");
        if (radii.size() != count) throw ConfigError("CrowdConfig: one radius per disk");
        for (const auto& r : radii)
            if (!(r.lower_bound > 0.0))
                throw ConfigError("CrowdConfig: radii need a positive lower bound");
        if (rho && !(*rho > 0.0)) throw ConfigError("CrowdConfig: rho must be positive");
    }

    /// Constraints that could activate within one step must enter the
    /// polyhedron: 2 * (h L + 4 sigma sqrt(h)) unless configured explicitly.
    double activation_threshold() const {
        if (rho) return *rho;
        const double h = grid.step();
        return 2.0 * (h * speed_bound + 4.0 * noise_bound * std::sqrt(h));
    }
};

/// Signed distance D_ij = |q_i - q_j| - (r_i + r_j) with its sparse gradient
/// blocks e_ij at slot i and -e_ij at slot j (norm sqrt(2)).
struct ContactConstraint {
    std::size_t i = 0, j = 0;
    double value = 0.0;
    Vec gradient; // in R^{2N}
};

inline double disk_distance(std::span<const double> q, std::size_t i, std::size_t j) {
    const double dx = q[2 * i] - q[2 * j];
    const double dy = q[2 * i + 1] - q[2 * j + 1];
    return std::sqrt(dx * dx + dy * dy);
}

/// All pairs with D_ij(q, t) <= rho, values and gradients included.
/// Coincident centers among an active pair are a hard error: the gradient is
/// undefined there and the configuration is invalid.
inline std::vector<ContactConstraint> contact_constraints(const CrowdConfig& config,
                                                          std::span<const double> q, double t,
                                                          double rho) {
    std::vector<ContactConstraint> out;
    for (std::size_t i = 0; i < config.count; ++i) {
        for (std::size_t j = i + 1; j < config.count; ++j) {
            const double sep = disk_distance(q, i, j);
            const double D = sep - (config.radii[i].value(t) + config.radii[j].value(t));
            if (D > rho) continue;
            if (sep == 0.0)
                throw SolverError("contact_constraints: coincident centers for disks " +
                                  std::to_string(i) + "," + std::to_string(j));
            ContactConstraint c;
            c.i = i;
            c.j = j;
            c.value = D;
            c.gradient.assign(2 * config.count, 0.0);
            const double ex = (q[2 * i] - q[2 * j]) / sep;
            const double ey = (q[2 * i + 1] - q[2 * j + 1]) / sep;
            c.gradient[2 * i] = ex;
            c.gradient[2 * i + 1] = ey;
            c.gradient[2 * j] = -ex;
            c.gradient[2 * j + 1] = -ey;
            out.push_back(std::move(c));
        }
    }
    return out;
}

/// One step of the linearized-projection scheme: predict with velocity and
/// noise, then project onto the polyhedron Q~(t_{n+1}, q_n) of first-order
/// contact constraints (convex and contained in the feasible set, so the
/// result cannot overlap beyond solver tolerance).
inline Vec crowd_step(const CrowdConfig& config, std::span<const double> q, double t_now,
                      double t_next, double dB) {
    const double h = t_next - t_now;
    const double rho = config.activation_threshold();

    Vec pred(q.begin(), q.end());
    axpy(h, config.velocity(q), pred);
    if (dB != 0.0) axpy(dB, config.noise(t_now, q), pred);

    Polyhedron poly;
    for (auto& c : contact_constraints(config, q, t_next, rho)) {
        const double b = dot(c.gradient, q) - c.value;
        poly.rows.push_back({std::move(c.gradient), b});
    }
    for (const auto& w : config.walls) {
        if (w.value(t_next, q) > rho) continue;
        Vec a = w.gradient(t_next, q);
        const double b = dot(a, q) - w.value(t_next, q);
        poly.rows.push_back({std::move(a), b});
    }
    if (poly.rows.empty()) return pred;
    if (poly.rows.size() > 64)
        throw ConfigError("crowd_step: more than 64 active constraints");
    return polyhedron_project(pred, poly).point;
}

struct CrowdTrajectory {
    TimeGrid grid{1.0, 0.1};
    std::vector<Vec> positions;           // per node
    std::vector<double> min_distance;     // per node, min over pairs of D_ij
    std::vector<std::size_t> active_pairs; // per node, pairs with D <= rho
    std::vector<double> cumulative_k;     // accumulated projection displacement
    std::optional<std::string> abort_reason;
    std::optional<ExitCode> abort_code;
    std::size_t abort_node = 0;

    bool completed() const { return !abort_reason.has_value(); }
};

namespace detail {

inline double crowd_min_distance(const CrowdConfig& config, std::span<const double> q, double t) {
    if (config.count < 2) return std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < config.count; ++i)
        for (std::size_t j = i + 1; j < config.count; ++j)
            m = std::min(m, disk_distance(q, i, j) -
                                (config.radii[i].value(t) + config.radii[j].value(t)));
    return m;
}

} // namespace detail

/// Full simulation of dq + N(Q, q) about U(q) dt + sigma(t, q) dB_t over the
/// configured grid. On a failure the partial trajectory is returned with the
/// abort record instead of propagating.
inline CrowdTrajectory simulate(const CrowdConfig& config, std::uint64_t seed) {
    config.validate();
    const TimeGrid& grid = config.grid;
    const double rho = config.activation_threshold();

    CrowdTrajectory traj;
    traj.grid = grid;
    traj.positions.push_back(config.initial_positions);
    traj.min_distance.push_back(detail::crowd_min_distance(config, config.initial_positions, 0.0));
    if (config.count >= 2 && traj.min_distance[0] < -config.contact_tolerance) {
        traj.abort_reason = "initial configuration overlaps";
        traj.abort_code = ExitCode::config;
        return traj;
    }
    std::size_t active0 = 0;
    if (config.count >= 2)
        active0 = contact_constraints(config, config.initial_positions, 0.0, rho).size();
    traj.active_pairs.push_back(active0);
    traj.cumulative_k.push_back(0.0);

    const BrownianPath path = BrownianPath::generate(seed, grid);
    for (std::size_t n = 0; n < grid.step_count(); ++n) {
        const double t_now = grid.node(n);
        const double t_next = grid.node(n + 1);
        try {
            const Vec& q = traj.positions.back();
            Vec pred(q.begin(), q.end());
            axpy(t_next - t_now, config.velocity(q), pred);
            axpy(path.increments[n], config.noise(t_now, q), pred);
            Vec next = crowd_step(config, q, t_now, t_next, path.increments[n]);
            traj.cumulative_k.push_back(traj.cumulative_k.back() + distance(next, pred));
            traj.min_distance.push_back(detail::crowd_min_distance(config, next, t_next));
            traj.active_pairs.push_back(
                config.count >= 2 ? contact_constraints(config, next, t_next, rho).size() : 0);
            traj.positions.push_back(std::move(next));
        } catch (const Error& e) {
            traj.abort_reason = e.what();
            traj.abort_code = e.exit_code();
            traj.abort_node = n + 1;
            break;
        }
    }
    return traj;
}

/// Half-plane wall for one disk: g = <n, q_i> - offset(t) - r_i(t) >= 0 with
/// a unit wall normal. Walls funnel through the same polyhedron as contacts.
inline SmoothConstraint wall_constraint(std::size_t count, std::size_t disk, Vec normal2d,
                                        double offset, double offset_rate, RadiusSchedule radius) {
    if (normal2d.size() != 2) throw ConfigError("wall_constraint: wall normal must be 2-D");
    const double n = norm(normal2d);
    if (n == 0.0) throw ConfigError("wall_constraint: zero wall normal");
    normal2d[0] /= n;
    normal2d[1] /= n;
    SmoothConstraint c;
    c.name = "wall_disk_" + std::to_string(disk);
    c.value = [disk, normal2d, offset, offset_rate, radius](double t, std::span<const double> q) {
        return normal2d[0] * q[2 * disk] + normal2d[1] * q[2 * disk + 1] -
               (offset + offset_rate * t) - radius.value(t);
    };
    c.gradient = [count, disk, normal2d](double, std::span<const double>) {
        Vec g(2 * count, 0.0);
        g[2 * disk] = normal2d[0];
        g[2 * disk + 1] = normal2d[1];
        return g;
    };
    c.time_derivative_bound = std::fabs(offset_rate) + radius.lipschitz;
    return c;
}

/// Disk-contact constraint over R^{2N} in SmoothConstraint form, for
/// constraint-set probes and geometry checks on crowd configurations.
inline SmoothConstraint disk_contact_constraint(std::size_t count, std::size_t i, std::size_t j,
                                                RadiusSchedule ri, RadiusSchedule rj) {
    SmoothConstraint c;
    c.name = "disk_contact_" + std::to_string(i) + "_" + std::to_string(j);
    c.value = [i, j, ri, rj](double t, std::span<const double> q) {
        return disk_distance(q, i, j) - (ri.value(t) + rj.value(t));
    };
    c.gradient = [count, i, j](double, std::span<const double> q) {
        const double sep = disk_distance(q, i, j);
        if (sep == 0.0)
            throw SolverError("disk_contact_constraint: coincident centers");
        Vec g(2 * count, 0.0);
        const double ex = (q[2 * i] - q[2 * j]) / sep;
        const double ey = (q[2 * i + 1] - q[2 * j + 1]) / sep;
        g[2 * i] = ex;
        g[2 * i + 1] = ey;
        g[2 * j] = -ex;
        g[2 * j + 1] = -ey;
        return g;
    };
    c.time_derivative_bound = ri.lipschitz + rj.lipschitz;
    return c;
}

} // namespace sweeping
