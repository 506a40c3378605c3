#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sweeping/constraint_set.hpp"
#include "sweeping/crowd.hpp"
#include "sweeping/errors.hpp"
#include "sweeping/moving_set.hpp"
#include "sweeping/sde.hpp"
#include "sweeping/sets.hpp"
#include "sweeping/skorohod.hpp"
#include "sweeping/time_grid.hpp"

namespace sweeping {

using Json = nlohmann::json;

namespace cfg {

/// Unknown keys are configuration errors, not warnings: a typo must not
/// silently fall back to a default.
inline void check_keys(const Json& obj, const std::string& where,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key \"" + key + "\"");
}

inline const Json& require(const Json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    return obj.at(key);
}

inline double number(const Json& obj, const std::string& where, const std::string& key) {
    const Json& v = require(obj, where, key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline double number_or(const Json& obj, const std::string& where, const std::string& key,
                        double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

inline std::optional<double> opt_number(const Json& obj, const std::string& where,
                                        const std::string& key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj.at(key).get<double>();
}

inline std::string text(const Json& obj, const std::string& where, const std::string& key) {
    const Json& v = require(obj, where, key);
    if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline Vec vector(const Json& obj, const std::string& where, const std::string& key) {
    const Json& v = require(obj, where, key);
    if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + ": expected an array");
    Vec out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(where + "." + key + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

} // namespace cfg

inline TimeGrid parse_grid(const Json& j) {
    cfg::check_keys(j, "grid", {"horizon", "step"});
    return TimeGrid(cfg::number(j, "grid", "horizon"), cfg::number(j, "grid", "step"));
}

inline RadiusSchedule parse_radius(const Json& j, const std::string& where, double horizon) {
    if (j.is_number()) return RadiusSchedule::constant(j.get<double>());
    cfg::check_keys(j, where, {"initial", "rate"});
    return RadiusSchedule::linear(cfg::number(j, where, "initial"),
                                  cfg::number_or(j, where, "rate", 0.0), horizon);
}

inline SmoothConstraint parse_constraint(const Json& j, double horizon) {
    const std::string type = cfg::text(j, "constraint", "type");
    if (type == "affine") {
        cfg::check_keys(j, "constraint", {"type", "normal", "offset", "offset_rate"});
        const Vec normal = cfg::vector(j, "constraint", "normal");
        const double b = cfg::number(j, "constraint", "offset");
        const double rate = cfg::number_or(j, "constraint", "offset_rate", 0.0);
        SmoothConstraint c;
        c.name = "affine";
        c.value = [normal, b, rate](double t, std::span<const double> x) {
            return dot(normal, x) - b - rate * t;
        };
        c.gradient = [normal](double, std::span<const double>) { return normal; };
        c.time_derivative_bound = std::fabs(rate);
        return c;
    }
    if (type == "disk_contact") {
        cfg::check_keys(j, "constraint", {"type", "disks", "i", "j", "radius_i", "radius_j"});
        const auto count = static_cast<std::size_t>(cfg::number(j, "constraint", "disks"));
        const auto i = static_cast<std::size_t>(cfg::number(j, "constraint", "i"));
        const auto jj = static_cast<std::size_t>(cfg::number(j, "constraint", "j"));
        return disk_contact_constraint(
            count, i, jj, parse_radius(cfg::require(j, "constraint", "radius_i"), "radius_i", horizon),
            parse_radius(cfg::require(j, "constraint", "radius_j"), "radius_j", horizon));
    }
    if (type == "wall_distance") {
        cfg::check_keys(j, "constraint",
                        {"type", "disks", "disk", "normal", "offset", "offset_rate", "radius"});
        const auto count = static_cast<std::size_t>(cfg::number(j, "constraint", "disks"));
        const auto disk = static_cast<std::size_t>(cfg::number(j, "constraint", "disk"));
        return wall_constraint(count, disk, cfg::vector(j, "constraint", "normal"),
                               cfg::number(j, "constraint", "offset"),
                               cfg::number_or(j, "constraint", "offset_rate", 0.0),
                               parse_radius(cfg::require(j, "constraint", "radius"), "radius",
                                            horizon));
    }
    throw ConfigError("constraint: unknown type \"" + type + "\"");
}

/// Builds a catalogue set. The horizon feeds worst-case prox constants of
/// moving sets.
inline std::shared_ptr<const MovingSet> parse_set(const Json& j, double horizon) {
    const std::string kind = cfg::text(j, "set", "kind");
    if (kind == "halfspace") {
        cfg::check_keys(j, "set", {"kind", "normal", "offset", "offset_rate", "boundary_tolerance"});
        return std::make_shared<Halfspace>(cfg::vector(j, "set", "normal"),
                                           cfg::number(j, "set", "offset"),
                                           cfg::number_or(j, "set", "offset_rate", 0.0),
                                           cfg::number_or(j, "set", "boundary_tolerance", 1e-8));
    }
    if (kind == "ball_exterior") {
        cfg::check_keys(j, "set",
                        {"kind", "center", "radius", "center_velocity", "radius_rate", "eta",
                         "boundary_tolerance"});
        const Vec center = cfg::vector(j, "set", "center");
        const double r0 = cfg::number(j, "set", "radius");
        Vec vel(center.size(), 0.0);
        if (j.contains("center_velocity")) vel = cfg::vector(j, "set", "center_velocity");
        const double rate = cfg::number_or(j, "set", "radius_rate", 0.0);
        std::optional<double> eta = cfg::opt_number(j, "set", "eta");
        if (!eta && (rate != 0.0 || norm(vel) != 0.0)) {
            const double r_end = r0 + rate * horizon;
            if (!(r_end > 0.0))
                throw ConfigError("set: ball radius becomes nonpositive over the horizon");
            eta = std::min(r0, r_end);
        }
        return std::make_shared<BallExterior>(center, r0, vel, rate, eta,
                                              cfg::number_or(j, "set", "boundary_tolerance", 1e-8));
    }
    if (kind == "ball_exterior_union") {
        cfg::check_keys(j, "set", {"kind", "balls", "eta", "boundary_tolerance"});
        const Json& balls = cfg::require(j, "set", "balls");
        if (!balls.is_array() || balls.empty())
            throw ConfigError("set.balls: expected a nonempty array");
        std::vector<BallExteriorUnion::Ball> bs;
        for (const auto& b : balls) {
            cfg::check_keys(b, "set.balls[]", {"center", "radius"});
            bs.push_back({cfg::vector(b, "ball", "center"), cfg::number(b, "ball", "radius")});
        }
        return std::make_shared<BallExteriorUnion>(std::move(bs), cfg::opt_number(j, "set", "eta"),
                                                   cfg::number_or(j, "set", "boundary_tolerance",
                                                                  1e-8));
    }
    if (kind == "dilated") {
        cfg::check_keys(j, "set", {"kind", "base", "epsilon"});
        return dilate(parse_set(cfg::require(j, "set", "base"), horizon),
                      cfg::number(j, "set", "epsilon"));
    }
    if (kind == "constraint_set") {
        cfg::check_keys(j, "set",
                        {"kind", "dimension", "constraints", "alpha", "beta", "hessian_bound",
                         "rho", "gamma", "eta", "boundary_tolerance"});
        const Json& cs = cfg::require(j, "set", "constraints");
        if (!cs.is_array() || cs.empty())
            throw ConfigError("set.constraints: expected a nonempty array");
        std::vector<SmoothConstraint> constraints;
        for (const auto& c : cs) constraints.push_back(parse_constraint(c, horizon));
        ConstraintSet::Params params;
        params.alpha = cfg::number(j, "set", "alpha");
        params.beta = cfg::number(j, "set", "beta");
        params.hessian_bound = cfg::number_or(j, "set", "hessian_bound", 0.0);
        params.rho = cfg::number(j, "set", "rho");
        params.gamma = cfg::opt_number(j, "set", "gamma");
        params.eta = cfg::opt_number(j, "set", "eta");
        params.boundary_tolerance = cfg::number_or(j, "set", "boundary_tolerance", 1e-8);
        return std::make_shared<ConstraintSet>(
            std::move(constraints), static_cast<std::size_t>(cfg::number(j, "set", "dimension")),
            params);
    }
    throw ConfigError("set: unknown kind \"" + kind + "\"");
}

inline Driver parse_driver(const Json& j, const TimeGrid& grid) {
    const std::string type = cfg::text(j, "driver", "type");
    if (type == "linear") {
        cfg::check_keys(j, "driver", {"type", "slope", "offset"});
        const Vec slope = cfg::vector(j, "driver", "slope");
        Vec offset(slope.size(), 0.0);
        if (j.contains("offset")) offset = cfg::vector(j, "driver", "offset");
        return Driver::from_function(grid, [slope, offset](double t) {
            Vec v = offset;
            axpy(t, slope, v);
            return v;
        });
    }
    if (type == "sin") {
        cfg::check_keys(j, "driver", {"type", "amplitude", "frequency", "offset"});
        const Vec amp = cfg::vector(j, "driver", "amplitude");
        const double freq = cfg::number(j, "driver", "frequency");
        Vec offset(amp.size(), 0.0);
        if (j.contains("offset")) offset = cfg::vector(j, "driver", "offset");
        return Driver::from_function(grid, [amp, freq, offset](double t) {
            Vec v = offset;
            axpy(std::sin(freq * t), amp, v);
            return v;
        });
    }
    if (type == "zero") {
        cfg::check_keys(j, "driver", {"type", "dimension"});
        const auto dim = static_cast<std::size_t>(cfg::number(j, "driver", "dimension"));
        return Driver::from_function(grid, [dim](double) { return Vec(dim, 0.0); });
    }
    if (type == "samples") {
        cfg::check_keys(j, "driver", {"type", "values"});
        const Json& vals = cfg::require(j, "driver", "values");
        std::vector<Vec> values;
        for (const auto& v : vals) values.push_back(v.get<Vec>());
        return Driver(grid, std::move(values), DriverKind::sampled);
    }
    throw ConfigError("driver: unknown type \"" + type + "\"");
}

inline std::function<Vec(double, std::span<const double>)> parse_field(const Json& j,
                                                                       const std::string& where) {
    const std::string type = cfg::text(j, where, "type");
    if (type == "constant") {
        cfg::check_keys(j, where, {"type", "value"});
        const Vec value = cfg::vector(j, where, "value");
        return [value](double, std::span<const double>) { return value; };
    }
    if (type == "zero") {
        cfg::check_keys(j, where, {"type", "dimension"});
        const auto dim = static_cast<std::size_t>(cfg::number(j, where, "dimension"));
        return [dim](double, std::span<const double>) { return Vec(dim, 0.0); };
    }
    if (type == "decay") { // f(t,x) = -rate * x
        cfg::check_keys(j, where, {"type", "rate"});
        const double rate = cfg::number(j, where, "rate");
        return [rate](double, std::span<const double> x) {
            Vec v(x.begin(), x.end());
            for (double& e : v) e *= -rate;
            return v;
        };
    }
    throw ConfigError(where + ": unknown type \"" + type + "\"");
}

inline std::function<Vec(std::span<const double>)> parse_crowd_velocity(const Json& j,
                                                                        std::size_t count) {
    const std::string type = cfg::text(j, "velocity", "type");
    if (type == "constant") {
        cfg::check_keys(j, "velocity", {"type", "velocities"});
        const Json& vs = cfg::require(j, "velocity", "velocities");
        if (vs.size() != count) throw ConfigError("velocity.velocities: one entry per disk");
        Vec flat;
        for (const auto& v : vs) {
            const Vec u = v.get<Vec>();
            if (u.size() != 2) throw ConfigError("velocity.velocities: entries must be 2-D");
            flat.push_back(u[0]);
            flat.push_back(u[1]);
        }
        return [flat](std::span<const double>) { return flat; };
    }
    if (type == "target_seeking") {
        cfg::check_keys(j, "velocity", {"type", "targets", "speed"});
        const Json& ts = cfg::require(j, "velocity", "targets");
        if (ts.size() != count) throw ConfigError("velocity.targets: one entry per disk");
        std::vector<Vec> targets;
        for (const auto& t : ts) targets.push_back(t.get<Vec>());
        const double speed = cfg::number(j, "velocity", "speed");
        return [targets, speed](std::span<const double> q) {
            Vec u(q.size(), 0.0);
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const double dx = targets[i][0] - q[2 * i];
                const double dy = targets[i][1] - q[2 * i + 1];
                const double n = std::hypot(dx, dy);
                if (n > 1e-9) {
                    u[2 * i] = speed * dx / n;
                    u[2 * i + 1] = speed * dy / n;
                }
            }
            return u;
        };
    }
    if (type == "corridor") {
        cfg::check_keys(j, "velocity", {"type", "direction", "speed"});
        const Vec dir = cfg::vector(j, "velocity", "direction");
        if (dir.size() != 2) throw ConfigError("velocity.direction: must be 2-D");
        const double speed = cfg::number(j, "velocity", "speed");
        const Vec u = scaled(unit(dir), speed);
        return [u, count = count](std::span<const double>) {
            Vec flat(2 * count);
            for (std::size_t i = 0; i < count; ++i) {
                flat[2 * i] = u[0];
                flat[2 * i + 1] = u[1];
            }
            return flat;
        };
    }
    throw ConfigError("velocity: unknown type \"" + type + "\"");
}

inline std::function<Vec(double, std::span<const double>)> parse_crowd_noise(const Json& j,
                                                                             std::size_t count,
                                                                             double& bound_out) {
    const std::string type = cfg::text(j, "noise", "type");
    if (type == "zero") {
        cfg::check_keys(j, "noise", {"type"});
        bound_out = 0.0;
        return [count](double, std::span<const double>) { return Vec(2 * count, 0.0); };
    }
    if (type == "isotropic") {
        cfg::check_keys(j, "noise", {"type", "amplitude"});
        const double a = cfg::number(j, "noise", "amplitude");
        bound_out = std::fabs(a);
        return [count, a](double, std::span<const double>) { return Vec(2 * count, a); };
    }
    if (type == "per_disk") {
        cfg::check_keys(j, "noise", {"type", "amplitudes"});
        const Json& as = cfg::require(j, "noise", "amplitudes");
        if (as.size() != count) throw ConfigError("noise.amplitudes: one entry per disk");
        Vec flat;
        double bound = 0.0;
        for (const auto& a : as) {
            const Vec v = a.get<Vec>();
            if (v.size() != 2) throw ConfigError("noise.amplitudes: entries must be 2-D");
            flat.push_back(v[0]);
            flat.push_back(v[1]);
            bound = std::max(bound, std::hypot(v[0], v[1]));
        }
        bound_out = bound;
        return [flat](double, std::span<const double>) { return flat; };
    }
    throw ConfigError("noise: unknown type \"" + type + "\"");
}

inline CrowdConfig parse_crowd(const Json& j, const TimeGrid& grid) {
    cfg::check_keys(j, "crowd",
                    {"disks", "velocity", "noise", "rho", "speed_bound", "contact_tolerance",
                     "walls"});
    const Json& disks = cfg::require(j, "crowd", "disks");
    if (!disks.is_array() || disks.empty()) throw ConfigError("crowd.disks: expected disks");

    CrowdConfig config;
    config.grid = grid;
    config.count = disks.size();
    for (const auto& d : disks) {
        cfg::check_keys(d, "crowd.disks[]", {"center", "radius"});
        const Vec c = cfg::vector(d, "disk", "center");
        if (c.size() != 2) throw ConfigError("crowd.disks[].center: must be 2-D");
        config.initial_positions.push_back(c[0]);
        config.initial_positions.push_back(c[1]);
        config.radii.push_back(
            parse_radius(cfg::require(d, "disk", "radius"), "radius", grid.horizon()));
    }
    config.velocity = parse_crowd_velocity(cfg::require(j, "crowd", "velocity"), config.count);
    config.noise = parse_crowd_noise(cfg::require(j, "crowd", "noise"), config.count,
                                     config.noise_bound);
    if (j.contains("rho")) config.rho = cfg::number(j, "crowd", "rho");
    config.speed_bound = cfg::number_or(j, "crowd", "speed_bound", 1.0);
    config.contact_tolerance = cfg::number_or(j, "crowd", "contact_tolerance", 1e-8);
    if (j.contains("walls"))
        for (const auto& w : j.at("walls")) {
            Json wall = w;
            wall["type"] = "wall_distance";
            wall["disks"] = config.count;
            config.walls.push_back(parse_constraint(wall, grid.horizon()));
        }
    config.validate();
    return config;
}

/// A parsed scenario: the resolved configuration plus typed accessors for
/// the per-kind blocks. The resolved JSON round-trips unchanged and fully
/// determines every output.
struct Scenario {
    Json config;
    std::string kind;

    static Scenario parse(const Json& raw) {
        static const std::set<std::string> top_keys = {
            "schema_version", "kind",      "name",   "seed",   "grid",  "set",
            "driver",         "u0",        "fields", "sigma_base", "epsilons", "paths",
            "levels",         "refine_steps", "crowd", "probes", "window", "samples",
            "claimed_eta",    "time_pairs", "output", "support_tolerance", "dump_paths"};
        cfg::check_keys(raw, "scenario", top_keys);
        const Json& version = cfg::require(raw, "scenario", "schema_version");
        if (!version.is_number_integer() || version.get<int>() != 1)
            throw ConfigError("scenario: unsupported schema_version (expected 1)");
        Scenario s;
        s.kind = cfg::text(raw, "scenario", "kind");
        static const std::set<std::string> kinds = {"skorohod", "sde", "stability", "crowd",
                                                    "geometry-check"};
        if (!kinds.count(s.kind)) throw ConfigError("scenario: unknown kind \"" + s.kind + "\"");
        s.config = raw;
        s.validate();
        return s;
    }

    void validate() const {
        if (kind != "geometry-check") grid();
        if (kind == "skorohod") {
            driver();
            set();
            u0();
        } else if (kind == "sde") {
            set();
            u0();
            fields();
            seed();
        } else if (kind == "stability") {
            set();
            u0();
            fields();
            seed();
            epsilons();
            paths();
        } else if (kind == "crowd") {
            crowd();
            seed();
        } else {
            set();
            probes();
        }
    }

    TimeGrid grid() const { return parse_grid(cfg::require(config, "scenario", "grid")); }

    double horizon_hint() const {
        return config.contains("grid") ? grid().horizon() : 1.0;
    }

    std::shared_ptr<const MovingSet> set() const {
        return parse_set(cfg::require(config, "scenario", "set"), horizon_hint());
    }

    Driver driver() const { return parse_driver(cfg::require(config, "scenario", "driver"), grid()); }

    Vec u0() const { return cfg::vector(config, "scenario", "u0"); }

    std::uint64_t seed() const {
        const Json& v = cfg::require(config, "scenario", "seed");
        if (!v.is_number_integer()) throw ConfigError("scenario.seed: expected an integer");
        return v.get<std::uint64_t>();
    }

    FieldPair fields() const {
        const Json& f = cfg::require(config, "scenario", "fields");
        cfg::check_keys(f, "fields", {"drift", "diffusion", "bound"});
        FieldPair out;
        out.drift = parse_field(cfg::require(f, "fields", "drift"), "drift");
        out.diffusion = parse_field(cfg::require(f, "fields", "diffusion"), "diffusion");
        out.bound = cfg::number(f, "fields", "bound");
        return out;
    }

    std::function<Vec(double, std::span<const double>)> sigma_base() const {
        return parse_field(cfg::require(config, "scenario", "sigma_base"), "sigma_base");
    }

    std::vector<double> epsilons() const {
        const Json& v = cfg::require(config, "scenario", "epsilons");
        if (!v.is_array() || v.empty()) throw ConfigError("scenario.epsilons: expected an array");
        return v.get<std::vector<double>>();
    }

    std::size_t paths() const {
        const Json& v = cfg::require(config, "scenario", "paths");
        if (!v.is_number_integer() || v.get<std::int64_t>() <= 0)
            throw ConfigError("scenario.paths: expected a positive integer");
        return v.get<std::size_t>();
    }

    std::size_t levels() const {
        if (!config.contains("levels")) return 6;
        const Json& v = config.at("levels");
        if (!v.is_number_integer() || v.get<std::int64_t>() < 3)
            throw ConfigError("scenario.levels: expected an integer >= 3");
        return v.get<std::size_t>();
    }

    std::vector<double> refine_steps() const {
        const Json& v = cfg::require(config, "scenario", "refine_steps");
        if (!v.is_array() || v.empty())
            throw ConfigError("scenario.refine_steps: expected an array");
        return v.get<std::vector<double>>();
    }

    CrowdConfig crowd() const {
        return parse_crowd(cfg::require(config, "scenario", "crowd"), grid());
    }

    struct Probe {
        double t;
        Vec x;
    };
    std::vector<Probe> probes() const {
        const Json& v = cfg::require(config, "scenario", "probes");
        if (!v.is_array() || v.empty()) throw ConfigError("scenario.probes: expected probes");
        std::vector<Probe> out;
        for (const auto& p : v) {
            cfg::check_keys(p, "probes[]", {"t", "x"});
            out.push_back({cfg::number(p, "probe", "t"), cfg::vector(p, "probe", "x")});
        }
        return out;
    }

    std::optional<SamplingWindow> window() const {
        if (!config.contains("window")) return std::nullopt;
        const Json& w = config.at("window");
        cfg::check_keys(w, "window", {"lo", "hi"});
        return SamplingWindow(cfg::vector(w, "window", "lo"), cfg::vector(w, "window", "hi"));
    }

    std::size_t samples() const {
        return static_cast<std::size_t>(cfg::number_or(config, "scenario", "samples", 10000));
    }

    std::optional<double> claimed_eta() const {
        return cfg::opt_number(config, "scenario", "claimed_eta");
    }

    std::vector<std::pair<double, double>> time_pairs() const {
        std::vector<std::pair<double, double>> out;
        if (!config.contains("time_pairs")) return out;
        for (const auto& p : config.at("time_pairs")) {
            if (!p.is_array() || p.size() != 2)
                throw ConfigError("scenario.time_pairs: expected [t1, t2] pairs");
            out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
        return out;
    }

    double support_tolerance() const {
        return cfg::number_or(config, "scenario", "support_tolerance", 1e-10);
    }

    std::size_t dump_paths() const {
        return static_cast<std::size_t>(cfg::number_or(config, "scenario", "dump_paths", 0.0));
    }

    std::string output_name(const std::string& which, const std::string& fallback) const {
        if (!config.contains("output")) return fallback;
        const Json& o = config.at("output");
        cfg::check_keys(o, "output", {"trajectory", "table", "report"});
        if (!o.contains(which)) return fallback;
        return o.at(which).get<std::string>();
    }
};

/// Applies key=value overrides to an existing config. Paths are dotted
/// (grid.step=0.0005); the key must already exist, so typos fail loudly.
inline Json apply_overrides(Json config,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
    for (const auto& [path, value] : overrides) {
        Json* node = &config;
        std::size_t start = 0;
        std::vector<std::string> parts;
        while (true) {
            const auto dotpos = path.find('.', start);
            parts.push_back(path.substr(start, dotpos - start));
            if (dotpos == std::string::npos) break;
            start = dotpos + 1;
        }
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            if (!node->is_object() || !node->contains(parts[i]))
                throw ConfigError("override: no such key \"" + path + "\"");
            node = &node->at(parts[i]);
        }
        if (!node->is_object() || !node->contains(parts.back()))
            throw ConfigError("override: no such key \"" + path + "\"");
        Json parsed = Json::parse(value, nullptr, false);
        if (parsed.is_discarded()) parsed = value; // plain string
        node->at(parts.back()) = parsed;
    }
    return config;
}

} // namespace sweeping
