#pragma once

#include <cmath>
#include <cstddef>

#include "sweeping/errors.hpp"

namespace sweeping {

/// Uniform partition t_n = n*h of [0, T], last node clamped to exactly T.
/// When T is not an integer multiple of h the final step is shorter.
class TimeGrid {
public:
    TimeGrid(double horizon, double step) : horizon_(horizon), step_(step) {
        if (!(step > 0.0)) throw ConfigError("TimeGrid: step must be positive");
        if (!(horizon > 0.0)) throw ConfigError("TimeGrid: horizon must be positive");
        if (step > horizon) throw ConfigError("TimeGrid: step exceeds horizon");
        auto n = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
        if (n == 0) n = 1;
        // keep nodes strictly increasing: the clamped last node must sit
        // strictly above the previous regular node
        while (n > 1 && static_cast<double>(n - 1) * step >= horizon) --n;
        steps_ = n;
    }

    double horizon() const { return horizon_; }
    double step() const { return step_; }

    /// Number of steps; node count is step_count() + 1.
    std::size_t step_count() const { return steps_; }
    std::size_t node_count() const { return steps_ + 1; }

    double node(std::size_t i) const {
        return i == steps_ ? horizon_ : static_cast<double>(i) * step_;
    }

    /// Actual width of step i (the last one may be clamped short).
    double step_width(std::size_t i) const { return node(i + 1) - node(i); }

    /// True when every step has the nominal width (T is a multiple of h).
    bool is_uniform() const {
        return std::fabs(static_cast<double>(steps_) * step_ - horizon_) <=
               1e-9 * std::max(1.0, horizon_);
    }

    /// Half-step grid. Requires a uniform grid so that every current node is
    /// a node of the refined grid.
    TimeGrid refined() const {
        if (!is_uniform())
            throw ConfigError("TimeGrid: refinement requires horizon to be a multiple of step");
        return TimeGrid(horizon_, step_ / 2.0);
    }

    bool operator==(const TimeGrid& o) const {
        return horizon_ == o.horizon_ && step_ == o.step_ && steps_ == o.steps_;
    }

private:
    double horizon_;
    double step_;
    std::size_t steps_;
};

} // namespace sweeping
