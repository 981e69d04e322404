#pragma once

#include <cstddef>
#include <vector>

namespace ubsde {

// Discretized time axis 0 = t_0 < ... < t_N = T.
class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(double horizon, std::vector<double> nodes);

    double horizon() const { return horizon_; }
    std::size_t num_steps() const { return nodes_.size() - 1; }
    std::size_t num_nodes() const { return nodes_.size(); }
    double t(std::size_t i) const { return nodes_[i]; }
    double dt(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double horizon_ = 0.0;
    std::vector<double> nodes_{0.0};
};

// Uniform grid; throws std::invalid_argument on horizon <= 0 or num_steps == 0.
TimeGrid make_grid(double horizon, std::size_t num_steps);

}  // namespace ubsde
