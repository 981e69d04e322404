#include "ubsde/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ubsde {

TimeGrid::TimeGrid(double horizon, std::vector<double> nodes)
    : horizon_(horizon), nodes_(std::move(nodes)) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw std::invalid_argument("time grid: horizon must be positive and finite");
    }
    if (nodes_.size() < 2) {
        throw std::invalid_argument("time grid: at least one step is required");
    }
    if (nodes_.front() != 0.0 || nodes_.back() != horizon_) {
        throw std::invalid_argument("time grid: nodes must start at 0 and end at the horizon");
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1])) {
            throw std::invalid_argument("time grid: nodes must be strictly increasing (node " +
                                        std::to_string(i) + ")");
        }
    }
}

TimeGrid make_grid(double horizon, std::size_t num_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("make_grid: horizon must be positive, got " +
                                    std::to_string(horizon));
    }
    if (num_steps == 0) {
        throw std::invalid_argument("make_grid: num_steps must be at least 1");
    }
    std::vector<double> nodes(num_steps + 1);
    const double h = horizon / static_cast<double>(num_steps);
    for (std::size_t i = 0; i < num_steps; ++i) nodes[i] = h * static_cast<double>(i);
    nodes[num_steps] = horizon;
    return TimeGrid(horizon, std::move(nodes));
}

}  // namespace ubsde
