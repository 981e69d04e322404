#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ubsde {

// Dense (path, node, component) array. Path-major so that one path's
// trajectory is contiguous, which is what the per-path kernels walk.
class PathField {
public:
    PathField() = default;
    PathField(std::size_t paths, std::size_t nodes, std::size_t width, double fill = 0.0)
        : paths_(paths), nodes_(nodes), width_(width), data_(paths * nodes * width, fill) {}

    std::size_t paths() const { return paths_; }
    std::size_t nodes() const { return nodes_; }
    std::size_t width() const { return width_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t path, std::size_t node, std::size_t comp = 0) {
        return data_[(path * nodes_ + node) * width_ + comp];
    }
    double operator()(std::size_t path, std::size_t node, std::size_t comp = 0) const {
        return data_[(path * nodes_ + node) * width_ + comp];
    }

    std::span<double> at(std::size_t path, std::size_t node) {
        return {data_.data() + (path * nodes_ + node) * width_, width_};
    }
    std::span<const double> at(std::size_t path, std::size_t node) const {
        return {data_.data() + (path * nodes_ + node) * width_, width_};
    }

    std::span<const double> raw() const { return data_; }
    std::span<double> raw() { return data_; }

    bool same_shape(const PathField& other) const {
        return paths_ == other.paths_ && nodes_ == other.nodes_ && width_ == other.width_;
    }

    friend bool operator==(const PathField&, const PathField&) = default;

private:
    std::size_t paths_ = 0;
    std::size_t nodes_ = 0;
    std::size_t width_ = 0;
    std::vector<double> data_;
};

inline void require_shape(const PathField& field, std::size_t paths, std::size_t nodes,
                          const char* what) {
    if (field.paths() != paths || field.nodes() != nodes) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch (expected " +
                                    std::to_string(paths) + " paths x " + std::to_string(nodes) +
                                    " nodes, got " + std::to_string(field.paths()) + " x " +
                                    std::to_string(field.nodes()) + ")");
    }
}

}  // namespace ubsde
