#pragma once

#include <cmath>
#include <string>

#include "ubsde/field.hpp"

namespace ubsde::test {

inline PathField constant_field(std::size_t paths, std::size_t nodes, double v, std::size_t width = 1) {
    return PathField(paths, nodes, width, v);
}

// Root mean square over paths of a - b at one node, component c.
inline double rms_at(const PathField& a, const PathField& b, std::size_t node, std::size_t c = 0) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.paths(); ++p) {
        const double d = a(p, node, c) - b(p, node, c);
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.paths()));
}

inline double max_abs_diff(const PathField& a, const PathField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.raw().size(); ++i) m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
    return m;
}

}  // namespace ubsde::test
