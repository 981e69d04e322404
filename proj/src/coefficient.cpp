#include "ubsde/coefficient.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ubsde/overloaded.hpp"

namespace ubsde {

CoefficientProcess::CoefficientProcess(Kind kind, bool nonneg)
    : kind_(std::move(kind)), nonneg_(nonneg) {
    if (const auto* table = std::get_if<Table>(&kind_); table && !table->samples) {
        throw std::invalid_argument("coefficient process: table kind needs samples");
    }
}

double CoefficientProcess::constant_value() const {
    if (const auto* c = std::get_if<Constant>(&kind_)) return c->value;
    throw std::logic_error("coefficient process " + describe() + " is not constant");
}

PathField CoefficientProcess::sample(const BrownianEnsemble& ensemble) const {
    const std::size_t paths = ensemble.num_paths();
    const std::size_t nodes = ensemble.grid().num_nodes();
    PathField out(paths, nodes, 1);

    std::visit(overloaded{
                   [&](const Constant& c) {
                       for (double& v : out.raw()) v = c.value;
                   },
                   [&](const AbsBrownian& c) {
                       for (std::size_t p = 0; p < paths; ++p)
                           for (std::size_t i = 0; i < nodes; ++i)
                               out(p, i) = c.scale * std::abs(ensemble.w(p, i));
                   },
                   [&](const SquaredBrownian& c) {
                       for (std::size_t p = 0; p < paths; ++p)
                           for (std::size_t i = 0; i < nodes; ++i) {
                               const double w = ensemble.w(p, i);
                               out(p, i) = c.scale * w * w;
                           }
                   },
                   [&](const OuDriven& c) {
                       const TimeGrid& grid = ensemble.grid();
                       for (std::size_t p = 0; p < paths; ++p) {
                           double x = c.mean;
                           out(p, 0) = nonneg_ ? std::abs(x) : x;
                           for (std::size_t i = 0; i + 1 < nodes; ++i) {
                               x += c.rate * (c.mean - x) * grid.dt(i) + c.vol * ensemble.dw(p, i);
                               out(p, i + 1) = nonneg_ ? std::abs(x) : x;
                           }
                       }
                   },
                   [&](const Table& c) {
                       require_shape(*c.samples, paths, nodes, "coefficient table");
                       if (c.samples->width() != 1) {
                           throw std::invalid_argument("coefficient table must be scalar");
                       }
                       out = *c.samples;
                   },
               },
               kind_);

    if (nonneg_) {
        for (std::size_t p = 0; p < paths; ++p) {
            for (std::size_t i = 0; i < nodes; ++i) {
                if (!(out(p, i) >= 0.0)) {
                    std::ostringstream msg;
                    msg << "coefficient process " << describe()
                        << " is declared nonnegative but evaluates to " << out(p, i)
                        << " at path " << p << ", node " << i;
                    throw std::domain_error(msg.str());
                }
            }
        }
    }
    return out;
}

std::string CoefficientProcess::describe() const {
    std::ostringstream s;
    std::visit(overloaded{
                   [&](const Constant& c) { s << "constant(" << c.value << ")"; },
                   [&](const AbsBrownian& c) { s << "abs_brownian(" << c.scale << ")"; },
                   [&](const SquaredBrownian& c) { s << "squared_brownian(" << c.scale << ")"; },
                   [&](const OuDriven& c) {
                       s << "ou_driven(" << c.mean << "," << c.rate << "," << c.vol << ")";
                   },
                   [&](const Table&) { s << "table"; },
               },
               kind_);
    return s.str();
}

}  // namespace ubsde
