#include "ubsde/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ubsde/overloaded.hpp"

namespace ubsde {

std::string Generator::describe() const {
    std::ostringstream s;
    std::visit(overloaded{
                   [&](const Zero&) { s << "zero"; },
                   [&](const Constant& c) {
                       s << "constant(";
                       for (std::size_t j = 0; j < c.value.size(); ++j)
                           s << (j ? "," : "") << c.value[j];
                       s << ")";
                   },
                   [&](const Linear& l) {
                       s << "linear(a=" << l.a.describe() << ",b=[";
                       for (std::size_t j = 0; j < l.b.size(); ++j)
                           s << (j ? "," : "") << l.b[j].describe();
                       s << "],c=" << l.c.describe() << ")";
                   },
                   [&](const SinClip& g) {
                       s << "sin_clip(c1=" << g.c1.describe() << ",c2=" << g.c2.describe()
                         << ",level=" << g.level << ")";
                   },
               },
               body);
    if (offset) s << "+" << offset->describe();
    return s.str();
}

std::string Terminal::describe() const {
    std::ostringstream s;
    std::visit(overloaded{
                   [&](const Constant& c) {
                       s << "constant(";
                       for (std::size_t j = 0; j < c.value.size(); ++j)
                           s << (j ? "," : "") << c.value[j];
                       s << ")";
                   },
                   [&](const Affine& a) {
                       s << "affine(intercept=" << a.intercept.front()
                         << ",slope=" << a.slope.front() << (a.slope.size() > 1 ? ",..." : "")
                         << ")";
                   },
                   [&](const Sine& t) {
                       s << "sine(" << t.amplitude << "," << t.frequency << ")";
                   },
                   [&](const ExpSquare& t) { s << "exp_square(" << t.rate << ")"; },
                   [&](const RunningMax& t) { s << "running_max(" << t.scale << ")"; },
               },
               body);
    if (offset != 0.0) s << "+" << offset;
    return s.str();
}

void BSDEModel::validate() const {
    const auto fail = [&](const std::string& what) {
        throw std::invalid_argument("model '" + name + "': " + what);
    };
    if (dim_y == 0 || dim_w == 0) fail("dimensions must be positive");
    if (!c1.nonneg() || !c2.nonneg()) fail("declared Lipschitz moduli must be nonnegative");
    std::visit(overloaded{
                   [&](const Generator::Zero&) {},
                   [&](const Generator::Constant& c) {
                       if (c.value.size() != dim_y) fail("constant generator needs d values");
                   },
                   [&](const Generator::Linear& l) {
                       if (l.b.size() != dim_w) fail("linear generator needs k b-processes");
                   },
                   [&](const Generator::SinClip& g) {
                       if (!(g.level > 0.0)) fail("clip level must be positive");
                   },
               },
               generator.body);
    std::visit(overloaded{
                   [&](const Terminal::Constant& c) {
                       if (c.value.size() != dim_y) fail("constant terminal needs d values");
                   },
                   [&](const Terminal::Affine& a) {
                       if (a.intercept.size() != dim_y || a.slope.size() != dim_y * dim_w)
                           fail("affine terminal needs d intercepts and d*k slopes");
                   },
                   [&](const auto&) {},
               },
               terminal.body);
}

namespace {

PathField sample_terminal(const Terminal& terminal, const BrownianEnsemble& ensemble,
                          std::size_t d) {
    const std::size_t paths = ensemble.num_paths();
    const std::size_t k = ensemble.dim();
    const std::size_t last = ensemble.grid().num_steps();
    PathField xi(paths, 1, d);
    for (std::size_t p = 0; p < paths; ++p) {
        const auto w_t = ensemble.w_at(p, last);
        std::span<double> out = xi.at(p, 0);
        std::visit(overloaded{
                       [&](const Terminal::Constant& c) {
                           std::copy(c.value.begin(), c.value.end(), out.begin());
                       },
                       [&](const Terminal::Affine& a) {
                           for (std::size_t j = 0; j < d; ++j) {
                               double v = a.intercept[j];
                               for (std::size_t l = 0; l < k; ++l) v += a.slope[j * k + l] * w_t[l];
                               out[j] = v;
                           }
                       },
                       [&](const Terminal::Sine& s) {
                           std::fill(out.begin(), out.end(),
                                     s.amplitude * std::sin(s.frequency * w_t[0]));
                       },
                       [&](const Terminal::ExpSquare& e) {
                           std::fill(out.begin(), out.end(), std::exp(e.rate * w_t[0] * w_t[0]));
                       },
                       [&](const Terminal::RunningMax& r) {
                           double m = ensemble.w(p, 0);
                           for (std::size_t i = 1; i <= last; ++i) m = std::max(m, ensemble.w(p, i));
                           std::fill(out.begin(), out.end(), r.scale * m);
                       },
                   },
                   terminal.body);
        for (double& v : out) v += terminal.offset;
    }
    return xi;
}

double clip(double v, double level) { return std::clamp(v, -level, level); }

}  // namespace

BoundModel::BoundModel(BSDEModel model, const BrownianEnsemble& ensemble)
    : model_(std::move(model)), ensemble_(&ensemble) {
    model_.validate();
    if (ensemble.dim() != model_.dim_w) {
        throw std::invalid_argument("model '" + model_.name + "' expects " +
                                    std::to_string(model_.dim_w) +
                                    " Brownian components, ensemble has " +
                                    std::to_string(ensemble.dim()));
    }
    terminal_ = sample_terminal(model_.terminal, ensemble, model_.dim_y);
    c1_ = model_.c1.sample(ensemble);
    c2_ = model_.c2.sample(ensemble);
    std::visit(overloaded{
                   [&](const Generator::Zero&) {},
                   [&](const Generator::Constant&) {},
                   [&](const Generator::Linear& l) {
                       body_fields_.push_back(l.a.sample(ensemble));
                       body_fields_.push_back(l.c.sample(ensemble));
                       for (const auto& b : l.b) body_fields_.push_back(b.sample(ensemble));
                   },
                   [&](const Generator::SinClip& g) {
                       body_fields_.push_back(g.c1.sample(ensemble));
                       body_fields_.push_back(g.c2.sample(ensemble));
                   },
               },
               model_.generator.body);
    if (model_.generator.offset) offset_ = model_.generator.offset->sample(ensemble);
}

void BoundModel::generator(std::size_t node, std::size_t path, std::span<const double> y,
                           std::span<const double> z, std::span<double> out) const {
    const std::size_t d = model_.dim_y;
    const std::size_t k = model_.dim_w;
    std::visit(overloaded{
                   [&](const Generator::Zero&) { std::fill(out.begin(), out.end(), 0.0); },
                   [&](const Generator::Constant& c) {
                       std::copy(c.value.begin(), c.value.end(), out.begin());
                   },
                   [&](const Generator::Linear&) {
                       const double a = body_fields_[0](path, node);
                       const double c = body_fields_[1](path, node);
                       for (std::size_t j = 0; j < d; ++j) {
                           double v = a * y[j] + c;
                           for (std::size_t l = 0; l < k; ++l)
                               v += body_fields_[2 + l](path, node) * z[j * k + l];
                           out[j] = v;
                       }
                   },
                   [&](const Generator::SinClip& g) {
                       const double c1 = body_fields_[0](path, node);
                       const double c2 = body_fields_[1](path, node);
                       const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
                       for (std::size_t j = 0; j < d; ++j) {
                           double row = 0.0;
                           for (std::size_t l = 0; l < k; ++l) row += z[j * k + l];
                           out[j] = c1 * std::sin(y[j]) + c2 * clip(row * inv_sqrt_k, g.level);
                       }
                   },
               },
               model_.generator.body);
    if (offset_) {
        const double shift = (*offset_)(path, node);
        for (double& v : out) v += shift;
    }
}

bool BoundModel::depends_on_y() const {
    return std::visit(overloaded{
                          [](const Generator::Zero&) { return false; },
                          [](const Generator::Constant&) { return false; },
                          [](const Generator::Linear& l) {
                              return !(l.a.is_constant() && l.a.constant_value() == 0.0);
                          },
                          [](const Generator::SinClip& g) {
                              return !(g.c1.is_constant() && g.c1.constant_value() == 0.0);
                          },
                      },
                      model_.generator.body);
}

bool BoundModel::depends_on_z() const {
    return std::visit(overloaded{
                          [](const Generator::Zero&) { return false; },
                          [](const Generator::Constant&) { return false; },
                          [](const Generator::Linear& l) {
                              return std::any_of(l.b.begin(), l.b.end(), [](const auto& b) {
                                  return !(b.is_constant() && b.constant_value() == 0.0);
                              });
                          },
                          [](const Generator::SinClip& g) {
                              return !(g.c2.is_constant() && g.c2.constant_value() == 0.0);
                          },
                      },
                      model_.generator.body);
}

std::vector<double> eval_generator(const BoundModel& model, std::size_t node, std::size_t path,
                                   std::span<const double> y, std::span<const double> z) {
    const std::size_t d = model.dim_y();
    const std::size_t k = model.dim_w();
    if (y.size() != d) {
        throw std::invalid_argument("eval_generator: y has dimension " + std::to_string(y.size()) +
                                    ", expected " + std::to_string(d));
    }
    if (z.size() != d * k) {
        throw std::invalid_argument("eval_generator: z has " + std::to_string(z.size()) +
                                    " entries, expected d*k = " + std::to_string(d * k));
    }
    if (path >= model.ensemble().num_paths() || node >= model.ensemble().grid().num_nodes()) {
        throw std::out_of_range("eval_generator: (node, path) outside the ensemble");
    }
    std::vector<double> out(d);
    model.generator(node, path, y, z, out);
    return out;
}

}  // namespace ubsde
