#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>

#include "ubsde/field.hpp"
#include "ubsde/grid.hpp"
#include "ubsde/kernels.hpp"

namespace ubsde {

// Monte-Carlo sample of a k-dimensional standard Brownian motion on a grid.
//
// Path p draws from its own generator, seeded by mixing (seed, p), so a path
// is reproducible independently of how paths are batched across threads.
class BrownianEnsemble {
public:
    BrownianEnsemble(TimeGrid grid, std::size_t num_paths, std::size_t dim, std::uint64_t seed,
                     PathField values);

    const TimeGrid& grid() const { return grid_; }
    std::size_t num_paths() const { return values_.paths(); }
    std::size_t dim() const { return values_.width(); }
    std::uint64_t seed() const { return seed_; }
    const PathField& values() const { return values_; }

    double w(std::size_t path, std::size_t node, std::size_t comp = 0) const {
        return values_(path, node, comp);
    }
    std::span<const double> w_at(std::size_t path, std::size_t node) const {
        return values_.at(path, node);
    }
    double dw(std::size_t path, std::size_t step, std::size_t comp = 0) const {
        return values_(path, step + 1, comp) - values_(path, step, comp);
    }

private:
    TimeGrid grid_;
    std::uint64_t seed_;
    PathField values_;
};

// Stream seed for one path; also used to derive auxiliary streams.
std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path);

BrownianEnsemble sample_brownian(const TimeGrid& grid, std::size_t num_paths, std::size_t dim,
                                 std::uint64_t seed, Execution exec = Execution::parallel);

// Debug export: header "path\tnode_index\tt\tcomponent\tW", one row per value.
void write_ensemble_table(std::ostream& out, const BrownianEnsemble& ensemble,
                          std::size_t max_paths);

}  // namespace ubsde
