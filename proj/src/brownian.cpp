#include "ubsde/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "ubsde/table.hpp"

namespace ubsde {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path) {
    return splitmix64(splitmix64(seed) ^ (path * 0xd1342543de82ef95ULL + 1));
}

BrownianEnsemble::BrownianEnsemble(TimeGrid grid, std::size_t num_paths, std::size_t dim,
                                   std::uint64_t seed, PathField values)
    : grid_(std::move(grid)), seed_(seed), values_(std::move(values)) {
    if (values_.paths() != num_paths || values_.width() != dim ||
        values_.nodes() != grid_.num_nodes()) {
        throw std::invalid_argument("BrownianEnsemble: value array does not match grid/paths/dim");
    }
}

BrownianEnsemble sample_brownian(const TimeGrid& grid, std::size_t num_paths, std::size_t dim,
                                 std::uint64_t seed, Execution exec) {
    if (num_paths == 0) throw std::invalid_argument("sample_brownian: num_paths must be >= 1");
    if (dim == 0) throw std::invalid_argument("sample_brownian: dim must be >= 1");

    const std::size_t nodes = grid.num_nodes();
    PathField values(num_paths, nodes, dim);
    std::vector<double> sqrt_dt(grid.num_steps());
    for (std::size_t i = 0; i < grid.num_steps(); ++i) sqrt_dt[i] = std::sqrt(grid.dt(i));

    kernels::for_each(exec, num_paths, [&](std::size_t p) {
        std::mt19937_64 engine(path_stream_seed(seed, p));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = 0; i + 1 < nodes; ++i) {
            for (std::size_t c = 0; c < dim; ++c) {
                values(p, i + 1, c) = values(p, i, c) + sqrt_dt[i] * normal(engine);
            }
        }
    });
    return BrownianEnsemble(grid, num_paths, dim, seed, std::move(values));
}

void write_ensemble_table(std::ostream& out, const BrownianEnsemble& ensemble,
                          std::size_t max_paths) {
    TableWriter table(out, {"path", "node_index", "t", "component", "W"});
    const std::size_t paths = std::min(max_paths, ensemble.num_paths());
    for (std::size_t p = 0; p < paths; ++p) {
        for (std::size_t i = 0; i < ensemble.grid().num_nodes(); ++i) {
            for (std::size_t c = 0; c < ensemble.dim(); ++c) {
                table.row(p, i, ensemble.grid().t(i), c, ensemble.w(p, i, c));
            }
        }
    }
}

}  // namespace ubsde
