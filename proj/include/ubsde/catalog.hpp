#pragma once

#include <map>
#include <string>
#include <vector>

#include "ubsde/model.hpp"

namespace ubsde {

using ParamMap = std::map<std::string, double>;

struct CatalogEntry {
    std::string name;
    std::string summary;
    ParamMap defaults;  // every accepted parameter with its default
};

// Named model families. Every entry also accepts the modifiers
//   drift_offset      constant added to f
//   drift_abs_w       scale of |W1(t)| added to f
//   terminal_shift    constant added to xi
// which are used to build dominating pairs for comparison runs.
const std::vector<CatalogEntry>& model_catalog();

// Builds a catalog model; unknown names or parameters throw
// std::invalid_argument listing what is accepted. dim_w sets k where the
// family allows it (all families are scalar in y).
BSDEModel make_catalog_model(const std::string& name, const ParamMap& params,
                             std::size_t dim_w = 1);

}  // namespace ubsde
