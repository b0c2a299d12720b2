#pragma once

// Scheme files are UTF-8 JSON documents:
//
//   {
//     "name": "SS5-4(3)",                       (optional)
//     "family": "SS" | "MethodAdjoint" | "Splitting",
//     "declared_order": 4,
//     "stages": [ {"role": "S2", "coeff": 0.4144907717943757}, ... ],
//     "estimators": [                           (optional)
//       { "order": 3,
//         "symmetry": [ {"i": 1, "j": 4, "sign": 1}, ... ],   (optional)
//         "pins": [ {"index": 0, "value": -1.0}, ... ],        (optional)
//         "weights": [ ... ],                                   (optional)
//         "note": "..." }                                       (optional)
//     ]
//   }
//
// Roles are S2, BasicChi, AdjointChi, FlowA, FlowB. Coefficients are written
// with 17 significant digits so a round trip is exact.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "embedsplit/schemes.hpp"

namespace embedsplit {

struct SchemeFileEstimator {
  EstimatorRecipe recipe;
  std::optional<std::vector<double>> weights;
};

struct SchemeFile {
  std::string name;
  SchemeSpec scheme;
  std::vector<SchemeFileEstimator> estimators;
};

SchemeFile parse_scheme_file(const std::string& text);
SchemeFile load_scheme_file(const std::filesystem::path& path);

std::string dump_scheme_file(const SchemeFile& file);
SchemeFile scheme_file_from_method(const EmbeddedMethod& method);

}  // namespace embedsplit
