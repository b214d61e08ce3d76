#pragma once

// JSON serialization of weighted ensembles:
//
//   {"distributions": [{"weight": 0.25, "mean": [0.0, 0.0],
//                       "cov": [[1.0, 0.0], [0.0, 1.0]], "label": "unit-1"}]}

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wcons/barycenter.hpp"

namespace wcons::cli {

using Json = nlohmann::ordered_json;

struct EnsembleDocument {
  WeightedEnsemble ensemble;
  std::vector<std::string> labels;  // one per entry; "dist-<i>" when absent
};

/// Without `normalize`, weights must sum to 1 within 1e-6 (then are rescaled
/// exactly); with it they are divided by their sum. Covariances must be
/// symmetric within 1e-9 and positive definite.
EnsembleDocument parse_ensemble_text(std::string_view text, bool normalize,
                                     std::string_view source = "<input>");
EnsembleDocument parse_ensemble(const std::filesystem::path& path, bool normalize);

Json to_json(const Vector& v);
Json to_json(const SymMatrix& m);
Json to_json(const LocScatter& p);
Json ensemble_to_json(const EnsembleDocument& doc);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string dump(const Json& j);

}  // namespace wcons::cli
