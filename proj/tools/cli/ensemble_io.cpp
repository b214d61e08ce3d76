#include "ensemble_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "wcons/error.hpp"

namespace wcons::cli {

namespace {

[[noreturn]] void parse_fail(std::string_view source, const std::string& what) {
  throw Error(ErrorCode::ParseError, std::string(source) + ": " + what);
}

double number_at(const Json& j, std::string_view source, const std::string& field) {
  if (!j.is_number()) parse_fail(source, field + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(source, field + " must be finite");
  return v;
}

}  // namespace

EnsembleDocument parse_ensemble_text(std::string_view text, bool normalize,
                                     std::string_view source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    parse_fail(source, std::string("malformed JSON (") + e.what() + ")");
  }
  if (!root.is_object() || !root.contains("distributions") || !root["distributions"].is_array())
    parse_fail(source, "missing 'distributions' array");
  const Json& entries = root["distributions"];
  if (entries.empty()) parse_fail(source, "'distributions' is empty");

  std::vector<double> weights;
  std::vector<LocScatter> members;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Json& e = entries[i];
    const std::string at = "distributions[" + std::to_string(i) + "]";
    if (!e.is_object()) parse_fail(source, at + " must be an object");
    if (!e.contains("weight") || !e.contains("mean") || !e.contains("cov"))
      parse_fail(source, at + " needs weight, mean and cov");

    const double w = number_at(e["weight"], source, at + ".weight");
    if (!(w > 0.0)) throw Error(ErrorCode::BadWeights, at + ".weight must be positive");

    if (!e["mean"].is_array() || e["mean"].empty())
      parse_fail(source, at + ".mean must be a non-empty array");
    Vector mean;
    for (std::size_t c = 0; c < e["mean"].size(); ++c)
      mean.push_back(number_at(e["mean"][c], source, at + ".mean[" + std::to_string(c) + "]"));
    const std::size_t d = mean.size();

    const Json& cj = e["cov"];
    if (!cj.is_array() || cj.size() != d) parse_fail(source, at + ".cov must be " + std::to_string(d) + "x" + std::to_string(d));
    Matrix cov(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      if (!cj[r].is_array() || cj[r].size() != d)
        parse_fail(source, at + ".cov must be " + std::to_string(d) + "x" + std::to_string(d));
      for (std::size_t c = 0; c < d; ++c)
        cov(r, c) = number_at(cj[r][c], source,
                              at + ".cov[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    const double scale = std::max(1.0, cov.frobenius_norm());
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = r + 1; c < d; ++c)
        if (std::abs(cov(r, c) - cov(c, r)) > 1e-9 * scale)
          throw Error(ErrorCode::InvalidInput, at + ".cov is not symmetric");

    try {
      members.emplace_back(std::move(mean), certify_spd(cov));
    } catch (const NotPositiveDefiniteError& npd) {
      throw NotPositiveDefiniteError(npd.eigenvalue(), i);
    }
    weights.push_back(w);

    if (e.contains("label")) {
      if (!e["label"].is_string()) parse_fail(source, at + ".label must be a string");
      labels.push_back(e["label"].get<std::string>());
    } else {
      labels.push_back("dist-" + std::to_string(i));
    }
  }

  double sum = 0.0;
  for (double w : weights) sum += w;
  if (!normalize && std::abs(sum - 1.0) > 1e-6)
    throw Error(ErrorCode::BadWeights, "weights sum to " + std::to_string(sum) + ", expected 1");
  for (double& w : weights) w /= sum;

  return {WeightedEnsemble(weights, std::move(members)), std::move(labels)};
}

EnsembleDocument parse_ensemble(const std::filesystem::path& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ensemble_text(buf.str(), normalize, path.string());
}

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (double x : v) j.push_back(x);
  return j;
}

Json to_json(const SymMatrix& m) {
  Json j = Json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(m(r, c));
    j.push_back(std::move(row));
  }
  return j;
}

Json to_json(const LocScatter& p) {
  Json j = Json::object();
  j["mean"] = to_json(p.mean());
  j["cov"] = to_json(p.cov().sym());
  return j;
}

Json ensemble_to_json(const EnsembleDocument& doc) {
  Json list = Json::array();
  for (std::size_t i = 0; i < doc.ensemble.size(); ++i) {
    Json e = Json::object();
    e["weight"] = doc.ensemble[i].weight;
    e["mean"] = to_json(doc.ensemble[i].dist.mean());
    e["cov"] = to_json(doc.ensemble[i].dist.cov().sym());
    if (i < doc.labels.size()) e["label"] = doc.labels[i];
    list.push_back(std::move(e));
  }
  Json root = Json::object();
  root["distributions"] = std::move(list);
  return root;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::InvalidInput, "failed writing " + path.string());
}

}  // namespace wcons::cli
