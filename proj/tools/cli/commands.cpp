#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "ensemble_io.hpp"
#include "wcons/barycenter.hpp"
#include "wcons/error.hpp"
#include "wcons/gaussian_metric.hpp"
#include "wcons/simulation.hpp"
#include "wcons/trimming.hpp"
#include "wcons/univariate.hpp"

namespace wcons::cli {

namespace {

// Six significant digits; integral values keep a trailing ".0".
std::string human(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string human(const Vector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + human(v[i]);
  return s + "]";
}

std::string human(const SymMatrix& m) {
  std::string s = "[";
  for (std::size_t r = 0; r < m.dim(); ++r) {
    Vector row(m.matrix().row(r).begin(), m.matrix().row(r).end());
    s += (r ? ", " : "") + human(row);
  }
  return s + "]";
}

void print_entry(std::ostream& out, const std::string& name, const LocScatter& p) {
  out << name << ".mean " << human(p.mean()) << "\n";
  out << name << ".cov " << human(p.cov().sym()) << "\n";
  if (p.dim() == 1) out << name << ".sigma " << human(std::sqrt(p.cov()(0, 0))) << "\n";
}

std::string csv_number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, flag + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidInput, flag + " is empty");
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_list(item, "--alphas").front());
  if (parts.size() != 3) throw Error(ErrorCode::InvalidInput, "--alphas expects START:STOP:STEP");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || stop < start)
    throw Error(ErrorCode::InvalidInput, "--alphas needs STEP > 0 and STOP >= START");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> alphas;
  for (std::size_t i = 0; i < count; ++i) alphas.push_back(start + static_cast<double>(i) * step);
  return alphas;
}

void emit(std::ostream& out, const std::string& path, const Json& j) {
  if (path.empty())
    out << dump(j);
  else
    write_text_file(path, dump(j));
}

Json trim_json(const EnsembleDocument& doc, const TrimmedResult& res, const TrimConfig& cfg) {
  const BallReport ball = verify_ball_property(res, doc.ensemble, cfg.alpha);
  Json j = Json::object();
  j["alpha"] = cfg.alpha;
  j["barycenter"] = to_json(res.bary);
  j["active_weights"] = to_json(res.active_weights);
  j["labels"] = doc.labels;
  j["trimmed_variance"] = res.trimmed_variance;
  j["radius"] = res.radius;
  Json diag = Json::object();
  diag["restarts"] = cfg.restarts;
  diag["seed"] = cfg.seed;
  diag["best_restart"] = res.restart_index;
  diag["outer_iterations"] = res.outer_iterations;
  diag["restart_variances"] = to_json(res.restart_variances);
  diag["ball_property"] = ball.ok;
  j["diagnostics"] = std::move(diag);
  return j;
}

struct Options {
  std::string ensemble;
  std::string second;
  std::string out;
  bool normalize = false;
  unsigned threads = 0;

  double tol = 1e-12;
  int max_iter = 1000;

  double alpha = 0.0;
  int restarts = 10;
  std::uint64_t seed = 0;
  std::string alphas;

  std::size_t count = 256;
  bool with_aggregates = false;

  std::size_t k = 100;
  std::size_t n = 100;
  std::string beta = "4,36";
  double mcd_fraction = 0.8;
  int mcd_restarts = 20;
  bool raw_mcd = false;
  std::optional<double> contamination;

  double sim_alpha = 0.2;
  std::string n_values = "50,200,800";
  int reps = 20;

  std::vector<std::string> grids;
  std::string weights;
};

int cmd_distance(const Options& o, std::ostream& out) {
  const EnsembleDocument a = parse_ensemble(o.ensemble, o.normalize);
  const EnsembleDocument b = parse_ensemble(o.second, o.normalize);
  if (a.ensemble.size() != 1 || b.ensemble.size() != 1)
    throw Error(ErrorCode::InvalidInput, "distance expects one distribution per file");
  const double d2 = w2_distance_sq(a.ensemble[0].dist, b.ensemble[0].dist);
  out << "w2_squared " << human(d2) << "\n";
  out << "w2 " << human(std::sqrt(d2)) << "\n";
  return kExitOk;
}

int cmd_barycenter(const Options& o, std::ostream& out) {
  const EnsembleDocument doc = parse_ensemble(o.ensemble, o.normalize);
  BarycenterOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  const BarycenterResult res = fixed_point_barycenter(doc.ensemble, opts);

  Json j = Json::object();
  j["barycenter"] = to_json(res.bary);
  j["variance"] = res.variance;
  j["iterations"] = res.iterations;
  j["residual"] = res.residual;
  if (!o.out.empty()) write_text_file(o.out, dump(j));

  print_entry(out, "barycenter", res.bary);
  out << "variance " << human(res.variance) << "\n";
  out << "iterations " << res.iterations << "\n";
  out << "residual " << human(res.residual) << "\n";
  return kExitOk;
}

TrimConfig trim_config(const Options& o) {
  TrimConfig cfg;
  cfg.alpha = o.alpha;
  cfg.restarts = o.restarts;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  return cfg;
}

int cmd_trim(const Options& o, std::ostream& out) {
  const EnsembleDocument doc = parse_ensemble(o.ensemble, o.normalize);
  const TrimConfig cfg = trim_config(o);
  const TrimmedResult res = trimmed_barycenter(doc.ensemble, cfg);
  const Json j = trim_json(doc, res, cfg);
  emit(out, o.out, j);
  if (!o.out.empty()) {
    out << "trimmed_variance " << human(res.trimmed_variance) << "\n";
    out << "radius " << human(res.radius) << "\n";
    out << "active_weights " << human(res.active_weights) << "\n";
  }
  return kExitOk;
}

int cmd_variance_curve(const Options& o, std::ostream& out) {
  const EnsembleDocument doc = parse_ensemble(o.ensemble, o.normalize);
  const std::vector<double> alphas = parse_range(o.alphas);
  const std::vector<VariancePoint> curve = variance_curve(doc.ensemble, alphas, trim_config(o));
  std::string csv = "alpha,var_alpha\n";
  for (const auto& p : curve) csv += csv_number(p.alpha) + "," + csv_number(p.variance) + "\n";
  write_text_file(o.out, csv);
  out << "points " << curve.size() << "\n";
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const EnsembleDocument doc = parse_ensemble(o.ensemble, o.normalize);
  const LocScatter bary = fixed_point_barycenter(doc.ensemble).bary;
  const LocScatter logeu = log_euclidean_mean(doc.ensemble);
  const LocScatter lin = linear_mean(doc.ensemble);

  auto aggregate = [&](const LocScatter& p) {
    Json j = to_json(p);
    j["objective"] = frechet_objective(doc.ensemble, p);
    return j;
  };
  Json j = Json::object();
  j["barycenter"] = aggregate(bary);
  j["log_euclidean"] = aggregate(logeu);
  j["linear_mean"] = aggregate(lin);
  Json pw = Json::object();
  pw["barycenter_log_euclidean"] = w2_distance_sq(bary, logeu);
  pw["barycenter_linear_mean"] = w2_distance_sq(bary, lin);
  pw["log_euclidean_linear_mean"] = w2_distance_sq(logeu, lin);
  j["pairwise_w2_squared"] = pw;
  emit(out, o.out, j);

  if (!o.out.empty()) {
    print_entry(out, "barycenter", bary);
    print_entry(out, "log_euclidean", logeu);
    print_entry(out, "linear_mean", lin);
    for (const auto& [name, value] : pw.items()) out << name << " " << human(value.get<double>()) << "\n";
  }
  return kExitOk;
}

int cmd_ellipse(const Options& o, std::ostream& out) {
  const EnsembleDocument doc = parse_ensemble(o.ensemble, o.normalize);
  if (doc.ensemble.dim() != 2)
    throw Error(ErrorCode::DimensionMismatch, "ellipse needs two-dimensional distributions");
  if (o.count < 3) throw Error(ErrorCode::InvalidInput, "--count must be at least 3");

  std::string csv = "label,x,y\n";
  auto add = [&](const std::string& label, const LocScatter& p) {
    for (const auto& pt : ellipse_points(p, o.count))
      csv += label + "," + csv_number(pt[0]) + "," + csv_number(pt[1]) + "\n";
  };
  for (std::size_t i = 0; i < doc.ensemble.size(); ++i) add(doc.labels[i], doc.ensemble[i].dist);
  if (o.with_aggregates) {
    add("barycenter", fixed_point_barycenter(doc.ensemble).bary);
    add("log_euclidean", log_euclidean_mean(doc.ensemble));
    add("linear_mean", linear_mean(doc.ensemble));
    if (o.alpha > 0.0) add("trimmed_barycenter", trimmed_barycenter(doc.ensemble, trim_config(o)).bary);
  }
  write_text_file(o.out, csv);
  out << "curves " << (doc.ensemble.size() + (o.with_aggregates ? 3 + (o.alpha > 0.0) : 0)) << "\n";
  return kExitOk;
}

int cmd_hospitals(const Options& o, std::ostream& out) {
  HospitalConfig cfg;
  cfg.k = o.k;
  cfg.n = o.n;
  const std::vector<double> beta = parse_list(o.beta, "--beta");
  if (beta.size() != 2) throw Error(ErrorCode::InvalidInput, "--beta expects a,b");
  cfg.beta_a = beta[0];
  cfg.beta_b = beta[1];
  cfg.fixed_contamination = o.contamination;
  cfg.mcd_fraction = o.mcd_fraction;
  cfg.mcd_restarts = o.mcd_restarts;
  cfg.mcd_consistency = !o.raw_mcd;
  cfg.alpha = o.sim_alpha;
  cfg.trim_restarts = o.restarts;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const HospitalReport rep = hospital_experiment(cfg);

  Json config = Json::object();
  config["k"] = cfg.k;
  config["n"] = cfg.n;
  config["beta"] = {cfg.beta_a, cfg.beta_b};
  if (cfg.fixed_contamination) config["contamination"] = *cfg.fixed_contamination;
  config["mcd_fraction"] = cfg.mcd_fraction;
  config["mcd_restarts"] = cfg.mcd_restarts;
  config["mcd_consistency"] = cfg.mcd_consistency;
  config["alpha"] = cfg.alpha;
  config["trim_restarts"] = cfg.trim_restarts;
  config["seed"] = cfg.seed;

  Json units = Json::array();
  for (std::size_t u = 0; u < rep.units.size(); ++u) {
    Json e = to_json(rep.units[u].estimate);
    e["contamination"] = rep.units[u].contamination;
    e["outliers"] = rep.units[u].outliers;
    e["active_weight"] = rep.trim.active_weights[u];
    units.push_back(std::move(e));
  }

  Json j = Json::object();
  j["config"] = std::move(config);
  j["target"] = to_json(cfg.inlier);
  j["barycenter"] = to_json(rep.barycenter);
  j["trimmed_barycenter"] = to_json(rep.trimmed);
  j["linear_mean"] = to_json(rep.linear);
  Json dist = Json::object();
  dist["barycenter"] = rep.dist_barycenter;
  dist["trimmed_barycenter"] = rep.dist_trimmed;
  dist["linear_mean"] = rep.dist_linear;
  j["w2_squared_to_target"] = std::move(dist);
  j["trimmed_variance"] = rep.trim.trimmed_variance;
  j["badly_contaminated_units"] = rep.badly_contaminated;
  j["expected_badly_contaminated_units"] = expected_badly_contaminated(cfg);
  j["units"] = std::move(units);
  emit(out, o.out, j);

  if (!o.out.empty()) {
    out << "w2_squared_to_target.barycenter " << human(rep.dist_barycenter) << "\n";
    out << "w2_squared_to_target.trimmed_barycenter " << human(rep.dist_trimmed) << "\n";
    out << "w2_squared_to_target.linear_mean " << human(rep.dist_linear) << "\n";
    out << "badly_contaminated_units " << rep.badly_contaminated << "\n";
  }
  return kExitOk;
}

int cmd_consistency(const Options& o, std::ostream& out) {
  ConsistencyConfig cfg;
  cfg.n_values.clear();
  for (double v : parse_list(o.n_values, "--n")) {
    if (!(v >= 1.0) || v != std::floor(v))
      throw Error(ErrorCode::InvalidInput, "--n expects positive integers");
    cfg.n_values.push_back(static_cast<std::size_t>(v));
  }
  cfg.alpha = o.sim_alpha;
  cfg.reps = o.reps;
  cfg.restarts = o.restarts;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const ConsistencyReport rep = consistency_harness(gaussian_parameter_law(2), cfg);

  std::string csv = "n,median_w2_to_reference,median_var_alpha,median_var_gap,reference_var_alpha\n";
  for (const auto& row : rep.rows)
    csv += std::to_string(row.n) + "," + csv_number(row.median_w2) + "," +
           csv_number(row.median_var) + "," + csv_number(row.median_var_gap) + "," +
           csv_number(rep.reference_variance) + "\n";
  write_text_file(o.out, csv);
  for (const auto& row : rep.rows)
    out << "n " << row.n << " median_w2 " << human(row.median_w2) << " median_var_gap "
        << human(row.median_var_gap) << "\n";
  return kExitOk;
}

int cmd_bary1d(const Options& o, std::ostream& out) {
  const std::vector<double> w = parse_list(o.weights, "--weights");
  if (w.size() != o.grids.size())
    throw Error(ErrorCode::BadWeights, "need one weight per grid file");
  std::vector<QuantileGrid> grids;
  for (const auto& path : o.grids) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    try {
      grids.push_back(read_quantile_csv(in));
    } catch (const Error& e) {
      throw Error(e.code(), path + ": " + e.what());
    }
  }
  const QuantileGrid bary = quantile_barycenter(w, grids);
  std::ostringstream csv;
  write_quantile_csv(csv, bary);
  write_text_file(o.out, csv.str());
  out << "grid_size " << bary.size() << "\n";
  out << "mean " << human(bary.mean()) << "\n";
  out << "variance " << human(variance_1d(w, grids)) << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wasserstein barycenters and trimmed consensus of location-scatter ensembles",
               "wcons"};
  app.require_subcommand(1);
  Options o;

  auto normalize = [&](CLI::App* c) {
    c->add_flag("--normalize", o.normalize, "Divide weights by their sum");
  };
  auto threads = [&](CLI::App* c) {
    c->add_option("--threads", o.threads, "Worker threads (0 = WCONS_THREADS or all cores)");
  };
  auto trimming = [&](CLI::App* c) {
    c->add_option("--restarts", o.restarts, "Number of restarts")->capture_default_str();
    c->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    threads(c);
  };

  auto* distance = app.add_subcommand("distance", "Squared W2 distance between two distributions");
  distance->add_option("a", o.ensemble)->required();
  distance->add_option("b", o.second)->required();
  normalize(distance);

  auto* bary = app.add_subcommand("barycenter", "Fixed-point W2 barycenter");
  bary->add_option("ensemble", o.ensemble)->required();
  bary->add_option("--tol", o.tol)->capture_default_str();
  bary->add_option("--max-iter", o.max_iter)->capture_default_str();
  bary->add_option("--out", o.out, "Write the result as JSON");
  normalize(bary);

  auto* trim = app.add_subcommand("trim", "Trimmed barycenter");
  trim->add_option("ensemble", o.ensemble)->required();
  trim->add_option("--alpha", o.alpha, "Trimming level in [0, 1)")->required();
  trim->add_option("--out", o.out);
  trimming(trim);
  normalize(trim);

  auto* curve = app.add_subcommand("variance-curve", "Trimmed variance over a grid of alphas");
  curve->add_option("ensemble", o.ensemble)->required();
  curve->add_option("--alphas", o.alphas, "START:STOP:STEP")->required();
  curve->add_option("--out", o.out)->required();
  trimming(curve);
  normalize(curve);

  auto* compare = app.add_subcommand("compare", "Barycenter, log-Euclidean and linear mean");
  compare->add_option("ensemble", o.ensemble)->required();
  compare->add_option("--out", o.out);
  normalize(compare);

  auto* ellipse = app.add_subcommand("ellipse", "Ellipse outlines for 2D plotting");
  ellipse->add_option("ensemble", o.ensemble)->required();
  ellipse->add_option("--count", o.count)->capture_default_str();
  ellipse->add_option("--out", o.out)->required();
  ellipse->add_flag("--with-aggregates", o.with_aggregates,
                    "Append barycenter, log-Euclidean and linear mean outlines");
  ellipse->add_option("--alpha", o.alpha, "Also outline the trimmed barycenter");
  trimming(ellipse);
  normalize(ellipse);

  auto* simulate = app.add_subcommand("simulate", "Seeded experiments");
  simulate->require_subcommand(1);
  auto* hospitals = simulate->add_subcommand("hospitals", "Pooled robust estimates from many units");
  hospitals->add_option("--k", o.k)->capture_default_str();
  hospitals->add_option("--n", o.n)->capture_default_str();
  hospitals->add_option("--beta", o.beta, "Contamination law a,b")->capture_default_str();
  hospitals->add_option("--contamination", o.contamination, "Fixed contamination proportion");
  hospitals->add_option("--mcd-fraction", o.mcd_fraction)->capture_default_str();
  hospitals->add_option("--mcd-restarts", o.mcd_restarts)->capture_default_str();
  hospitals->add_flag("--raw-mcd", o.raw_mcd, "Skip the MCD consistency factor");
  hospitals->add_option("--alpha", o.sim_alpha)->capture_default_str();
  hospitals->add_option("--out", o.out)->required();
  trimming(hospitals);

  auto* consistency = simulate->add_subcommand("consistency", "Sample-size convergence harness");
  consistency->add_option("--n", o.n_values, "Comma-separated sample sizes")->capture_default_str();
  consistency->add_option("--alpha", o.sim_alpha)->capture_default_str();
  consistency->add_option("--reps", o.reps)->capture_default_str();
  consistency->add_option("--out", o.out)->required();
  trimming(consistency);

  auto* bary1d = app.add_subcommand("bary1d", "Quantile-average barycenter of 1D grids");
  bary1d->add_option("grids", o.grids)->required();
  bary1d->add_option("--weights", o.weights, "w1,w2,...")->required();
  bary1d->add_option("--out", o.out)->required();

  std::vector<const char*> argv{"wcons"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (distance->parsed()) return cmd_distance(o, out);
    if (bary->parsed()) return cmd_barycenter(o, out);
    if (trim->parsed()) return cmd_trim(o, out);
    if (curve->parsed()) return cmd_variance_curve(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    if (ellipse->parsed()) return cmd_ellipse(o, out);
    if (hospitals->parsed()) return cmd_hospitals(o, out);
    if (consistency->parsed()) return cmd_consistency(o, out);
    if (bary1d->parsed()) return cmd_bary1d(o, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.is_validation_error() ? kExitValidation : kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitValidation;
}

}  // namespace wcons::cli
