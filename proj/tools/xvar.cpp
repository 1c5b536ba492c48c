// Command-line surface for the extreme-VaR bounds toolkit. Subcommands
// mirror the pipeline stages: estimate -> calibrate -> bounds, with
// tm-lp / sectors / simulate for the individual models and pipeline for
// the whole chain. Outputs are JSON (or CSV for tabular data) rounded to
// six significant digits so runs are byte-for-byte reproducible.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <xvar/calibration.hpp>
#include <xvar/closed_form.hpp>
#include <xvar/errors.hpp>
#include <xvar/estimation.hpp>
#include <xvar/json_io.hpp>
#include <xvar/sectors.hpp>
#include <xvar/simulate.hpp>
#include <xvar/spectral.hpp>
#include <xvar/subsets.hpp>
#include <xvar/tm_lp.hpp>

namespace {

struct GlobalOpts {
  std::uint64_t seed = 20240814;
  double q0 = 0.98;
  double xi = 0;  // 0 means not supplied
  std::string output;
  std::string format = "json";
};

// Flat-JSON config files: {"seed": 42, "q0": 0.99}. Flags given on the
// command line take precedence per the usual CLI11 rules.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    xvar::json doc = xvar::json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      if (!opt->results().empty())
        doc[opt->get_lnames()[0]] = opt->results()[0];
      else if (default_also && !opt->get_default_str().empty())
        doc[opt->get_lnames()[0]] = opt->get_default_str();
    }
    return doc.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    xvar::json doc;
    try {
      doc = xvar::json::parse(input);
    } catch (const xvar::json::parse_error& e) {
      throw CLI::FileError(std::string("config parse: ") + e.what());
    }
    if (!doc.is_object())
      throw CLI::FileError("config must be a flat JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.name = key;
      item.inputs = {value.is_string() ? value.get<std::string>()
                                       : value.dump()};
      items.push_back(std::move(item));
    }
    return items;
  }
};

void write_out(const std::string& output, const std::string& text) {
  if (output.empty())
    std::cout << text;
  else
    xvar::write_text_file(output, text);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// CSV rendering of a document: top-level scalars as key,value rows.
std::string doc_to_csv(xvar::json doc) {
  xvar::round_numbers(doc);
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object() || value.is_array()) continue;
    out << key << ',' << (value.is_string() ? value.get<std::string>() : value.dump())
        << '\n';
  }
  return out.str();
}

void emit_doc(const GlobalOpts& g, xvar::json doc) {
  write_out(g.output, g.format == "csv" ? doc_to_csv(std::move(doc))
                                        : xvar::dump_json(std::move(doc)));
}

double require_xi(const GlobalOpts& g, std::optional<double> from_doc) {
  if (g.xi > 0) return g.xi;
  if (from_doc && *from_doc > 0) return *from_doc;
  throw xvar::InvalidInput("tail index missing: pass --xi or put \"xi\" in the input");
}

void require_consistent(const xvar::SubsetFamily& family) {
  const auto report = xvar::check_consistency(family);
  if (!report.violations.empty()) {
    const auto& v = report.violations.front();
    throw xvar::InconsistentInput(
        "constraints fail consistency at " +
        xvar::subset_label(v.inequality_at) + " (slack " +
        format_number(v.slack) + "); run `xvar calibrate` first");
  }
  const auto mono = xvar::monotonicity_check(family);
  if (!mono.empty()) {
    const auto& v = mono.front();
    throw xvar::InconsistentInput(
        "constraints not monotone: " + xvar::subset_label(v.subset) +
        " exceeds " + xvar::subset_label(v.superset) +
        "; run `xvar calibrate` first");
  }
}

std::vector<xvar::SubsetId> default_sets(int d, bool include_full) {
  std::vector<xvar::SubsetId> sets;
  for (int j = 0; j < d; ++j) sets.push_back(xvar::SubsetId{1} << j);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      sets.push_back((xvar::SubsetId{1} << a) | (xvar::SubsetId{1} << b));
  if (include_full && d > 2) sets.push_back(xvar::full_set(d));
  return sets;
}

std::vector<xvar::SubsetId> sets_from_spec(const std::string& spec, int d) {
  if (spec == "pairs") return default_sets(d, true);
  if (spec == "all") {
    if (d > 14)
      throw xvar::InvalidInput("--sets all needs d <= 14; give a file instead");
    return xvar::enumerate_subsets(d);
  }
  const xvar::json doc = xvar::read_json_file(spec);
  if (!doc.is_array())
    throw xvar::InvalidInput(spec + ": expected an array of subsets");
  std::vector<xvar::SubsetId> sets;
  for (const auto& item : doc) sets.push_back(xvar::subset_from_json(item, d));
  return sets;
}

std::string panel_to_csv(const Eigen::MatrixXd& X,
                         const std::vector<std::string>& names) {
  std::ostringstream out;
  for (std::size_t j = 0; j < names.size(); ++j)
    out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      out << (j ? "," : "") << format_number(X(i, j));
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string data;
  std::string sets = "pairs";
  bool per_asset = false;
};

xvar::json estimate_report(const GlobalOpts& g, const EstimateArgs& a) {
  const xvar::LossPanel panel = xvar::read_loss_csv(a.data);
  if (panel.dropped_rows > 0)
    std::cerr << "note: dropped " << panel.dropped_rows
              << " rows with missing values\n";
  const xvar::TailModel model = xvar::common_xi_fit(panel, g.q0);
  const std::vector<double> w = xvar::scale_balanced_weights(model.sigma);

  xvar::LossPanel balanced = panel;
  for (int j = 0; j < panel.d(); ++j)
    balanced.X.col(j) *= w[static_cast<std::size_t>(j)];

  xvar::ThresholdOptions topts;
  topts.q0 = g.q0;
  topts.per_asset = a.per_asset;
  const xvar::SubsetFamily theta = xvar::estimate_extremal_coeffs(
      balanced, sets_from_spec(a.sets, panel.d()), topts);
  if (!xvar::check_consistency(theta).violations.empty())
    throw xvar::NumericalError("estimator output failed its consistency guarantee");

  xvar::json doc = xvar::estimates_to_json(model, theta, panel.names, w);
  doc["q0"] = g.q0;
  doc["n"] = panel.n();
  doc["dropped_rows"] = panel.dropped_rows;
  return doc;
}

struct CalibrateArgs {
  std::string input;
  double ridge = 1e-6;
};

xvar::json calibrate_report(const CalibrateArgs& a) {
  const xvar::json doc = xvar::read_json_file(a.input);
  std::optional<double> xi;
  if (doc.is_object() && doc.contains("xi")) xi = doc.at("xi").get<double>();
  const xvar::SubsetFamily raw = doc.contains("coefficients")
                                     ? xvar::constraints_from_json(doc).family
                                     : xvar::theta_from_estimates(doc);
  const xvar::CalibrationResult result = xvar::project_to_consistent(raw, a.ridge);
  xvar::json out = xvar::family_to_json(result.calibrated, xi);
  out["calibration"] = {{"ridge", a.ridge},
                        {"fit_residual", result.fit_residual},
                        {"singleton_scale", result.singleton_scale},
                        {"singleton_defect", result.singleton_defect},
                        {"nnls_iterations", result.nnls_iterations},
                        {"columns", result.columns.size()}};
  return out;
}

struct BoundsArgs {
  std::string constraints;
  std::string method = "auto";
  std::string curve;
  std::string curve_output;
  int grid = 200;
};

xvar::json bounds_report(const GlobalOpts& g, const BoundsArgs& a) {
  const xvar::ConstraintDoc cd =
      xvar::constraints_from_json(xvar::read_json_file(a.constraints));
  const double xi = require_xi(g, cd.xi);
  const xvar::SubsetFamily& family = cd.family;
  const int d = family.d;
  require_consistent(family);

  const bool has_full = family.has(xvar::full_set(d));
  const bool only_full_beyond_singletons = [&] {
    for (xvar::SubsetId s : family.sets)
      if (xvar::subset_size(s) > 1 && s != xvar::full_set(d)) return false;
    return has_full;
  }();

  std::string method = a.method;
  if (method == "auto")
    method = only_full_beyond_singletons || d == 1 ? "closed-form"
             : d <= 14                             ? "tm-lp"
             : has_full                            ? "closed-form"
                                                   : "frechet";

  double rho_lower = 0, rho_upper = 0;
  if (method == "frechet") {
    const auto fb = xvar::frechet_rho(std::vector<double>(static_cast<std::size_t>(d), 1.0), xi);
    rho_lower = fb.lower;
    rho_upper = fb.upper;
  } else if (method == "closed-form") {
    if (!has_full)
      throw xvar::InvalidInput(
          "closed-form bounds need the full-set coefficient; use tm-lp");
    const double theta_d = family.value_of(xvar::full_set(d));
    rho_lower = xvar::lower_bound_rho(d, xi, theta_d);
    rho_upper = xvar::upper_bound_rho(d, xi, theta_d);
  } else if (method == "tm-lp") {
    rho_lower = xvar::solve_lower_bound(family, xi).rho;
    rho_upper = has_full
                    ? xvar::upper_bound_rho(d, xi, family.value_of(xvar::full_set(d)))
                    : xvar::frechet_rho(std::vector<double>(static_cast<std::size_t>(d), 1.0), xi).upper;
  } else {
    throw xvar::InvalidInput("unknown method " + method);
  }

  if (a.curve == "theta") {
    if (!(xi <= 1))
      throw xvar::InvalidInput("theta curve needs xi in (0, 1]");
    std::ostringstream csv;
    csv << "theta,chi_lower,chi_upper\n";
    const int steps = std::max(a.grid, 2);
    for (int i = 0; i < steps; ++i) {
      const double theta = 1.0 + (d - 1.0) * i / (steps - 1.0);
      csv << format_number(theta) << ','
          << format_number(xvar::chi_from_rho(xvar::lower_bound_rho(d, xi, theta), xi))
          << ','
          << format_number(xvar::chi_from_rho(xvar::upper_bound_rho(d, xi, theta), xi))
          << '\n';
    }
    write_out(a.curve_output, csv.str());
  } else if (!a.curve.empty()) {
    throw xvar::InvalidInput("unknown curve variable " + a.curve);
  }

  return {{"d", d},
          {"xi", xi},
          {"method", method},
          {"rho_lower", rho_lower},
          {"rho_upper", rho_upper},
          {"chi_lower", xvar::chi_from_rho(rho_lower, xi)},
          {"chi_upper", xvar::chi_from_rho(rho_upper, xi)}};
}

struct TmLpArgs {
  std::string constraints;
  bool verify = false;
  std::string measure_output;
};

xvar::json tm_lp_report(const GlobalOpts& g, const TmLpArgs& a) {
  const xvar::ConstraintDoc cd =
      xvar::constraints_from_json(xvar::read_json_file(a.constraints));
  const double xi = require_xi(g, cd.xi);
  require_consistent(cd.family);

  const xvar::TmSolution sol = xvar::solve_lower_bound(cd.family, xi);
  xvar::json doc{{"d", cd.family.d},
                 {"xi", xi},
                 {"rho", sol.rho},
                 {"chi", sol.chi},
                 {"columns", (xvar::SubsetId{1} << cd.family.d) - 1},
                 {"iterations", sol.lp.iterations},
                 {"support_atoms", sol.measure.atoms.size()}};
  if (a.verify) {
    xvar::KktCertificate cert;
    cert.x.assign(sol.lp.y.data(), sol.lp.y.data() + sol.lp.y.size());
    cert.support = sol.measure;
    const xvar::KktReport rep = xvar::verify_kkt(cert, cd.family, xi, sol.rho);
    doc["kkt"] = {{"pass", rep.pass},
                  {"dual_feasibility", rep.dual_feasibility},
                  {"complementary_slackness", rep.complementary},
                  {"primal_feasibility", rep.primal_feasibility},
                  {"value_gap", rep.value_gap},
                  {"samples", rep.samples}};
  }
  if (!a.measure_output.empty())
    xvar::write_text_file(a.measure_output,
                          xvar::dump_json(xvar::measure_to_json(sol.measure)));
  return doc;
}

struct SectorsArgs {
  std::string spec;
  std::string curve;
  std::string curve_output;
  int grid = 200;
  std::string measure_output;
  std::string side = "lower";
};

xvar::json sectors_report(const GlobalOpts& g, const SectorsArgs& a) {
  const xvar::json doc = xvar::read_json_file(a.spec);
  if (!doc.is_object() || !doc.contains("blocks"))
    throw xvar::InvalidInput("partition spec needs \"blocks\"");

  int d = 0;
  for (const auto& block : doc.at("blocks"))
    for (const auto& e : block) d = std::max(d, e.get<int>());
  std::vector<xvar::SubsetId> blocks;
  for (const auto& block : doc.at("blocks"))
    blocks.push_back(xvar::subset_from_json(block, d));

  std::optional<double> doc_xi;
  if (doc.contains("xi")) doc_xi = doc.at("xi").get<double>();
  const double xi = require_xi(g, doc_xi);

  xvar::SectorPartition p;
  if (doc.contains("beta")) {
    p.d = d;
    p.blocks = blocks;
    p.beta = doc.at("beta").get<double>();
    p.sector_thetas = doc.at("sector_thetas").get<std::vector<double>>();
    p.validate();
  } else if (doc.contains("c0") && doc.contains("ci")) {
    p = xvar::solve_beta(doc.at("c0").get<double>(),
                         doc.at("ci").get<std::vector<double>>(), blocks, d);
  } else {
    throw xvar::InvalidInput(
        "partition spec needs either \"beta\"+\"sector_thetas\" or \"c0\"+\"ci\"");
  }

  const double rho_lower = xvar::composite_bound(p, xi, xvar::BoundSide::lower);
  const double rho_upper = xvar::composite_bound(p, xi, xvar::BoundSide::upper);

  if (a.curve == "beta") {
    std::ostringstream csv;
    csv << "beta,chi_lower,chi_upper\n";
    const int steps = std::max(a.grid, 2);
    xvar::SectorPartition sweep = p;
    for (int i = 0; i < steps; ++i) {
      sweep.beta = 0.999 * i / (steps - 1.0);
      csv << format_number(sweep.beta) << ','
          << format_number(xvar::chi_from_rho(
                 xvar::composite_bound(sweep, xi, xvar::BoundSide::lower), xi))
          << ','
          << format_number(xvar::chi_from_rho(
                 xvar::composite_bound(sweep, xi, xvar::BoundSide::upper), xi))
          << '\n';
    }
    write_out(a.curve_output, csv.str());
  } else if (!a.curve.empty()) {
    throw xvar::InvalidInput("unknown curve variable " + a.curve);
  }

  if (!a.measure_output.empty()) {
    const auto side =
        a.side == "upper" ? xvar::BoundSide::upper : xvar::BoundSide::lower;
    xvar::write_text_file(
        a.measure_output,
        xvar::dump_json(xvar::measure_to_json(xvar::composite_measure(p, side))));
  }

  return {{"d", p.d},
          {"xi", xi},
          {"beta", p.beta},
          {"sector_thetas", p.sector_thetas},
          {"theta_full", xvar::implied_full_coefficient(p)},
          {"rho_lower", rho_lower},
          {"rho_upper", rho_upper},
          {"chi_lower", xvar::chi_from_rho(rho_lower, xi)},
          {"chi_upper", xvar::chi_from_rho(rho_upper, xi)}};
}

struct SimulateArgs {
  std::string measure;
  std::string model = "rv";
  std::int64_t n = 100000;
};

void run_simulate(const GlobalOpts& g, const SimulateArgs& a) {
  const xvar::DiscreteSpectralMeasure H =
      xvar::measure_from_json(xvar::read_json_file(a.measure));
  Eigen::MatrixXd X;
  if (a.model == "rv") {
    X = xvar::sample_rv_portfolio(H, require_xi(g, std::nullopt), a.n, g.seed);
  } else if (a.model == "max-stable") {
    X = xvar::sample_max_stable(H, a.n, g.seed);
  } else {
    throw xvar::InvalidInput("unknown model " + a.model);
  }
  std::vector<std::string> names;
  for (int j = 1; j <= H.d; ++j) names.push_back("X" + std::to_string(j));
  write_out(g.output, panel_to_csv(X, names));
}

struct PipelineArgs {
  std::string data;
  double ridge = 1e-6;
  std::vector<double> years{1, 5, 10, 50, 100};
};

xvar::json pipeline_report(const GlobalOpts& g, const PipelineArgs& a) {
  EstimateArgs est;
  est.data = a.data;
  xvar::json report;
  report["estimates"] = estimate_report(g, est);
  const xvar::json& est_doc = report["estimates"];
  const int d = est_doc.at("d").get<int>();
  const double xi = est_doc.at("xi").get<double>();

  xvar::SubsetFamily raw = xvar::theta_from_estimates(est_doc);
  const xvar::CalibrationResult calres = xvar::project_to_consistent(raw, a.ridge);
  report["calibrated"] = xvar::family_to_json(calres.calibrated);
  report["calibration"] = {{"ridge", a.ridge},
                           {"fit_residual", calres.fit_residual},
                           {"singleton_scale", calres.singleton_scale},
                           {"singleton_defect", calres.singleton_defect}};

  if (!(xi > 0) || xi > 1)
    throw xvar::DataError("fitted tail index outside (0, 1]; constrained "
                          "bounds are undefined for this panel");

  const double theta_d = calres.calibrated.has(xvar::full_set(d))
                             ? calres.calibrated.value_of(xvar::full_set(d))
                             : 1.0 * d;
  const double rho_l = xvar::lower_bound_rho(d, xi, theta_d);
  const double rho_u = xvar::upper_bound_rho(d, xi, theta_d);
  report["bounds"]["d_variate"] = {{"theta", theta_d},
                                   {"rho_lower", rho_l},
                                   {"rho_upper", rho_u},
                                   {"chi_lower", xvar::chi_from_rho(rho_l, xi)},
                                   {"chi_upper", xvar::chi_from_rho(rho_u, xi)}};
  double chi_l = xvar::chi_from_rho(rho_l, xi);
  double chi_u = xvar::chi_from_rho(rho_u, xi);

  if (d >= 2 && d <= 14) {
    xvar::SubsetFamily pairs;
    pairs.d = d;
    for (std::size_t i = 0; i < calres.calibrated.size(); ++i)
      if (xvar::subset_size(calres.calibrated.sets[i]) <= 2)
        pairs.add(calres.calibrated.sets[i], calres.calibrated.values[i]);
    pairs.finalize();
    const xvar::TmSolution lp = xvar::solve_lower_bound(pairs, xi);
    report["bounds"]["bivariate_lp"] = {{"rho_lower", lp.rho},
                                        {"chi_lower", lp.chi},
                                        {"support_atoms", lp.measure.atoms.size()}};
    chi_l = std::max(chi_l, lp.chi);
  }

  // VaR curves: bound on VaR_q of the balanced portfolio sum against the
  // GP-implied and empirical baselines VaR_q(w_1 X_1).
  const xvar::LossPanel panel = xvar::read_loss_csv(a.data);
  const std::vector<double> w =
      est_doc.at("weights").get<std::vector<double>>();
  xvar::TailModel model;
  model.xi = xi;
  model.sigma = est_doc.at("sigma").get<std::vector<double>>();
  model.p0 = est_doc.at("p0").get<double>();
  std::vector<double> ref(static_cast<std::size_t>(panel.n()));
  for (std::int64_t i = 0; i < panel.n(); ++i)
    ref[static_cast<std::size_t>(i)] = w[0] * panel.X(i, 0);
  report["var_curves"] = xvar::json::array();
  for (double q : {0.985, 0.99, 0.995, 0.999, 0.9995, 0.9999}) {
    const double base_gp = xvar::baseline_var_gp(model, w[0], q);
    const double base_emp = xvar::empirical_var(ref, q);
    report["var_curves"].push_back({{"q", q},
                                    {"baseline_gp", base_gp},
                                    {"baseline_empirical", base_emp},
                                    {"lower_gp", chi_l * base_gp},
                                    {"upper_gp", chi_u * base_gp},
                                    {"lower_empirical", chi_l * base_emp},
                                    {"upper_empirical", chi_u * base_emp}});
  }

  report["return_levels"] = xvar::json::array();
  for (const auto& row :
       xvar::return_level_bounds(model, w[0], {chi_l, chi_u}, a.years)) {
    report["return_levels"].push_back({{"years", row.years},
                                       {"q", row.q},
                                       {"baseline", row.baseline},
                                       {"lower", row.levels[0]},
                                       {"upper", row.levels[1]}});
  }
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;
  CLI::App app{"Sharp bounds on extreme Value-at-Risk under extremal-coefficient constraints"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "flat JSON config file")->envname("XVAR_CONFIG");
  app.add_option("--seed", g.seed, "random seed")->envname("XVAR_SEED");
  app.add_option("--q0", g.q0, "threshold quantile for tail fits and counting")
      ->check(CLI::Range(0.5, 0.999999))
      ->envname("XVAR_Q0");
  app.add_option("--xi", g.xi, "tail index (overrides any value in inputs)")
      ->check(CLI::PositiveNumber)
      ->envname("XVAR_XI");
  app.add_option("--output,-o", g.output, "output path (default stdout)")
      ->envname("XVAR_OUTPUT");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("XVAR_FORMAT");

  EstimateArgs est_args;
  auto* est = app.add_subcommand(
      "estimate", "Fit tails and count extremal coefficients from a loss CSV");
  est->fallthrough();
  est->add_option("--data", est_args.data, "loss panel CSV")->required();
  est->add_option("--sets", est_args.sets,
                  "coefficient sets: pairs, all, or a JSON file of subsets");
  est->add_flag("--per-asset-thresholds", est_args.per_asset,
                "threshold each margin at its own q0-quantile");
  est->callback([&] { emit_doc(g, estimate_report(g, est_args)); });

  CalibrateArgs cal_args;
  auto* cal = app.add_subcommand(
      "calibrate", "Project raw coefficient estimates onto the consistent cone");
  cal->fallthrough();
  cal->add_option("--input", cal_args.input,
                  "estimates JSON (or a constraints document)")
      ->required();
  cal->add_option("--ridge", cal_args.ridge, "ridge regularization weight")
      ->check(CLI::NonNegativeNumber);
  cal->callback([&] { emit_doc(g, calibrate_report(cal_args)); });

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand(
      "bounds", "Extreme-VaR bounds from a constraints document");
  bounds->fallthrough();
  bounds->add_option("--constraints", bounds_args.constraints)->required();
  bounds->add_option("--method", bounds_args.method)
      ->check(CLI::IsMember({"auto", "closed-form", "tm-lp", "frechet"}));
  bounds->add_option("--curve", bounds_args.curve,
                     "emit a CSV curve over this variable (theta)");
  bounds->add_option("--curve-output", bounds_args.curve_output,
                     "path for the curve CSV (default stdout)");
  bounds->add_option("--grid", bounds_args.grid, "curve grid points")
      ->check(CLI::Range(2, 100000));
  bounds->callback([&] { emit_doc(g, bounds_report(g, bounds_args)); });

  TmLpArgs tm_args;
  auto* tm = app.add_subcommand(
      "tm-lp", "Sharp lower bound by linear programming over the subset lattice");
  tm->fallthrough();
  tm->add_option("--constraints", tm_args.constraints)->required();
  tm->add_flag("--verify", tm_args.verify, "check the optimality certificate");
  tm->add_option("--measure-output", tm_args.measure_output,
                 "write the attaining spectral measure to this path");
  tm->callback([&] { emit_doc(g, tm_lp_report(g, tm_args)); });

  SectorsArgs sec_args;
  auto* sec = app.add_subcommand(
      "sectors", "Composite bounds for the market-plus-sectors model");
  sec->fallthrough();
  sec->add_option("--spec", sec_args.spec, "partition JSON")->required();
  sec->add_option("--curve", sec_args.curve,
                  "emit a CSV curve over this variable (beta)");
  sec->add_option("--curve-output", sec_args.curve_output);
  sec->add_option("--grid", sec_args.grid)->check(CLI::Range(2, 100000));
  sec->add_option("--measure-output", sec_args.measure_output,
                  "write the composite attaining measure to this path");
  sec->add_option("--side", sec_args.side, "measure side")
      ->check(CLI::IsMember({"lower", "upper"}));
  sec->callback([&] { emit_doc(g, sectors_report(g, sec_args)); });

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand(
      "simulate", "Sample losses from a discrete spectral measure (CSV output)");
  sim->fallthrough();
  sim->add_option("--measure", sim_args.measure, "spectral measure JSON")
      ->required();
  sim->add_option("--model", sim_args.model)
      ->check(CLI::IsMember({"rv", "max-stable"}));
  sim->add_option("-n,--samples", sim_args.n, "number of draws")
      ->check(CLI::PositiveNumber);
  sim->callback([&] { run_simulate(g, sim_args); });

  PipelineArgs pipe_args;
  auto* pipe = app.add_subcommand(
      "pipeline", "Full chain: estimate, calibrate, bound, and tabulate");
  pipe->fallthrough();
  pipe->add_option("--data", pipe_args.data, "loss panel CSV")->required();
  pipe->add_option("--ridge", pipe_args.ridge)->check(CLI::NonNegativeNumber);
  pipe->add_option("--years", pipe_args.years, "return-level horizons")
      ->delimiter(',');
  pipe->callback([&] { emit_doc(g, pipeline_report(g, pipe_args)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const xvar::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const xvar::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const xvar::InconsistentInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const xvar::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
