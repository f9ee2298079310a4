#include "jetext/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "jetext/batch.hpp"
#include "jetext/convex_extension.hpp"
#include "jetext/field.hpp"
#include "jetext/field_io.hpp"
#include "jetext/holder_probe.hpp"
#include "jetext/whitney_extension.hpp"

namespace jetext::cli {

using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string field_path;
  std::string mode = "general";
  std::string points_path;
  double eps_fraction = kDefaultEpsFraction;
  std::string modulus = "auto";
  std::vector<double> box;
  std::size_t res = 101;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::string out_path;

  double theta = 0.5;
  double probe_M = 1.0;
  double probe_eps = 0.5;
  double probe_v = 1.0;
  std::size_t probe_res = 10000;
};

std::optional<double> parse_modulus(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("--modulus must be \"auto\" or a positive number");
  }
  if (used != text.size() || !(value > 0.0) || !std::isfinite(value))
    throw UsageError("--modulus must be \"auto\" or a positive number");
  return value;
}

json real_or_null(std::optional<double> x) { return x ? json(*x) : json(nullptr); }

Box parse_box(const std::vector<double>& flat, std::size_t dim) {
  if (flat.size() != 2 * dim)
    throw UsageError("--box expects " + std::to_string(dim) + " lower then " + std::to_string(dim) +
                     " upper coordinates");
  Box box{Point(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(dim)),
          Point(flat.begin() + static_cast<std::ptrdiff_t>(dim), flat.end())};
  for (std::size_t k = 0; k < dim; ++k)
    if (!(box.lo[k] < box.hi[k])) throw UsageError("--box requires lo < hi on every axis");
  return box;
}

// Bounding box of the sites, widened by half its extent plus one.
Box default_box(const TaylorField1& field) {
  const std::size_t n = field.dim();
  Box box{field[0].s, field[0].s};
  for (const Site& site : field.sites())
    for (std::size_t k = 0; k < n; ++k) {
      box.lo[k] = std::min(box.lo[k], site.s[k]);
      box.hi[k] = std::max(box.hi[k], site.s[k]);
    }
  for (std::size_t k = 0; k < n; ++k) {
    const double pad = 0.5 * (box.hi[k] - box.lo[k]) + 1.0;
    box.lo[k] -= pad;
    box.hi[k] += pad;
  }
  return box;
}

void check_mode(const std::string& mode) {
  if (mode != "convex" && mode != "general") throw UsageError("--mode must be convex or general");
}

std::vector<GradientValue> evaluate(const TaylorField1& field, const Options& o,
                                    std::span<const Point> points) {
  const auto modulus = parse_modulus(o.modulus);
  if (o.mode == "convex") {
    const ConvexExtension ext = modulus ? ConvexExtension(field, *modulus, o.eps_fraction)
                                        : ConvexExtension(field, o.eps_fraction);
    return evaluate_batch(ext, points);
  }
  const WhitneyExtension ext = WhitneyExtension::build(field, o.eps_fraction, modulus);
  return evaluate_batch(ext, points);
}

void emit_csv(const Options& o, std::ostream& out, std::size_t dim, std::span<const Point> points,
              std::span<const GradientValue> values) {
  if (o.out_path.empty()) {
    write_evaluation_csv(out, dim, points, values);
    return;
  }
  std::ofstream file(o.out_path);
  if (!file) throw std::runtime_error("cannot open output file " + o.out_path);
  write_evaluation_csv(file, dim, points, values);
}

int cmd_constants(const Options& o, std::ostream& out) {
  const TaylorField1 field = load_field_document(o.field_path);
  const FieldConstants c = compute_constants(field);
  json report;
  report["K1"] = c.K1;
  report["K2"] = c.K2;
  report["gamma1"] = c.gamma1;
  report["m_star"] = c.convexity.feasible() ? json(*c.convexity.m_star) : json("infeasible");
  report["mu_bar"] = compute_mu_bar(c.K1, c.K2);
  out << report.dump() << '\n';
  return kOk;
}

int cmd_check_convexity(const Options& o, std::ostream& out) {
  const TaylorField1 field = load_field_document(o.field_path);
  const ConvexityModulus cm = smallest_convexity_modulus(field);
  json report;
  report["feasible"] = cm.feasible();
  report["m_star"] = cm.feasible() ? json(*cm.m_star) : json("infeasible");
  if (cm.witness) {
    report["witness"] = {cm.witness->first, cm.witness->second};
    report["witness_gap"] = cm.witness_gap;
  }
  out << report.dump() << '\n';
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  check_mode(o.mode);
  const TaylorField1 field = load_field_document(o.field_path);
  std::ifstream pts(o.points_path);
  if (!pts) throw UsageError("cannot open points file " + o.points_path);
  const std::vector<Point> points = parse_points_csv(pts, field.dim());
  const auto values = evaluate(field, o, points);
  emit_csv(o, out, field.dim(), points, values);
  return kOk;
}

int cmd_grid(const Options& o, std::ostream& out) {
  check_mode(o.mode);
  const TaylorField1 field = load_field_document(o.field_path);
  if (field.dim() > 2) return kDimensionTooLarge;
  const Box box = parse_box(o.box, field.dim());
  if (o.res < 2) throw UsageError("--res must be at least 2");
  const std::vector<Point> points = lattice(box.lo, box.hi, o.res);
  const auto values = evaluate(field, o, points);
  emit_csv(o, out, field.dim(), points, values);
  return kOk;
}

int cmd_certify(const Options& o, std::ostream& out) {
  const TaylorField1 field = load_field_document(o.field_path);
  const WhitneyExtension ext = WhitneyExtension::build(field, o.eps_fraction, parse_modulus(o.modulus));
  CertifyOptions opts;
  opts.n_samples = o.samples;
  opts.seed = o.seed;
  opts.box = o.box.empty() ? default_box(field) : parse_box(o.box, field.dim());
  const CertificationReport r = certify(ext, opts);
  json report;
  report["interp_value_resid"] = r.interp_value_resid;
  report["interp_grad_resid"] = r.interp_grad_resid;
  report["lip_grad_sampled"] = r.lip_grad_sampled;
  report["gamma1"] = r.gamma1;
  report["minimality_ratio"] = r.minimality_ratio;
  report["minimality_bound"] = kAlmostMinimalityFactor;
  report["semiconvex_sampled"] = r.semiconvex_sampled;
  report["semiconvex_bound"] = r.mu_bar;
  report["semiconcave_sampled"] = r.semiconcave_sampled;
  report["semiconcave_bound"] = r.semiconcave_bound;
  report["lipschitz_budget"] = r.lipschitz_budget;
  report["mu_bar"] = r.mu_bar;
  report["modulus"] = ext.modulus();
  report["samples"] = r.n_samples;
  report["seed"] = o.seed;
  report["box"] = {{"lo", opts.box.lo}, {"hi", opts.box.hi}};
  report["checks"] = {{"interpolation", r.interp_ok},
                      {"minimality_ratio", r.ratio_ok},
                      {"lipschitz", r.lipschitz_ok},
                      {"semiconvex", r.semiconvex_ok},
                      {"semiconcave", r.semiconcave_ok}};
  report["pass"] = r.pass;
  out << report.dump() << '\n';
  return r.pass ? kOk : kCertificationFailed;
}

int cmd_probe_holder(const Options& o, std::ostream& out) {
  HolderProbeConfig cfg;
  cfg.theta = o.theta;
  cfg.M = o.probe_M;
  cfg.eps = o.probe_eps;
  cfg.v = o.probe_v;
  cfg.grid_points = o.probe_res;
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const GridProbeResult grid = grid_sup_inf_conv(cfg);
  std::optional<LambdaProbeResult> probe;
  if (cfg.theta < 1.0) probe = find_positive_lambda(cfg);

  json report;
  report["value"] = grid.value;
  report["error_estimate"] = grid.error_estimate;
  report["verdict"] = std::string(to_string(grid.verdict));
  report["lambda_star"] = real_or_null(probe ? std::optional(probe->lambda_star) : std::nullopt);
  report["psi_star"] = real_or_null(probe ? std::optional(probe->psi_star) : std::nullopt);
  report["y_bar"] = probe_y_bar(cfg);
  report["prefactor"] = probe_prefactor(cfg);
  report["z_star"] = grid.z_star;
  report["halfwidth"] = grid.halfwidth;
  report["grid_points"] = cfg.grid_points;
  report["grid_nodes"] = grid.nodes;
  out << report.dump() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"C^{1,1} extensions of finite 1-Taylor fields", "jetext"};
  app.require_subcommand(1);
  Options o;

  auto add_field = [&](CLI::App* cmd) {
    cmd->add_option("field", o.field_path, "Field document (JSON)")->required();
  };
  auto add_eval_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", o.mode, "convex or general")->capture_default_str();
    cmd->add_option("--eps-fraction", o.eps_fraction, "eps = eps_fraction / M, in (0, 1)")
        ->capture_default_str();
    cmd->add_option("--modulus", o.modulus, "auto (smallest admissible) or a number")
        ->capture_default_str();
    cmd->add_option("--out", o.out_path, "Write CSV here instead of standard output");
  };

  auto* constants = app.add_subcommand("constants", "K1, K2, gamma1, smallest convex modulus, mu");
  add_field(constants);
  auto* check = app.add_subcommand("check-convexity", "Smallest convex modulus or infeasibility witness");
  add_field(check);

  auto* eval = app.add_subcommand("eval", "Evaluate the extension at listed points");
  add_field(eval);
  add_eval_flags(eval);
  eval->add_option("--points", o.points_path, "Headerless CSV, dim columns")->required();

  auto* grid = app.add_subcommand("grid", "Evaluate the extension on a lattice (n <= 2)");
  add_field(grid);
  add_eval_flags(grid);
  grid->add_option("--box", o.box, "lo.. hi..")->required()->expected(2, 64);
  grid->add_option("--res", o.res, "Nodes per axis")->capture_default_str();

  auto* cert = app.add_subcommand("certify", "Sampled certificate for the general extension");
  add_field(cert);
  cert->add_option("--samples", o.samples, "Random point pairs")->capture_default_str();
  cert->add_option("--seed", o.seed)->capture_default_str();
  cert->add_option("--box", o.box, "lo.. hi.. (default: padded site bounding box)")->expected(2, 64);
  cert->add_option("--eps-fraction", o.eps_fraction)->capture_default_str();
  cert->add_option("--modulus", o.modulus)->capture_default_str();

  auto* probe = app.add_subcommand("probe-holder", "Sup-inf convolution probe for C^{1,theta} data");
  probe->add_option("--theta", o.theta)->capture_default_str();
  probe->add_option("--modulus", o.probe_M, "M")->capture_default_str();
  probe->add_option("--eps", o.probe_eps)->capture_default_str();
  probe->add_option("--v", o.probe_v)->capture_default_str();
  probe->add_option("--res", o.probe_res, "Grid points")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    int code = kOk;
    if (*constants) code = cmd_constants(o, out);
    else if (*check) code = cmd_check_convexity(o, out);
    else if (*eval) code = cmd_eval(o, out);
    else if (*grid) code = cmd_grid(o, out);
    else if (*cert) code = cmd_certify(o, out);
    else if (*probe) code = cmd_probe_holder(o, out);
    if (code == kDimensionTooLarge) err << "error: grid output supports dimension 1 or 2 only\n";
    return code;
  } catch (const InfeasibleFieldError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasibleConvex;
  } catch (const FieldError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const PointsError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace jetext::cli
