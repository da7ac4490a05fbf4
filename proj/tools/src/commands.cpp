#include "commands.hpp"

#include "io.hpp"

#include "ridgekit/active_subspace.hpp"
#include "ridgekit/oracle.hpp"
#include "ridgekit/polyridge.hpp"
#include "ridgekit/sampling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ridgekit::cli {

namespace {

// Gradient norms below this count as zero when checking an exact ridge.
constexpr double kBoundTolerance = 1e-6;
constexpr double kTailFloor = 1e-12;

constexpr std::size_t kShadowCurvePoints = 200;
constexpr std::size_t kShadowGridSide = 50;

struct Options {
  // sample
  std::string design = "lhs";
  std::size_t count = 100;
  std::size_t dim_m = 0;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string function;
  std::vector<double> params;
  std::string grads_out;
  // subspace
  std::string grads;
  std::size_t bootstrap = kDefaultBootstrapReplicates;
  std::size_t max_n = 0;
  // fit
  std::string samples;
  std::size_t n = 1;
  std::size_t degree = 2;
  std::size_t iters = kDefaultIterations;
  std::string init = "active";
  std::string spectrum;
  std::string history;
  // predict / testerror / shadow
  std::string model;
  // sweep / checkbound
  std::size_t angles = 101;
  std::size_t quad_outer = 201;
  std::size_t quad_inner = 0;
  double lipschitz = 0.0;
  // shared
  std::uint64_t seed = 0;
  std::string out;
};

TestFunction resolve_function(const Options& o) {
  try {
    return builtin(o.function, o.params);
  } catch (const Error& e) {
    throw CliError(kUnsupported, e.what());
  }
}

LabeledSamples labeled(const Table& t, bool need_f) {
  LabeledSamples s{t.numbered("x"), Vector()};
  const Eigen::Index fc = t.column("f");
  if (fc >= 0) {
    s.f = t.values.col(fc);
  } else if (need_f) {
    throw CliError(kParseError, "samples file has no f column");
  }
  return s;
}

void check_model_dim(const RidgeModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.u.ambient_dim()) {
    throw CliError(kDimensionMismatch, "model has m=" + std::to_string(model.u.ambient_dim()) + " but data has " +
                                           std::to_string(x.cols()) + " columns");
  }
}

int cmd_sample(const Options& o) {
  if (o.count == 0 || o.dim_m == 0) throw CliError(kParseError, "--count and --dim must be positive");
  Design d;
  if (o.design == "lhs") {
    d = latin_hypercube(o.count, o.dim_m, o.seed);
  } else if (o.design == "uniform") {
    d = uniform_design(o.count, o.dim_m, o.seed);
  } else {
    d = gaussian_design(o.count, o.dim_m, o.seed);
  }
  if (!o.lo.empty() || !o.hi.empty()) {
    if (o.design == "gaussian") throw CliError(kParseError, "--lo/--hi apply to lhs and uniform designs only");
    auto bound = [&](const std::vector<double>& v, const char* name) {
      if (v.size() == 1) return Vector(Vector::Constant(static_cast<Eigen::Index>(o.dim_m), v[0]));
      if (v.size() != o.dim_m) throw CliError(kParseError, std::string(name) + " needs 1 or m values");
      return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    if (o.lo.empty() || o.hi.empty()) throw CliError(kParseError, "--lo and --hi go together");
    try {
      d = scale_to_box(d, bound(o.lo, "--lo"), bound(o.hi, "--hi"));
    } catch (const Error& e) {
      throw CliError(kParseError, e.what());
    }
  }

  std::vector<std::string> header = numbered_header("x", d.points.cols());
  Matrix table = d.points;
  if (!o.function.empty()) {
    const TestFunction f = resolve_function(o);
    if (f.dim != o.dim_m) throw CliError(kDimensionMismatch, "function " + f.name + " has m=" + std::to_string(f.dim));
    table.conservativeResize(Eigen::NoChange, table.cols() + 1);
    table.col(table.cols() - 1) = f.values(d.points);
    header.push_back("f");
    if (!o.grads_out.empty()) {
      write_text(o.grads_out, csv_text(numbered_header("g", d.points.cols()), f.gradients(d.points)));
    }
  } else if (!o.grads_out.empty()) {
    throw CliError(kParseError, "--grads-out requires --function");
  }
  write_text(o.out, csv_text(header, table));
  return kOk;
}

int cmd_subspace(const Options& o, std::ostream& err) {
  const Table t = read_csv(o.grads);
  GradientSet g = [&] {
    try {
      return GradientSet(t.numbered("g"));
    } catch (const Error& e) {
      throw CliError(kParseError, e.what());
    }
  }();
  const SpectrumEstimate est = estimate_C(g);
  std::optional<std::size_t> suggested;
  if (est.spectrum.size() >= 2) {
    try {
      suggested = choose_n(est.spectrum, o.max_n == 0 ? est.spectrum.size() - 1 : o.max_n);
    } catch (const Error&) {
      err << "warning: no spectral gap; suggested_n is null\n";
    }
  }
  std::optional<BootstrapSummary> boot;
  if (o.bootstrap > 0 && est.spectrum.size() >= 2) boot = bootstrap_spectrum(g, o.bootstrap, o.seed);
  write_json(o.out, spectrum_to_json(est.spectrum, suggested, boot ? &*boot : nullptr));
  return kOk;
}

int cmd_fit(const Options& o) {
  const LabeledSamples s = labeled(read_csv(o.samples), true);
  const std::size_t m = s.dim();
  if (o.n < 1 || o.n >= m) throw CliError(kDimensionMismatch, "--dim must satisfy 1 <= n < m");

  Frame u0 = Frame::identity(m, o.n);
  if (o.init == "active") {
    if (o.spectrum.empty()) throw CliError(kMissingInput, "--init active requires --spectrum");
    const SpectrumFile sp = spectrum_from_json(read_json(o.spectrum));
    if (sp.spectrum.size() != m) {
      throw CliError(kDimensionMismatch, "spectrum has m=" + std::to_string(sp.spectrum.size()) + ", samples have " +
                                             std::to_string(m));
    }
    try {
      u0 = sp.spectrum.leading(o.n);
    } catch (const Error& e) {
      throw CliError(kParseError, std::string("spectrum eigenvectors: ") + e.what());
    }
  } else if (o.init == "random") {
    u0 = random_frame(m, o.n, o.seed);
  }

  RidgeModel model = alternate_fit(s, o.n, o.degree, u0, o.iters);
  model.init = o.init;
  model.seed = o.seed;
  const double final_residual = model.history.back().residual;
  write_json(o.out, model_to_json(model, final_residual));

  if (!o.history.empty()) {
    std::ostringstream h;
    h << "iter,phase,residual\n";
    for (const HistoryEntry& e : model.history) {
      h << e.iteration << ',' << (e.phase == FitPhase::theta ? "theta" : "grassmann") << ','
        << format_double(e.residual) << '\n';
    }
    write_text(o.history, h.str());
  }
  return kOk;
}

int cmd_predict(const Options& o) {
  const RidgeModel model = model_from_json(read_json(o.model));
  const Matrix x = read_csv(o.samples).numbered("x");
  check_model_dim(model, x);
  write_text(o.out, csv_text({"fhat"}, model.predict(x)));
  return kOk;
}

int cmd_testerror(const Options& o, std::ostream& out) {
  const RidgeModel model = model_from_json(read_json(o.model));
  const Table t = read_csv(o.samples);
  check_model_dim(model, t.numbered("x"));
  const LabeledSamples s = labeled(t, true);
  double e = 0.0;
  try {
    e = test_error(model, s);
  } catch (const Error& ex) {
    throw CliError(kUnsupported, ex.what());
  }
  const Json report{{"mean_relative_error", e}};
  if (o.out.empty()) {
    out << report.dump() << '\n';
  } else {
    write_json(o.out, report);
  }
  return kOk;
}

int cmd_shadow(const Options& o) {
  const RidgeModel model = model_from_json(read_json(o.model));
  const std::size_t n = model.u.dim();
  if (n > 2) throw CliError(kUnsupported, "shadow plots require n <= 2");
  const Table t = read_csv(o.samples);
  check_model_dim(model, t.numbered("x"));
  const LabeledSamples s = labeled(t, true);

  const Matrix y = s.x * model.u.matrix();
  const Vector lo = y.colwise().minCoeff();
  const Vector hi = y.colwise().maxCoeff();
  auto grid_point = [&](Eigen::Index j, std::size_t k, std::size_t side) {
    return side == 1 ? lo(j) : lo(j) + (hi(j) - lo(j)) * static_cast<double>(k) / static_cast<double>(side - 1);
  };

  Matrix grid;
  if (n == 1) {
    grid.resize(static_cast<Eigen::Index>(kShadowCurvePoints), 1);
    for (std::size_t k = 0; k < kShadowCurvePoints; ++k) grid(static_cast<Eigen::Index>(k), 0) = grid_point(0, k, kShadowCurvePoints);
  } else {
    grid.resize(static_cast<Eigen::Index>(kShadowGridSide * kShadowGridSide), 2);
    for (std::size_t a = 0; a < kShadowGridSide; ++a) {
      for (std::size_t b = 0; b < kShadowGridSide; ++b) {
        const auto row = static_cast<Eigen::Index>(a * kShadowGridSide + b);
        grid(row, 0) = grid_point(0, a, kShadowGridSide);
        grid(row, 1) = grid_point(1, b, kShadowGridSide);
      }
    }
  }
  const Vector curve = model.poly.evaluate(grid);

  std::ostringstream os;
  os << "kind," << (n == 1 ? "y" : "y1,y2") << ",f\n";
  auto emit = [&](const char* kind, const Matrix& pts, const Vector& f) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      os << kind;
      for (Eigen::Index j = 0; j < pts.cols(); ++j) os << ',' << format_double(pts(i, j));
      os << ',' << format_double(f(i)) << '\n';
    }
  };
  emit("sample", y, s.f);
  emit("model", grid, curve);
  write_text(o.out, os.str());
  return kOk;
}

int cmd_sweep(const Options& o) {
  if (o.angles < 2 || o.quad_outer < 1) throw CliError(kParseError, "--angles must be >= 2 and --quad-outer >= 1");
  const std::size_t inner = o.quad_inner == 0 ? o.quad_outer : o.quad_inner;
  const SweepTable table = sweep_angle(bivariate(), o.angles, o.quad_outer, inner);
  Matrix values(static_cast<Eigen::Index>(table.size()), 2);
  for (std::size_t i = 0; i < table.size(); ++i) {
    values(static_cast<Eigen::Index>(i), 0) = table[i].alpha;
    values(static_cast<Eigen::Index>(i), 1) = table[i].r;
  }
  write_text(o.out, csv_text({"alpha", "R"}, values));
  return kOk;
}

int cmd_checkbound(const Options& o, std::ostream& out) {
  const TestFunction f = resolve_function(o);
  const std::size_t m = f.dim;
  if (m > 3) throw CliError(kUnsupported, "checkbound supports m <= 3");
  if (o.n < 1 || o.n >= m) throw CliError(kDimensionMismatch, "--dim must satisfy 1 <= n < m");
  const GaussHermiteRule outer = gauss_hermite(o.quad_outer);
  const GaussHermiteRule inner = o.quad_inner == 0 ? outer : gauss_hermite(o.quad_inner);

  const SpectrumEstimate c = estimate_C_quadrature(f, outer);
  // Eigenvalues at roundoff level relative to lambda_1 are zero; the bound
  // takes their square root, which would turn 1e-16 into 1e-8.
  const double floor = kTailFloor * c.spectrum.eigenvalues(0);
  std::vector<double> tail;
  for (std::size_t k = o.n; k < m; ++k) {
    const double lambda = c.spectrum.eigenvalues(static_cast<Eigen::Index>(k));
    tail.push_back(lambda <= floor ? 0.0 : lambda);
  }

  double l = o.lipschitz;
  if (l <= 0.0) {
    // Largest gradient norm over the outer tensor nodes.
    Matrix nodes(static_cast<Eigen::Index>(std::pow(outer.order(), m)), static_cast<Eigen::Index>(m));
    for (Eigen::Index row = 0; row < nodes.rows(); ++row) {
      Eigen::Index code = row;
      for (Eigen::Index j = 0; j < nodes.cols(); ++j) {
        nodes(row, j) = outer.nodes(code % outer.nodes.size());
        code /= outer.nodes.size();
      }
    }
    l = lipschitz_estimate(GradientSet(f.gradients(nodes)));
  }

  const GrassmannGradient g = grassmann_grad_R_fd(f, c.spectrum.trailing(o.n), kDefaultFdStep, outer, inner);
  const double bound = near_stationary_bound(l, m, o.n, tail);
  const Json report{
      {"function", f.name},
      {"m", m},
      {"n", o.n},
      {"quad_outer", outer.order()},
      {"quad_inner", inner.order()},
      {"eigenvalues", std::vector<double>(c.spectrum.eigenvalues.data(), c.spectrum.eigenvalues.data() + m)},
      {"lipschitz", l},
      {"gradient_norm", g.norm},
      {"bound", bound},
      {"tolerance", kBoundTolerance},
      {"ok", g.norm <= std::max(bound, kBoundTolerance)},
  };
  if (o.out.empty()) {
    out << report.dump(2) << '\n';
  } else {
    write_json(o.out, report);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ridge approximation with active-subspace initialization", "ridgekit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ridgekit 0.1.0");
  Options o;

  auto* sample = app.add_subcommand("sample", "Write a design of experiments as CSV");
  sample->add_option("--design", o.design, "lhs, uniform or gaussian")
      ->check(CLI::IsMember({"lhs", "uniform", "gaussian"}))
      ->capture_default_str();
  sample->add_option("--count", o.count, "Number of samples M")->capture_default_str();
  sample->add_option("--dim", o.dim_m, "Ambient dimension m")->required();
  sample->add_option("--lo", o.lo, "Box lower bounds (one value or m)")->delimiter(',');
  sample->add_option("--hi", o.hi, "Box upper bounds (one value or m)")->delimiter(',');
  sample->add_option("--function", o.function, "Builtin function to evaluate into an f column");
  sample->add_option("--params", o.params, "Builtin function parameters")->delimiter(',');
  sample->add_option("--grads-out", o.grads_out, "Also write gradients g1..gm here");
  sample->add_option("--seed", o.seed)->capture_default_str();
  sample->add_option("--out", o.out)->required();

  auto* subspace = app.add_subcommand("subspace", "Estimate C and its spectrum from gradient samples");
  subspace->add_option("--grads", o.grads, "CSV with columns g1..gm")->required();
  subspace->add_option("--bootstrap", o.bootstrap, "Bootstrap replicates (0 disables)")->capture_default_str();
  subspace->add_option("--max-n", o.max_n, "Largest n considered by the gap rule (default m-1)");
  subspace->add_option("--seed", o.seed)->capture_default_str();
  subspace->add_option("--out", o.out)->required();

  auto* fit = app.add_subcommand("fit", "Fit a polynomial ridge approximation");
  fit->add_option("--samples", o.samples, "CSV with columns x1..xm,f")->required();
  fit->add_option("--dim", o.n, "Subspace dimension n")->capture_default_str();
  fit->add_option("--degree", o.degree, "Total polynomial degree N")->capture_default_str();
  fit->add_option("--iters", o.iters, "Alternating iterations P")->capture_default_str();
  fit->add_option("--init", o.init, "active, identity or random")
      ->check(CLI::IsMember({"active", "identity", "random"}))
      ->capture_default_str();
  fit->add_option("--spectrum", o.spectrum, "Spectrum JSON for --init active");
  fit->add_option("--seed", o.seed)->capture_default_str();
  fit->add_option("--history", o.history, "Residual history CSV");
  fit->add_option("--out", o.out, "Model JSON")->required();

  auto* predict = app.add_subcommand("predict", "Evaluate a fitted model");
  predict->add_option("--model", o.model)->required();
  predict->add_option("--samples", o.samples, "CSV with columns x1..xm")->required();
  predict->add_option("--out", o.out)->required();

  auto* testerror = app.add_subcommand("testerror", "Mean relative error of a model on labeled data");
  testerror->add_option("--model", o.model)->required();
  testerror->add_option("--samples", o.samples, "CSV with columns x1..xm,f")->required();
  testerror->add_option("--out", o.out, "Write the report here instead of stdout");

  auto* shadow = app.add_subcommand("shadow", "Shadow-plot data for n = 1 or 2");
  shadow->add_option("--model", o.model)->required();
  shadow->add_option("--samples", o.samples, "CSV with columns x1..xm,f")->required();
  shadow->add_option("--out", o.out)->required();

  auto* sweep = app.add_subcommand("sweep", "R(alpha) over [0, pi] for the bivariate example");
  sweep->add_option("--angles", o.angles)->capture_default_str();
  sweep->add_option("--quad-outer", o.quad_outer)->capture_default_str();
  sweep->add_option("--quad-inner", o.quad_inner, "Defaults to --quad-outer");
  sweep->add_option("--out", o.out)->required();

  auto* checkbound = app.add_subcommand("checkbound", "Gradient norm at W2 against the near-stationary bound");
  checkbound->add_option("--function", o.function, "Builtin function")->required();
  checkbound->add_option("--params", o.params)->delimiter(',');
  checkbound->add_option("--dim", o.n, "Subspace dimension n")->capture_default_str();
  checkbound->add_option("--quad-outer", o.quad_outer)->capture_default_str();
  checkbound->add_option("--quad-inner", o.quad_inner, "Defaults to --quad-outer");
  checkbound->add_option("--lipschitz", o.lipschitz, "Override the Lipschitz constant");
  checkbound->add_option("--out", o.out, "Write the report here instead of stdout");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  try {
    if (*sample) return cmd_sample(o);
    if (*subspace) return cmd_subspace(o, err);
    if (*fit) return cmd_fit(o);
    if (*predict) return cmd_predict(o);
    if (*testerror) return cmd_testerror(o, out);
    if (*shadow) return cmd_shadow(o);
    if (*sweep) return cmd_sweep(o);
    if (*checkbound) return cmd_checkbound(o, out);
  } catch (const CliError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace ridgekit::cli
