// Command-line front end: sampling, estimation, condition checks, bias
// reports, experiment configs and the identity checks.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "invdiv/bias.hpp"
#include "invdiv/conditions.hpp"
#include "invdiv/csv.hpp"
#include "invdiv/errors.hpp"
#include "invdiv/estimator.hpp"
#include "invdiv/experiment.hpp"
#include "invdiv/model_spec.hpp"

namespace fs = std::filesystem;
using namespace invdiv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;  // a requested verdict could not be computed, or a check failed
constexpr int kExitUsage = 2;    // bad arguments, specs or configuration

struct Globals {
  std::uint64_t seed = 1;
  bool seed_given = false;
  unsigned threads = 1;
  std::string out_dir;
};

// Table to <out-dir>/<name> when an output directory was given, else stdout.
void emit(const Globals& g, const std::string& name, const CsvTable& table) {
  if (g.out_dir.empty()) {
    std::cout << write_csv(table);
    return;
  }
  const fs::path p = fs::path(g.out_dir) / name;
  save_csv(table, p);
  std::cerr << "wrote " << p.string() << "\n";
}

void emit_text(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out_dir.empty()) return;
  const fs::path p = fs::path(g.out_dir) / name;
  write_text_file(p, text);
  std::cerr << "wrote " << p.string() << "\n";
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::string_view s = text;
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  while (!s.empty()) {
    const std::size_t comma = s.find(',');
    const std::string_view item = s.substr(0, comma);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size())
      throw ParseError("not a number: '" + std::string(item) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ParseError("empty number list");
  return out;
}

// ---- sample ----------------------------------------------------------------

struct SampleArgs {
  std::string model;
  std::size_t n = 1000;
  std::uint64_t stream = 0;
  std::string outlier;
  double eps = 0.0;
};

int run_sample(const Globals& g, const SampleArgs& a) {
  const ModelSpec model = ModelSpec::parse(a.model);
  RngStream rng(g.seed, a.stream);
  LabeledSample s;
  const bool labelled = !a.outlier.empty();
  if (labelled)
    s = sample_contaminated(model, ModelSpec::parse(a.outlier), a.eps, a.n, rng);
  else
    s = sample_model(ModelSampler(model), a.n, rng);
  CsvTable t;
  for (std::size_t j = 0; j < s.dim; ++j) t.header.push_back("dim_" + std::to_string(j + 1));
  if (labelled) t.header.push_back("label");
  for (std::size_t i = 0; i < s.n; ++i) {
    std::vector<std::string> row;
    for (double v : s.row(i)) row.push_back(format_number(v));
    if (labelled) row.push_back(std::to_string(s.labels[i]));
    t.rows.push_back(std::move(row));
  }
  emit(g, "sample.csv", t);
  return kExitOk;
}

// ---- estimate --------------------------------------------------------------

struct EstimateArgs {
  std::string data;
  std::string divergence = "inverse";
  std::string lambda = "1";
  std::string f = "identity";
  double tol = 1e-10;
  int max_iter = 500;
  int multistart = 0;
  bool trace = false;
};

int run_estimate(const Globals& g, const EstimateArgs& a) {
  const CsvTable data = load_csv(a.data);
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < data.header.size(); ++c)
    if (data.header[c] != "label") cols.push_back(c);
  if (cols.empty()) throw ParseError(a.data + ": no data columns");
  std::vector<double> points;
  for (const auto& row : data.rows)
    for (std::size_t c : cols) points.push_back(parse_numbers(row[c]).front());

  const EstimationProblem problem(std::move(points), cols.size(), parse_divergence(a.divergence),
                                  parse_numbers(a.lambda), parse_f(a.f));
  SolverOptions opts;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;
  opts.multistart = a.multistart;
  opts.trace = a.trace;
  const EstimateResult r = solve(problem, opts);

  CsvTable t;
  std::vector<std::string> row;
  for (std::size_t j = 0; j < r.theta_hat.size(); ++j) {
    t.header.push_back("theta_" + std::to_string(j + 1));
    row.push_back(format_number(r.theta_hat[j]));
  }
  t.header.insert(t.header.end(), {"iterations", "residual_norm", "converged", "loss", "note"});
  row.insert(row.end(), {std::to_string(r.iterations), format_number(r.residual_norm),
                         r.converged ? "1" : "0", format_number(r.loss), r.note});
  t.rows.push_back(std::move(row));
  emit(g, "estimate.csv", t);

  if (a.trace) {
    CsvTable tr;
    tr.header = {"iteration", "weight_min", "weight_max", "weight_mean"};
    for (std::size_t i = 0; i < r.weight_trace.size(); ++i) {
      const WeightSummary& w = r.weight_trace[i];
      tr.rows.push_back({std::to_string(i), format_number(w.min), format_number(w.max),
                         format_number(w.mean)});
    }
    if (g.out_dir.empty()) std::cout << "\n";
    emit(g, "estimate_trace.csv", tr);
  }
  if (!r.converged) std::cerr << "warning: solver did not converge (" << r.note << ")\n";
  return kExitOk;
}

// ---- check -----------------------------------------------------------------

struct CheckArgs {
  std::string family = "igt";
  std::vector<std::string> g = {"gauss"};
  std::vector<std::string> f = {"identity"};
  std::vector<std::string> families;
  bool matrix = false;
};

std::string describe(const BoundednessVerdict& v) {
  std::string s = to_string(v.status);
  if (v.value) s += " (" + format_number(*v.value) + ")";
  return s;
}

int run_check(const Globals& g, CheckArgs a) {
  std::vector<ConditionFamily> families;
  std::vector<GeneratingFunction> gs;
  std::vector<FFunction> fs_;
  if (a.matrix) {
    for (const auto& s : a.families) families.push_back(parse_family(s));
    if (families.empty()) families = default_condition_families();
    // Catalog defaults unless lists were given explicitly.
    gs = default_g_catalog();
    fs_ = default_f_catalog();
  } else {
    families.push_back(parse_family(a.family));
  }
  if (!a.matrix || a.g != std::vector<std::string>{"gauss"}) {
    gs.clear();
    for (const auto& s : a.g) gs.push_back(parse_g(s));
  }
  if (!a.matrix || a.f != std::vector<std::string>{"identity"}) {
    fs_.clear();
    for (const auto& s : a.f) fs_.push_back(parse_f(s));
  }
  const std::vector<ConditionCell> cells = condition_matrix(gs, fs_, families, g.threads);
  for (const auto& c : cells)
    std::cerr << to_string(c.family) << " g=" << c.g << " f=" << c.f
              << ": assumption " << describe(c.assumption) << ", condition "
              << describe(c.condition) << "\n";
  emit(g, "conditions.csv", condition_table(cells));
  if (a.matrix) emit_text(g, "conditions.svg", condition_heatmap_svg(cells));
  return kExitOk;
}

// ---- bias ------------------------------------------------------------------

struct BiasArgs {
  std::string model;
  std::vector<std::string> f = {"identity"};
  std::string divergence;
  std::string lambda;
  std::string method = "quadrature";
  std::size_t n = 1'000'000;
};

int run_bias(const Globals& g, const BiasArgs& a) {
  const ModelSpec model = ModelSpec::parse(a.model);
  std::vector<BiasReport> reports;
  int status = kExitOk;
  for (std::size_t i = 0; i < a.f.size(); ++i) {
    const FFunction f = parse_f(a.f[i]);
    const BiasQuery q = a.divergence.empty()
                            ? BiasQuery(model, f)
                            : BiasQuery(model, f, parse_divergence(a.divergence),
                                        a.lambda.empty() ? BiasQuery(model, f).lambda
                                                         : parse_numbers(a.lambda));
    BiasReport r;
    if (a.method == "quadrature") {
      r = bias_quadrature(q);
    } else {
      MonteCarloOptions opts;
      opts.n = a.n;
      opts.threads = g.threads;
      RngStream rng(g.seed, i);
      r = bias_monte_carlo(q, opts, rng);
    }
    std::cerr << r.model << " f=" << r.f << " [" << r.divergence << ", "
              << to_string(r.method) << "]: " << to_string(r.verdict);
    for (std::size_t j = 0; j < r.bias.size(); ++j) {
      std::cerr << (j ? ", " : "  bias ") << format_number(r.bias[j]);
      if (r.standard_error) std::cerr << " (SE " << format_number((*r.standard_error)[j]) << ")";
    }
    if (!r.note.empty()) std::cerr << "  note: " << r.note;
    std::cerr << "\n";
    if (r.bias.empty()) status = kExitVerdict;
    reports.push_back(std::move(r));
  }
  emit(g, "bias.csv", bias_table(reports));
  return status;
}

// ---- experiment ------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  bool no_plots = false;
};

int run_experiment_cmd(const Globals& g, const ExperimentArgs& a, bool threads_given) {
  ExperimentConfig cfg = ExperimentConfig::load(a.config);
  if (g.seed_given) cfg.seed = g.seed;
  if (threads_given) cfg.threads = g.threads;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (a.no_plots) cfg.plots = false;
  const ExperimentReport report = run_experiment(cfg);
  for (const auto& p : emit_outputs(report, cfg.out_dir, cfg.prefix, cfg.plots))
    std::cerr << "wrote " << p.string() << "\n";
  std::cout << write_csv(summary_table(report));
  return kExitOk;
}

// ---- lemmas ----------------------------------------------------------------

struct LemmaArgs {
  std::size_t samples = 200'000;
};

int run_lemmas(const Globals& g, const LemmaArgs& a) {
  CsvTable t;
  t.header = {"check", "case", "lhs", "rhs", "rel_diff", "tolerance", "status"};
  bool all = true;
  auto add = [&](const std::string& check, const std::string& which, double lhs, double rhs,
                 double rel, double tol, std::optional<bool> pass = std::nullopt) {
    const bool ok = pass ? *pass : rel <= tol;
    all = all && ok;
    t.rows.push_back({check, which, format_number(lhs), format_number(rhs), format_number(rel),
                      format_number(tol), ok ? "pass" : "fail"});
  };
  const std::vector<std::pair<std::string, std::function<double(double)>>> us = {
      {"exp(-t)", [](double x) { return std::exp(-x); }},
      {"(1+t)^-3", [](double x) { return std::pow(1.0 + x, -3.0); }}};

  for (const auto& [name, u] : us) {
    const LemmaReport r1 = verify_lemma(Lemma::lemma1, 2, {0.5, 1.5}, u);
    add("lemma1", "m=2 alpha=(1/2,3/2) u=" + name, r1.lhs, r1.rhs, r1.rel_diff, 1e-6);
    for (int m : {2, 3}) {
      const LemmaReport r2 = verify_lemma(Lemma::lemma2, m, {}, u);
      add("lemma2", "m=" + std::to_string(m) + " u=" + name, r2.lhs, r2.rhs, r2.rel_diff, 1e-6);
    }
    const LemmaReport mc = verify_lemma(Lemma::lemma2, 5, {}, u, a.samples, g.seed);
    add("lemma2", "m=5 u=" + name + " (" + mc.lhs_method + ")", mc.lhs, mc.rhs, mc.rel_diff,
        4.0 * mc.lhs_error / mc.rhs, std::abs(mc.lhs - mc.rhs) <= 4.0 * mc.lhs_error);
  }

  const FFunction id = make_f("identity");
  const MigtModel m2({1.0, 2.0}, {1.0, 1.0}, make_g("gauss"));
  const MigtModel m3({1.0, 2.0, 1.5}, {1.0, 1.0, 2.0}, make_g("gauss"));
  for (const auto* m : {&m2, &m3}) {
    const std::string d = "d=" + std::to_string(m->dim());
    const double tol = m->dim() == 2 ? 1e-4 : 1e-3;
    for (std::size_t k = 0; k < m->dim(); ++k) {
      const AppendixBReport r = verify_appendix_b_reduction(*m, id, k);
      const std::string c = d + " k=" + std::to_string(k + 1) + " g=gauss f=identity";
      add("reduction", c, r.positive_part, r.reduced, r.rel_diff, tol);
      add("signed_zero", c, r.signed_expectation, 0.0, std::abs(r.signed_expectation), 1e-6);
      add("abs_identity", c, r.positive_part + r.negative_part, 2.0 * r.reduced,
          r.abs_identity_rel_diff, tol);
    }
  }
  for (const auto& gf : default_g_catalog())
    for (int d : {2, 3}) {
      const MeanBoundReport r = verify_mean_bound(gf, d);
      add("mean_bound", "d=" + std::to_string(d) + " g=" + gf.name() + (r.vacuous ? " (vacuous)" : ""),
          r.a, r.c, std::abs(r.b_planar - r.b_reduced) / std::max(r.b_reduced, 1e-300),
          r.tolerance, r.holds);
    }
  for (const auto& f : default_f_catalog()) {
    const IgtModel m(2.0, 3.0, make_g("gauss"));
    const AbsIdentityReport r = verify_igt_abs_identity(m, f);
    add("igt_abs_identity", "theta=2 lambda=3 g=gauss f=" + f.name(), r.direct, r.closed,
        r.rel_diff, 1e-8);
  }
  emit(g, "lemmas.csv", t);
  return all ? kExitOk : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bregman M-estimation under the inverse divergence: sampling, estimation, "
               "unbiasedness conditions and bias checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Write output files here instead of stdout");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw from a model; CSV dim_1..dim_d[,label]");
  sample->add_option("--model", sa.model, "Model spec, e.g. igt(theta=2,lambda=3,g=gauss)")
      ->required();
  sample->add_option("-n", sa.n, "Number of draws")->capture_default_str();
  sample->add_option("--stream", sa.stream, "RNG stream id")->capture_default_str();
  sample->add_option("--outlier", sa.outlier, "Outlier model spec (adds a label column)");
  sample->add_option("--eps", sa.eps, "Outlier probability in [0, 1)")->capture_default_str();

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "M-estimate theta from CSV data");
  estimate->add_option("--data", ea.data, "CSV file; every column except 'label' is data")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--divergence", ea.divergence,
                       "inverse | multivariate_inverse | squared | itakura_saito")
      ->capture_default_str();
  estimate->add_option("--lambda", ea.lambda, "Divergence scale; comma list for MIGT")
      ->capture_default_str();
  estimate->add_option("--f", ea.f, "Distortion f, e.g. log1p:1")->capture_default_str();
  estimate->add_option("--tol", ea.tol)->capture_default_str();
  estimate->add_option("--max-iter", ea.max_iter)->capture_default_str();
  estimate->add_option("--multistart", ea.multistart)->capture_default_str();
  estimate->add_flag("--trace", ea.trace, "Also emit the per-iteration weight trace");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Unbiasedness condition for (family, g, f)");
  check->add_option("--family", ca.family, "igt | gigt_mix | migt:d")->capture_default_str();
  check->add_option("--g", ca.g, "Generating function(s)")->capture_default_str();
  check->add_option("--f", ca.f, "Distortion(s)")->capture_default_str();
  check->add_flag("--matrix", ca.matrix,
                  "Every family x g x f (catalog defaults) plus a heatmap with --out-dir");
  check->add_option("--families", ca.families, "Families for --matrix");

  BiasArgs ba;
  auto* bias = app.add_subcommand("bias", "E[f'(d)(X - theta)] by quadrature or Monte Carlo");
  bias->add_option("--model", ba.model, "Model spec")->required();
  bias->add_option("--f", ba.f, "Distortion(s)")->capture_default_str();
  bias->add_option("--divergence", ba.divergence, "Score with another divergence");
  bias->add_option("--lambda", ba.lambda, "Scale for --divergence");
  bias->add_option("--method", ba.method)
      ->check(CLI::IsMember({"quadrature", "mc"}))
      ->capture_default_str();
  bias->add_option("--n", ba.n, "Monte Carlo sample size")->capture_default_str();

  ExperimentArgs xa;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment configuration");
  experiment->add_option("config", xa.config, "Configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  experiment->add_flag("--no-plots", xa.no_plots);

  LemmaArgs la;
  auto* lemmas = app.add_subcommand("lemmas", "Numeric checks of the integral identities");
  lemmas->add_option("--samples", la.samples, "Monte Carlo draws for m > 3")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g.seed_given = app.count("--seed") > 0;

  try {
    if (*sample) return run_sample(g, sa);
    if (*estimate) return run_estimate(g, ea);
    if (*check) return run_check(g, ca);
    if (*bias) return run_bias(g, ba);
    if (*experiment) return run_experiment_cmd(g, xa, app.count("--threads") > 0);
    if (*lemmas) return run_lemmas(g, la);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {  // ParseError, DomainError, DimensionError, ...
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerdict;
  }
  return kExitUsage;
}
