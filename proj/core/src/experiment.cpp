#include "invdiv/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "invdiv/config.hpp"
#include "invdiv/errors.hpp"
#include "invdiv/svg.hpp"
#include "parallel.hpp"

#ifndef INVDIV_VERSION
#define INVDIV_VERSION "unknown"
#endif

namespace invdiv {

std::string library_version() { return INVDIV_VERSION; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_unsigned(std::string_view s) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  return std::nullopt;
}

// "3", "1,2" or "[1,2]".
std::optional<std::vector<double>> to_list(std::string_view s) {
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<double> out;
  while (true) {
    const std::size_t comma = s.find(',');
    std::string_view item = s.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    const auto v = to_double(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out + "]";
}

std::string where(const ConfigSection& s, const ConfigEntry& e) {
  return s.title() + " line " + std::to_string(e.line) + ": ";
}

void check_keys(const ConfigSection& s, const std::set<std::string>& allowed,
                std::vector<std::string>& problems) {
  for (const auto& e : s.entries)
    if (!allowed.contains(e.key)) problems.push_back(where(s, e) + "unknown key '" + e.key + "'");
}

void validate_estimator(const EstimatorConfig& e, std::size_t dim,
                        std::vector<std::string>& problems) {
  const std::string at = "estimator '" + e.name + "': ";
  const bool scalar = e.divergence != DivergenceKind::multivariate_inverse;
  if (scalar && dim != 1)
    problems.push_back(at + to_string(e.divergence) + " divergence needs a one-dimensional model");
  const std::size_t want = scalar ? 1 : dim;
  if (e.lambda.size() != want && !(e.lambda.size() == 1 && !scalar))
    problems.push_back(at + "lambda needs " + std::to_string(want) + " value(s)");
  for (double l : e.lambda)
    if (!(l > 0.0)) problems.push_back(at + "lambda must be > 0");
  if (!(e.solver.tol > 0.0)) problems.push_back(at + "tol must be > 0");
  if (e.solver.max_iter < 1) problems.push_back(at + "max_iter must be >= 1");
  if (e.solver.multistart < 0) problems.push_back(at + "multistart must be >= 0");
}

}  // namespace

EstimatorConfig default_estimator(const ModelSpec& model, std::string name, FFunction f) {
  const BiasQuery natural(model, f);
  return EstimatorConfig{std::move(name), natural.divergence, natural.lambda, std::move(f), {}};
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  const ConfigDocument doc = parse_config(text);
  std::vector<std::string> problems;

  const ConfigSection& root = doc.sections.front();
  check_keys(root, {"seed", "replications", "n", "threads"}, problems);
  for (const auto& s : doc.sections) {
    static const std::set<std::string> known = {"", "model", "contamination", "estimator",
                                                "output"};
    if (!known.contains(s.name))
      problems.push_back(s.title() + " line " + std::to_string(s.line) + ": unknown section");
    if (s.name == "estimator" && s.label.empty())
      problems.push_back(s.title() + " line " + std::to_string(s.line) +
                         ": estimator sections need a name, as in [estimator robust]");
    if (!s.name.empty() && s.name != "estimator" && !s.label.empty())
      problems.push_back(s.title() + " line " + std::to_string(s.line) +
                         ": only estimator sections take a name");
  }

  // The model comes first: estimator defaults depend on it.
  std::optional<ModelSpec> model;
  const auto model_sections = doc.all("model");
  if (model_sections.empty()) {
    problems.push_back("missing [model] section");
  } else {
    const ConfigSection& s = *model_sections.front();
    check_keys(s, {"spec"}, problems);
    if (const ConfigEntry* e = s.find("spec")) {
      try {
        model = ModelSpec::parse(e->value);
      } catch (const std::exception& ex) {
        problems.push_back(where(s, *e) + "'" + e->key + "': " + ex.what());
      }
    } else {
      problems.push_back("[model]: missing key 'spec'");
    }
  }

  ExperimentConfig cfg(model ? *model : ModelSpec(GaussianModel(0.0, 1.0)));

  auto read_unsigned = [&](const ConfigSection& s, const char* key, auto& target) {
    if (const ConfigEntry* e = s.find(key)) {
      if (const auto v = to_unsigned(e->value))
        target = static_cast<std::remove_reference_t<decltype(target)>>(*v);
      else
        problems.push_back(where(s, *e) + "'" + key + "' must be a non-negative integer");
    }
  };
  read_unsigned(root, "seed", cfg.seed);
  read_unsigned(root, "replications", cfg.replications);
  read_unsigned(root, "n", cfg.n);
  read_unsigned(root, "threads", cfg.threads);

  if (const auto cs = doc.all("contamination"); !cs.empty()) {
    const ConfigSection& s = *cs.front();
    check_keys(s, {"outlier", "eps"}, problems);
    std::optional<ModelSpec> outlier;
    double eps = 0.0;
    if (const ConfigEntry* e = s.find("outlier")) {
      try {
        outlier = ModelSpec::parse(e->value);
      } catch (const std::exception& ex) {
        problems.push_back(where(s, *e) + "'" + e->key + "': " + ex.what());
      }
    } else {
      problems.push_back("[contamination]: missing key 'outlier'");
    }
    if (const ConfigEntry* e = s.find("eps")) {
      if (const auto v = to_double(e->value))
        eps = *v;
      else
        problems.push_back(where(s, *e) + "'eps' must be a number");
    } else {
      problems.push_back("[contamination]: missing key 'eps'");
    }
    if (outlier) cfg.contamination = Contamination{*outlier, eps};
  }

  for (const ConfigSection* s : doc.all("estimator")) {
    check_keys(*s, {"f", "divergence", "lambda", "tol", "max_iter", "multistart"}, problems);
    std::optional<FFunction> f;
    if (const ConfigEntry* e = s->find("f")) {
      try {
        f = parse_f(e->value);
      } catch (const std::exception& ex) {
        problems.push_back(where(*s, *e) + "'" + e->key + "': " + ex.what());
      }
    } else {
      problems.push_back(s->title() + ": missing key 'f'");
    }
    if (!f || !model) continue;
    EstimatorConfig est = default_estimator(*model, s->label, *f);
    if (const ConfigEntry* e = s->find("divergence")) {
      try {
        est.divergence = parse_divergence(e->value);
      } catch (const std::exception& ex) {
        problems.push_back(where(*s, *e) + "'" + e->key + "': " + ex.what());
      }
    }
    if (const ConfigEntry* e = s->find("lambda")) {
      if (const auto v = to_list(e->value))
        est.lambda = *v;
      else
        problems.push_back(where(*s, *e) + "'lambda' must be a number or list");
    }
    if (const ConfigEntry* e = s->find("tol")) {
      if (const auto v = to_double(e->value))
        est.solver.tol = *v;
      else
        problems.push_back(where(*s, *e) + "'tol' must be a number");
    }
    read_unsigned(*s, "max_iter", est.solver.max_iter);
    read_unsigned(*s, "multistart", est.solver.multistart);
    cfg.estimators.push_back(std::move(est));
  }

  if (const auto os = doc.all("output"); !os.empty()) {
    const ConfigSection& s = *os.front();
    check_keys(s, {"dir", "prefix", "plots"}, problems);
    if (const ConfigEntry* e = s.find("dir")) cfg.out_dir = e->value;
    if (const ConfigEntry* e = s.find("prefix")) cfg.prefix = e->value;
    if (const ConfigEntry* e = s.find("plots")) {
      if (const auto v = to_bool(e->value))
        cfg.plots = *v;
      else
        problems.push_back(where(s, *e) + "'plots' must be true or false");
    }
  }

  if (model) {
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
  } else {
    // The checks that do not depend on the model.
    if (cfg.replications < 1) problems.push_back("replications must be >= 1");
    if (cfg.n < 1) problems.push_back("n must be >= 1");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return parse(read_text_file(path));
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  if (replications < 1) problems.push_back("replications must be >= 1");
  if (n < 1) problems.push_back("n must be >= 1");
  if (contamination) {
    if (!(contamination->eps >= 0.0 && contamination->eps < 1.0))
      problems.push_back("contamination eps must lie in [0, 1)");
    if (contamination->outlier.dim() != model.dim())
      problems.push_back("outlier model dimension " + std::to_string(contamination->outlier.dim()) +
                         " differs from the model's " + std::to_string(model.dim()));
  }
  if (estimators.empty()) problems.push_back("at least one estimator is required");
  std::set<std::string> names;
  for (const auto& e : estimators) {
    if (e.name.empty()) problems.push_back("estimator with an empty name");
    if (!names.insert(e.name).second) problems.push_back("duplicate estimator '" + e.name + "'");
    validate_estimator(e, model.dim(), problems);
  }
  if (prefix.empty()) problems.push_back("output prefix must not be empty");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("seed", std::to_string(seed));
  out.emplace_back("replications", std::to_string(replications));
  out.emplace_back("n", std::to_string(n));
  out.emplace_back("model", model.spelling());
  if (contamination) {
    out.emplace_back("contamination.outlier", contamination->outlier.spelling());
    out.emplace_back("contamination.eps", format_number(contamination->eps));
  }
  for (const auto& e : estimators) {
    const std::string k = "estimator." + e.name + ".";
    out.emplace_back(k + "f", e.f.name());
    out.emplace_back(k + "divergence", to_string(e.divergence));
    out.emplace_back(k + "lambda", join_numbers(e.lambda));
    out.emplace_back(k + "tol", format_number(e.solver.tol));
    out.emplace_back(k + "max_iter", std::to_string(e.solver.max_iter));
    out.emplace_back(k + "multistart", std::to_string(e.solver.multistart));
  }
  return out;
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  out += "seed = " + std::to_string(seed) + "\n";
  out += "replications = " + std::to_string(replications) + "\n";
  out += "n = " + std::to_string(n) + "\n";
  out += "threads = " + std::to_string(threads) + "\n";
  out += "\n[model]\nspec = " + model.spelling() + "\n";
  if (contamination) {
    out += "\n[contamination]\noutlier = " + contamination->outlier.spelling() + "\n";
    out += "eps = " + format_number(contamination->eps) + "\n";
  }
  for (const auto& e : estimators) {
    out += "\n[estimator " + e.name + "]\n";
    out += "f = " + e.f.name() + "\n";
    out += "divergence = " + to_string(e.divergence) + "\n";
    out += "lambda = " + join_numbers(e.lambda) + "\n";
    out += "tol = " + format_number(e.solver.tol) + "\n";
    out += "max_iter = " + std::to_string(e.solver.max_iter) + "\n";
    out += "multistart = " + std::to_string(e.solver.multistart) + "\n";
  }
  out += "\n[output]\ndir = " + out_dir.string() + "\nprefix = " + prefix +
         "\nplots = " + (plots ? "true" : "false") + "\n";
  return out;
}

const ReplicationResult& ExperimentReport::at(std::size_t replication,
                                              std::size_t estimator) const {
  const std::size_t k = summaries.size();
  if (estimator >= k || replication * k + estimator >= rows.size())
    throw DomainError("ExperimentReport: index out of range");
  return rows[replication * k + estimator];
}

double ExperimentReport::squared_error(std::size_t replication, std::size_t estimator) const {
  const ReplicationResult& r = at(replication, estimator);
  double s = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double e = r.theta_hat[j] - truth[j];
    s += e * e;
  }
  return s;
}

std::size_t ExperimentReport::replications() const {
  return summaries.empty() ? 0 : rows.size() / summaries.size();
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t dim = cfg.model.dim();
  const std::size_t k = cfg.estimators.size();
  const ModelSampler base(cfg.model);
  std::optional<ModelSampler> outlier;
  if (cfg.contamination) outlier.emplace(cfg.contamination->outlier);

  ExperimentReport report;
  report.version = library_version();
  report.seed = cfg.seed;
  report.config = cfg.echo();
  report.truth = cfg.model.location();
  report.rows.resize(cfg.replications * k);

  detail::parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    RngStream rng(cfg.seed, r);
    const LabeledSample sample =
        outlier ? sample_contaminated(base, *outlier, cfg.contamination->eps, cfg.n, rng)
                : sample_model(base, cfg.n, rng);
    std::size_t outliers = 0;
    for (int l : sample.labels) outliers += static_cast<std::size_t>(l);
    for (std::size_t e = 0; e < k; ++e) {
      const EstimatorConfig& est = cfg.estimators[e];
      ReplicationResult& row = report.rows[r * k + e];
      row.replication = r;
      row.estimator = e;
      row.outliers = outliers;
      try {
        const EstimationProblem problem(sample.points, dim, est.divergence, est.lambda, est.f);
        const EstimateResult res = solve(problem, est.solver);
        row.theta_hat = res.theta_hat;
        row.converged = res.converged;
        row.iterations = res.iterations;
        row.note = res.note;
      } catch (const std::exception& ex) {
        row.theta_hat.assign(dim, kNaN);
        row.note = ex.what();
      }
    }
  });

  for (std::size_t e = 0; e < k; ++e) {
    const EstimatorConfig& est = cfg.estimators[e];
    EstimatorSummary s;
    s.name = est.name;
    s.divergence = to_string(est.divergence);
    s.f = est.f.name();
    std::vector<std::vector<double>> errors(dim);
    std::vector<double> iterations;
    std::size_t converged = 0;
    for (std::size_t r = 0; r < cfg.replications; ++r) {
      const ReplicationResult& row = report.rows[r * k + e];
      bool finite = true;
      for (double v : row.theta_hat) finite = finite && std::isfinite(v);
      if (!finite) {
        ++s.failures;
        continue;
      }
      for (std::size_t j = 0; j < dim; ++j) errors[j].push_back(row.theta_hat[j] - report.truth[j]);
      iterations.push_back(static_cast<double>(row.iterations));
      converged += row.converged ? 1 : 0;
    }
    const double m = static_cast<double>(iterations.size());
    for (std::size_t j = 0; j < dim; ++j) {
      if (errors[j].empty()) {
        s.bias.push_back(kNaN);
        s.variance.push_back(kNaN);
        s.mse.push_back(kNaN);
        continue;
      }
      const double bias = pairwise_sum(errors[j]) / m;
      std::vector<double> centered, squared;
      for (double x : errors[j]) {
        centered.push_back((x - bias) * (x - bias));
        squared.push_back(x * x);
      }
      s.bias.push_back(bias);
      s.variance.push_back(pairwise_sum(centered) / m);
      s.mse.push_back(pairwise_sum(squared) / m);
    }
    s.converged_fraction = static_cast<double>(converged) / static_cast<double>(cfg.replications);
    s.mean_iterations = iterations.empty() ? kNaN : pairwise_sum(iterations) / m;
    report.summaries.push_back(std::move(s));
  }
  return report;
}

double win_fraction(const ExperimentReport& report, std::size_t a, std::size_t b) {
  const std::size_t reps = report.replications();
  if (reps == 0) throw DomainError("win_fraction: empty report");
  std::size_t wins = 0;
  for (std::size_t r = 0; r < reps; ++r)
    if (report.squared_error(r, a) < report.squared_error(r, b)) ++wins;
  return static_cast<double>(wins) / static_cast<double>(reps);
}

CsvTable meta_table(const ExperimentReport& report) {
  CsvTable t;
  t.header = {"key", "value"};
  t.rows.push_back({"version", report.version});
  t.rows.push_back({"seed", std::to_string(report.seed)});
  for (const auto& [k, v] : report.config) {
    if (k == "seed") continue;
    t.rows.push_back({k, v});
  }
  return t;
}

CsvTable summary_table(const ExperimentReport& report) {
  CsvTable t;
  t.header = {"estimator", "divergence", "f", "coordinate", "truth", "bias", "variance",
              "mse", "converged_fraction", "mean_iterations", "failures"};
  for (const auto& s : report.summaries)
    for (std::size_t j = 0; j < report.truth.size(); ++j)
      t.rows.push_back({s.name, s.divergence, s.f, std::to_string(j), format_number(report.truth[j]),
                        format_number(s.bias[j]), format_number(s.variance[j]),
                        format_number(s.mse[j]), format_number(s.converged_fraction),
                        format_number(s.mean_iterations), std::to_string(s.failures)});
  return t;
}

CsvTable replication_table(const ExperimentReport& report) {
  CsvTable t;
  t.header = {"replication", "estimator", "coordinate", "theta_hat", "error",
              "converged", "iterations", "outliers"};
  for (const auto& row : report.rows)
    for (std::size_t j = 0; j < report.truth.size(); ++j)
      t.rows.push_back({std::to_string(row.replication), report.summaries[row.estimator].name,
                        std::to_string(j), format_number(row.theta_hat[j]),
                        format_number(row.theta_hat[j] - report.truth[j]),
                        row.converged ? "1" : "0", std::to_string(row.iterations),
                        std::to_string(row.outliers)});
  return t;
}

std::vector<std::filesystem::path> emit_outputs(const ExperimentReport& report,
                                                const std::filesystem::path& dir,
                                                const std::string& prefix, bool plots) {
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& suffix, const std::string& text) {
    const std::filesystem::path p = dir / (prefix + suffix);
    write_text_file(p, text);
    written.push_back(p);
  };
  put("_meta.csv", write_csv(meta_table(report)));
  put("_summary.csv", write_csv(summary_table(report)));
  put("_replications.csv", write_csv(replication_table(report)));
  if (plots) {
    std::vector<BoxSeries> series;
    const std::size_t dim = report.truth.size();
    for (std::size_t e = 0; e < report.summaries.size(); ++e)
      for (std::size_t j = 0; j < dim; ++j) {
        BoxSeries s;
        s.label = report.summaries[e].name + (dim > 1 ? " x" + std::to_string(j + 1) : "");
        for (std::size_t r = 0; r < report.replications(); ++r)
          s.values.push_back(report.at(r, e).theta_hat[j] - report.truth[j]);
        series.push_back(std::move(s));
      }
    put("_errors.svg", box_plot_svg(series, "Estimation error by estimator", "theta_hat - theta"));
  }
  return written;
}

CsvTable condition_table(const std::vector<ConditionCell>& cells) {
  CsvTable t;
  t.header = {"family", "g", "f", "assumption", "assumption_value", "condition",
              "condition_value"};
  auto value = [](const BoundednessVerdict& v) {
    return v.value ? format_number(*v.value) : std::string();
  };
  for (const auto& c : cells)
    t.rows.push_back({to_string(c.family), c.g, c.f, to_string(c.assumption.status),
                      value(c.assumption), to_string(c.condition.status), value(c.condition)});
  return t;
}

std::string condition_heatmap_svg(const std::vector<ConditionCell>& cells) {
  std::vector<std::string> rows, cols;
  std::map<std::pair<std::string, std::string>, const ConditionCell*> index;
  for (const auto& c : cells) {
    const std::string r = to_string(c.family) + " / " + c.g;
    if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows.push_back(r);
    if (std::find(cols.begin(), cols.end(), c.f) == cols.end()) cols.push_back(c.f);
    index[{r, c.f}] = &c;
  }
  std::vector<std::vector<HeatmapCell>> grid(rows.size(), std::vector<HeatmapCell>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto it = index.find({rows[i], cols[j]});
      HeatmapCell& cell = grid[i][j];
      if (it == index.end()) {
        cell.category = -1;
        continue;
      }
      const ConditionCell& c = *it->second;
      if (!c.assumption.finite()) {
        cell.category = 3;
        cell.text = "no model";
      } else {
        cell.category = static_cast<int>(c.condition.status);
        cell.text = to_string(c.condition.status);
      }
    }
  const std::vector<HeatmapLegend> legend = {{"finite", "#74c476"},
                                             {"divergent", "#fb6a4a"},
                                             {"inconclusive", "#fdd0a2"},
                                             {"assumption fails", "#d9d9d9"}};
  return heatmap_svg(rows, cols, grid, legend, "Unbiasedness condition by family, g and f");
}

CsvTable bias_table(const std::vector<BiasReport>& reports) {
  CsvTable t;
  t.header = {"model", "f", "divergence", "method", "coordinate", "bias", "abs_error",
              "standard_error", "normalizer", "verdict", "samples", "note"};
  for (const auto& r : reports) {
    const std::size_t m = std::max<std::size_t>(r.bias.size(), 1);
    for (std::size_t j = 0; j < m; ++j) {
      auto cell = [&](const std::vector<double>& v) {
        return j < v.size() ? format_number(v[j]) : std::string();
      };
      t.rows.push_back({r.model, r.f, r.divergence, to_string(r.method), std::to_string(j),
                        cell(r.bias), cell(r.abs_error),
                        r.standard_error ? cell(*r.standard_error) : std::string(),
                        r.normalizer ? format_number(*r.normalizer) : std::string(),
                        to_string(r.verdict), std::to_string(r.samples), r.note});
    }
  }
  return t;
}

}  // namespace invdiv
