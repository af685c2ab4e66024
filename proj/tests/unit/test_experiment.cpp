#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "invdiv/config.hpp"
#include "invdiv/csv.hpp"
#include "invdiv/errors.hpp"
#include "invdiv/experiment.hpp"
#include "invdiv/svg.hpp"

using namespace invdiv;
namespace fs = std::filesystem;

namespace {

const char* kRobustness = R"(seed = 2024
replications = 40
n = 100
[model]
spec = igt(theta=2,lambda=3,g=gauss)
[contamination]
outlier = gaussian(mean=20,variance=0.01)
eps = 0.1
[estimator mean]
f = identity
[estimator robust]
f = log1p:1
)";

std::vector<std::string> problems_of(std::string_view text) {
  try {
    ExperimentConfig::parse(text);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool parses_as_xml(const std::string& svg) {
  std::istringstream in(svg);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_xml(in, tree);
  } catch (const std::exception&) {
    return false;
  }
  return tree.count("svg") == 1;
}

}  // namespace

TEST(Csv, RoundTripWithQuoting) {
  CsvTable t{{"a", "b,c", "d"}, {{"1", "x\"y", "line\nbreak"}, {"", "plain", "2.5"}}};
  const std::string text = write_csv(t);
  EXPECT_NE(text.find("\"b,c\""), std::string::npos);
  EXPECT_NE(text.find("\"x\"\"y\""), std::string::npos);
  EXPECT_EQ(parse_csv(text), t);
  std::string crlf;
  for (char c : std::string("h1,h2\n1,2\n")) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(parse_csv(crlf), (CsvTable{{"h1", "h2"}, {{"1", "2"}}}));
  EXPECT_EQ(t.column("d"), 2u);
  EXPECT_THROW(t.column("zz"), ParseError);
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv("a,b\n\"open,1\n"), ParseError);
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), ParseError);
  EXPECT_THROW(write_csv(CsvTable{{"a"}, {{"1", "2"}}}), DimensionError);
}

TEST(Csv, FileRoundTrip) {
  const fs::path dir = fs::temp_directory_path() / "invdiv_csv_test" / "nested";
  fs::remove_all(dir.parent_path());
  const CsvTable t{{"k", "v"}, {{"seed", "7"}}};
  save_csv(t, dir / "t.csv");
  EXPECT_EQ(load_csv(dir / "t.csv"), t);
  EXPECT_THROW(load_csv(dir / "missing.csv"), std::runtime_error);
  fs::remove_all(dir.parent_path());
}

TEST(Config, SyntaxProblemsAreAllReported) {
  try {
    parse_config("a = 1\na = 2\nnot a pair\n[bad name!]\n[x]\n[x]\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.problems().size(), 4u) << e.what();
  }
  const ConfigDocument doc = parse_config("# c\nk = v # kept\n[estimator a]\nf = identity\n");
  EXPECT_EQ(doc.sections[0].find("k")->value, "v # kept");
  ASSERT_EQ(doc.all("estimator").size(), 1u);
  EXPECT_EQ(doc.all("estimator")[0]->label, "a");
  EXPECT_EQ(doc.all("estimator")[0]->title(), "[estimator a]");
}

TEST(Config, SemanticProblemsAreAllReported) {
  const auto p = problems_of(
      "seed = -1\nreplications = 0\nn = x\ncolour = red\n"
      "[model]\nspec = igt(theta=-2,lambda=3)\n"
      "[estimator a]\nf = wobble\n");
  EXPECT_GE(p.size(), 5u);
  const auto joined = [&] {
    std::string s;
    for (const auto& x : p) s += x + "\n";
    return s;
  }();
  for (const char* key : {"seed", "replications", "colour", "spec", "wobble"})
    EXPECT_NE(joined.find(key), std::string::npos) << key << " missing from\n" << joined;
  EXPECT_FALSE(problems_of("n = 10\n").empty());  // no model
  EXPECT_TRUE(problems_of(kRobustness).empty());
}

TEST(Config, TextRoundTrip) {
  const ExperimentConfig a = ExperimentConfig::parse(kRobustness);
  EXPECT_EQ(a.replications, 40u);
  EXPECT_EQ(a.estimators.size(), 2u);
  EXPECT_EQ(a.estimators[1].divergence, DivergenceKind::inverse);
  EXPECT_EQ(a.estimators[1].lambda, std::vector<double>{3.0});
  const ExperimentConfig b = ExperimentConfig::parse(a.to_text());
  EXPECT_EQ(a.echo(), b.echo());
  EXPECT_EQ(a.to_text(), b.to_text());
}

TEST(Experiment, ResultsDoNotDependOnThreads) {
  ExperimentConfig cfg = ExperimentConfig::parse(kRobustness);
  cfg.threads = 1;
  const ExperimentReport one = run_experiment(cfg);
  cfg.threads = 3;
  const ExperimentReport three = run_experiment(cfg);
  EXPECT_EQ(write_csv(replication_table(one)), write_csv(replication_table(three)));
  EXPECT_EQ(write_csv(summary_table(one)), write_csv(summary_table(three)));
  EXPECT_EQ(meta_table(one), meta_table(three));
}

TEST(Experiment, SummaryIsConsistent) {
  const ExperimentReport r = run_experiment(ExperimentConfig::parse(kRobustness));
  ASSERT_EQ(r.summaries.size(), 2u);
  EXPECT_EQ(r.rows.size(), 80u);
  EXPECT_EQ(r.replications(), 40u);
  for (std::size_t e = 0; e < 2; ++e) {
    const auto& s = r.summaries[e];
    EXPECT_NEAR(s.mse[0], s.bias[0] * s.bias[0] + s.variance[0], 1e-12 * (1 + s.mse[0]));
    double direct = 0;
    for (std::size_t k = 0; k < 40; ++k) direct += r.squared_error(k, e);
    EXPECT_NEAR(s.mse[0], direct / 40, 1e-10 * (1 + s.mse[0]));
  }
  EXPECT_GE(win_fraction(r, 1, 0), 0.9);
  EXPECT_EQ(r.at(3, 1).replication, 3u);
  EXPECT_EQ(r.at(3, 1).estimator, 1u);
}

TEST(Experiment, CleanMeanHasTheoreticalVariance) {
  // The IGT(gauss) law is the inverse Gaussian with mean theta and shape
  // lambda, so the sample mean of n points has variance theta^3 / (lambda n).
  ExperimentConfig cfg = ExperimentConfig::parse(
      "seed = 5\nreplications = 200\nn = 1000\n[model]\nspec = igt(theta=2,lambda=3)\n"
      "[estimator mean]\nf = identity\n");
  const ExperimentReport r = run_experiment(cfg);
  const double expected = 8.0 / (3.0 * 1000.0);
  EXPECT_NEAR(r.summaries[0].mse[0], expected, 0.2 * expected);
  EXPECT_EQ(r.summaries[0].failures, 0u);
  EXPECT_EQ(r.summaries[0].converged_fraction, 1.0);
}

TEST(Experiment, DegenerateSizes) {
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "replications = 1\nn = 1\n[model]\nspec = igt(theta=2,lambda=3)\n"
      "[estimator robust]\nf = log1p:1\n");
  const ExperimentReport r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(std::isfinite(r.rows[0].theta_hat[0]));
  EXPECT_EQ(r.summaries[0].variance[0], 0.0);
}

TEST(Experiment, MultivariateModel) {
  const ExperimentReport r = run_experiment(ExperimentConfig::parse(
      "replications = 5\nn = 50\n[model]\nspec = migt(theta=[1,2],lambda=[1,1],g=student:5)\n"
      "[estimator robust]\nf = log1p:1\n"));
  EXPECT_EQ(r.truth, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(r.summaries[0].bias.size(), 2u);
  EXPECT_EQ(summary_table(r).rows.size(), 2u);
  EXPECT_EQ(replication_table(r).rows.size(), 10u);
}

TEST(Experiment, OutputsAreWritten) {
  const fs::path dir = fs::temp_directory_path() / "invdiv_experiment_test";
  fs::remove_all(dir);
  const ExperimentReport r = run_experiment(ExperimentConfig::parse(kRobustness));
  const auto paths = emit_outputs(r, dir, "run", true);
  EXPECT_EQ(paths.size(), 4u);
  for (const auto& p : paths) EXPECT_TRUE(fs::exists(p)) << p;
  EXPECT_EQ(load_csv(dir / "run_summary.csv"), summary_table(r));
  EXPECT_EQ(load_csv(dir / "run_meta.csv").rows[0], (std::vector<std::string>{"version", library_version()}));
  EXPECT_TRUE(parses_as_xml(read_text_file(dir / "run_errors.svg")));
  EXPECT_EQ(emit_outputs(r, dir, "noplot", false).size(), 3u);
  fs::remove_all(dir);
}

TEST(Svg, DocumentsAreWellFormed) {
  EXPECT_TRUE(parses_as_xml(box_plot_svg({{"a<b", {1, 2, 3, 50}}, {"c", {}}}, "t & u", "y")));
  EXPECT_TRUE(parses_as_xml(heatmap_svg({"r"}, {"c1", "c2"}, {{{"x", 0}, {"y", 1}}},
                                        {{"one", "#fff"}, {"two", "#000"}}, "\"map\"")));
  EXPECT_TRUE(parses_as_xml(condition_heatmap_svg(
      condition_matrix(default_g_catalog(), default_f_catalog(), default_condition_families()))));
  EXPECT_EQ(xml_escape("<&>\"'"), "&lt;&amp;&gt;&quot;&apos;");
}

// The replication table of a fixed configuration is stored byte for byte;
// set INVDIV_UPDATE_GOLDEN=1 to rewrite it after an intended change.
TEST(Experiment, GoldenReplicationTable) {
  ExperimentConfig cfg = ExperimentConfig::parse(kRobustness);
  cfg.replications = 10;
  const std::string text = write_csv(replication_table(run_experiment(cfg)));
  const fs::path golden = fs::path(INVDIV_GOLDEN_DIR) / "robustness_replications.csv";
  if (std::getenv("INVDIV_UPDATE_GOLDEN")) write_text_file(golden, text);
  ASSERT_TRUE(fs::exists(golden)) << golden;
  EXPECT_EQ(read_text_file(golden), text);
}
