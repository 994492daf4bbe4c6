#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "zmpl/cli.hpp"
#include "zmpl/datasets.hpp"
#include "zmpl/errors.hpp"

using namespace zmpl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("zmpl_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<nlohmann::json> json_lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

const nlohmann::json* find_record(const std::vector<nlohmann::json>& recs, const std::string& type,
                                  const std::string& key = "", const std::string& value = "") {
  for (const auto& r : recs) {
    if (r["record"] != type) continue;
    if (!key.empty() && r[key] != value) continue;
    return &r;
  }
  return nullptr;
}

}  // namespace

TEST(Datasets, Builtins) {
  const auto c = parse_dataset("builtin:cytogenetic");
  EXPECT_EQ(c.sample.n(), 601);
  EXPECT_EQ(c.sample.n0(), 413);
  EXPECT_EQ(c.sample.max_value(), 6);
  EXPECT_EQ(c.preferred_tail, TailCell::open);
  const auto s = parse_dataset("builtin:strikes");
  EXPECT_EQ(s.sample.n(), 156);
  EXPECT_EQ(s.sample.n0(), 46);
  EXPECT_EQ(builtin_dataset_names().size(), 2u);
  EXPECT_THROW(parse_dataset("builtin:nope"), DataError);
}

TEST(Datasets, RawAndTableFormats) {
  const auto raw = parse_dataset_text("0\n0\n1\n2\n", "raw");
  EXPECT_EQ(raw.sample.n(), 4);
  EXPECT_EQ(raw.sample.n0(), 2);
  EXPECT_FALSE(raw.preferred_tail.has_value());
  const auto table = parse_dataset_text("value,frequency\n0,2\n1,1\n2,1\n", "table");
  EXPECT_EQ(table.sample.frequencies(), raw.sample.frequencies());
  const auto spaced = parse_dataset_text("# comment\n0 2\n1 1 # trailing\n2 1\n", "spaced");
  EXPECT_EQ(spaced.sample.frequencies(), raw.sample.frequencies());
}

TEST(Datasets, Errors) {
  EXPECT_THROW(parse_dataset_text("", "e"), DataError);
  EXPECT_THROW(parse_dataset_text("# only comments\n", "e"), DataError);
  EXPECT_THROW(parse_dataset_text("0\n1,2\n", "e"), DataError);
  EXPECT_THROW(parse_dataset_text("0\n1.5\n", "e"), DataError);
  EXPECT_THROW(parse_dataset_text("0\n-1\n", "e"), DataError);
  EXPECT_THROW(parse_dataset_text("0,0\n1,0\n", "e"), DataError);
  EXPECT_THROW(parse_dataset("/nonexistent/zmpl/data.csv"), DataError);
}

TEST(Grid, ExpandsInNestingOrder) {
  const auto g = cli::expand_scenario_grid({35, 60, 90, 120}, {1.5, 2.0}, {-0.1, 0.0, 0.1}, 7, 9, 5);
  ASSERT_EQ(g.size(), 24u);
  EXPECT_EQ(g[0].id, "n35_theta1.5_pi-0.1");
  EXPECT_EQ(g[1].pi_true, 0.0);
  EXPECT_EQ(g[3].theta_true, 2.0);
  EXPECT_EQ(g[6].n, 60);
  for (const auto& s : g) {
    EXPECT_EQ(s.mc_reps, 7);
    EXPECT_EQ(s.boot_reps, 9);
    EXPECT_EQ(s.seed, 5u);
  }
}

TEST(Fit, CytogeneticText) {
  const auto r = run_cli({"fit", "--data", "builtin:cytogenetic"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2.4097"), std::string::npos);
  EXPECT_NE(r.out.find("0.1165"), std::string::npos);
  EXPECT_NE(r.out.find("(1.8914; 2.9280)"), std::string::npos);
  EXPECT_NE(r.out.find("S_g = 114.5137"), std::string::npos);
  EXPECT_NE(r.out.find("chi-square = 5.9083, d.f. = 6"), std::string::npos);
}

TEST(Fit, StrikesJsonLines) {
  const auto r = run_cli({"fit", "--data", "builtin:strikes", "--format", "json-lines"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = json_lines(r.out);
  const auto* theta = find_record(recs, "estimate", "parameter", "theta");
  ASSERT_NE(theta, nullptr);
  EXPECT_NEAR((*theta)["estimate"].get<double>(), 2.9579, 2e-3);
  EXPECT_NEAR((*theta)["lower"].get<double>(), 2.0436, 0.03);
  const auto* pi = find_record(recs, "estimate", "parameter", "pi");
  ASSERT_NE(pi, nullptr);
  EXPECT_NEAR((*pi)["estimate"].get<double>(), -1.3475, 2e-3);
  const auto* g = find_record(recs, "gradient_test");
  ASSERT_NE(g, nullptr);
  EXPECT_NEAR((*g)["statistic"].get<double>(), 5275.1, 25.0);
  const auto* gof = find_record(recs, "gof");
  ASSERT_NE(gof, nullptr);
  EXPECT_NEAR((*gof)["chi_square"].get<double>(), 1.3404, 0.05);
  EXPECT_EQ((*gof)["dof"].get<int>(), 4);
}

TEST(Fit, FormatsAgree) {
  const auto j = run_cli({"fit", "--data", "builtin:cytogenetic", "--format", "json-lines"});
  const auto c = run_cli({"fit", "--data", "builtin:cytogenetic", "--format", "csv"});
  ASSERT_EQ(j.code, 0);
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out.substr(0, c.out.find('\n')), "index,record,field,value");
  const auto recs = json_lines(j.out);
  const auto* theta = find_record(recs, "estimate", "parameter", "theta");
  ASSERT_NE(theta, nullptr);
  // Locate the same field in the long-form CSV.
  std::istringstream in(c.out);
  std::string line, index;
  double csv_theta = 0.0;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.find(",estimate,parameter,theta") != std::string::npos) index = line.substr(0, line.find(','));
    if (!index.empty() && line.rfind(index + ",estimate,estimate,", 0) == 0) {
      csv_theta = std::stod(line.substr(line.rfind(',') + 1));
      found = true;
      break;
    }
  }
  ASSERT_TRUE(found);
  EXPECT_EQ(csv_theta, (*theta)["estimate"].get<double>());
}

TEST(Fit, BootstrapRecords) {
  const auto r = run_cli({"fit", "--data", "builtin:strikes", "--boot", "100", "--seed", "3",
                          "--format", "json-lines"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = json_lines(r.out);
  const auto* b = find_record(recs, "bootstrap", "parameter", "theta");
  ASSERT_NE(b, nullptr);
  EXPECT_LE((*b)["lower"].get<double>(), (*b)["upper"].get<double>());
  const auto again = run_cli({"fit", "--data", "builtin:strikes", "--boot", "100", "--seed", "3",
                              "--format", "json-lines"});
  EXPECT_EQ(again.out, r.out);
}

TEST(Fit, ExitCodes) {
  const auto dir = temp_dir("exit");
  EXPECT_EQ(run_cli({"fit", "--data", write_text(dir / "empty.txt", "")}).code, cli::kDataError);
  EXPECT_EQ(run_cli({"fit", "--data", write_text(dir / "neg.txt", "0\n-3\n")}).code,
            cli::kDataError);
  EXPECT_EQ(run_cli({"fit", "--data", write_text(dir / "flat.txt", "0\n1\n1\n")}).code,
            cli::kDataError);
  EXPECT_EQ(run_cli({"fit"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"fit", "--data", "builtin:strikes", "--level", "1.5"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"simulate", "--reps", "0"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"nonsense"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kSuccess);
  fs::remove_all(dir);
}

TEST(Gof, AllModelsAndClosedCells) {
  const auto r = run_cli({"gof", "--data", "builtin:cytogenetic", "--format", "json-lines"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = json_lines(r.out);
  const auto* pois = find_record(recs, "gof", "model", "poisson");
  ASSERT_NE(pois, nullptr);
  EXPECT_NEAR((*pois)["chi_square"].get<double>(), 726.28, 1.0);
  const auto* pl = find_record(recs, "gof", "model", "pl");
  ASSERT_NE(pl, nullptr);
  EXPECT_NEAR((*pl)["chi_square"].get<double>(), 9.688, 0.1);
  const auto closed = run_cli({"gof", "--data", "builtin:cytogenetic", "--model", "zmpl",
                               "--gof-cells", "closed", "--format", "json-lines"});
  ASSERT_EQ(closed.code, 0);
  const auto crecs = json_lines(closed.out);
  double expected = 0.0;
  for (const auto& rec : crecs)
    if (rec["record"] == "gof_cell") expected += rec["expected"].get<double>();
  EXPECT_NEAR(expected, 601.0, 1e-6);
}

TEST(SdPlot, CsvRows) {
  const auto r = run_cli({"sdplot", "--data", "builtin:strikes"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "support,model,observed,expected,delta,delta_std");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 5 * 4);
}

TEST(Simulate, DeterministicFiles) {
  const auto a = temp_dir("sim_a");
  const auto b = temp_dir("sim_b");
  const std::vector<std::string> common{"simulate", "--n", "30", "--theta", "1.5", "--pi=-0.1,0.1",
                                        "--reps", "6", "--boot", "10", "--seed", "4"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out", a.string(), "--workers", "1"});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out", b.string(), "--workers", "3"});
  ASSERT_EQ(run_cli(args_a).code, 0);
  ASSERT_EQ(run_cli(args_b).code, 0);
  const auto pa = slurp(a / "point.csv");
  EXPECT_EQ(pa, slurp(b / "point.csv"));
  EXPECT_EQ(slurp(a / "coverage.csv"), slurp(b / "coverage.csv"));
  EXPECT_EQ(pa.substr(0, pa.find('\n')), kPointCsvHeader);
  EXPECT_EQ(parse_point_csv(pa).size(), 2u);
  fs::remove_all(a);
  fs::remove_all(b);
}

#ifdef ZMPL_CLI_PATH
TEST(Binary, ExitStatusPropagates) {
  const std::string bin = ZMPL_CLI_PATH;
  const auto dir = temp_dir("bin");
  const auto empty = write_text(dir / "empty.txt", "");
  const int ok = std::system((bin + " fit --data builtin:strikes > /dev/null 2>&1").c_str());
  const int bad = std::system((bin + " fit --data " + empty + " > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  EXPECT_EQ(WEXITSTATUS(bad), 2);
  fs::remove_all(dir);
}
#endif
