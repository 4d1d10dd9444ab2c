#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "bpreg/dataset.hpp"
#include "bpreg/errors.hpp"
#include "bpreg/fit.hpp"
#include "bpreg/report.hpp"

using namespace bpreg;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

// Synthetic table with columns dry, wet, cs drawn from the model at theta.
std::string synthetic_csv(int n, const VectorXd& theta, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> wet(0.2, 1.5), cs(0.0, 1.0);
  MatrixXd X(n, 3), Z(n, 2);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = Z(i, 0) = 1.0;
    X(i, 1) = Z(i, 1) = wet(gen);
    X(i, 2) = cs(gen);
  }
  const ModelSpec design(VectorXd::Ones(n), X, Z);
  RandomStream rng(seed);
  const VectorXd y = simulate_response(design, theta, rng);
  std::ostringstream os;
  os.precision(17);
  os << "dry,wet,cs\n";
  for (int i = 0; i < n; ++i)
    os << y(i) << ',' << X(i, 1) << ',' << X(i, 2) << '\n';
  return os.str();
}

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << contents;
  return p;
}

struct ToolRun {
  int status;
  std::string out;
};

ToolRun run_tool(const std::string& args) {
  const std::string cmd = std::string(BPREG_TOOL_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t k = fread(buf.data(), 1, buf.size(), pipe))
    out.append(buf.data(), k);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const VectorXd kTheta = (VectorXd(5) << -1.0, 0.8, 0.3, 1.5, 0.5).finished();

}  // namespace

TEST(Csv, LoadsTwentySevenRows) {
  const fs::path p = temp_file("bpreg_clams.csv", synthetic_csv(27, kTheta, 1));
  const Dataset d = load_csv(p.string(), "dry");
  fs::remove(p);
  EXPECT_EQ(d.rows(), 27u);
  EXPECT_EQ(d.names(), (std::vector<std::string>{"dry", "wet", "cs"}));
  EXPECT_EQ(d.numeric("wet").size(), 27u);
}

TEST(Csv, ZeroResponseNamesRow) {
  std::istringstream in("dry,wet\n0.5,1\n0.7,2\n0,3\n");
  try {
    read_csv(in, "dry");
    FAIL() << "expected NonPositiveResponse";
  } catch (const NonPositiveResponse& e) {
    EXPECT_EQ(e.row(), 3u);
  }
  std::istringstream neg("dry\n-1\n");
  EXPECT_THROW(read_csv(neg, "dry"), NonPositiveResponse);
}

TEST(Csv, RaggedRowsRejected) {
  try {
    parse("a,b\n1,2\n3\n");
    FAIL() << "expected RaggedRows";
  } catch (const RaggedRows& e) {
    EXPECT_EQ(e.row(), 2u);
  }
  EXPECT_THROW(parse("a,b\n1,2,3\n"), RaggedRows);
}

TEST(Csv, MalformedValueLocated) {
  const Dataset d = parse("a,b\n1,2\n3,x7\n");
  EXPECT_EQ(d.text(1, 1), "x7");
  try {
    d.numeric("b");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), 2u);
  }
  EXPECT_THROW(parse("a,b\n1,\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("a,a\n1,2\n"), ParseError);
}

TEST(Csv, QuotingLineEndingsAndBom) {
  const Dataset d = parse("\xEF\xBB\xBFname,\"va,l\"\r\n\"x \"\"q\"\"\",1.5e-3\r\n\r\n");
  EXPECT_EQ(d.names(), (std::vector<std::string>{"name", "va,l"}));
  ASSERT_EQ(d.rows(), 1u);
  EXPECT_EQ(d.text(0, 0), "x \"q\"");
  EXPECT_DOUBLE_EQ(d.numeric("va,l")[0], 1.5e-3);
  EXPECT_THROW(d.column_index("missing"), InvalidData);
}

TEST(Csv, DecimalParsing) {
  EXPECT_EQ(parse_decimal("2.5"), 2.5);
  EXPECT_EQ(parse_decimal("-1e3"), -1000.0);
  EXPECT_FALSE(parse_decimal("2,5").has_value());
  EXPECT_FALSE(parse_decimal("1.0abc").has_value());
  EXPECT_FALSE(parse_decimal("").has_value());
  EXPECT_FALSE(parse_decimal("nan").has_value());
}

TEST(RelativeChange, MleAgainstItselfIsZero) {
  const VectorXd t = (VectorXd(3) << 1.5, -0.2, 3.0).finished();
  EXPECT_EQ(relative_change(t, t), VectorXd::Zero(3));
  const VectorXd c = (VectorXd(1) << 2.0).finished();
  EXPECT_DOUBLE_EQ(relative_change((VectorXd(1) << 2.5).finished(), c)(0), 25.0);
}

TEST(RunFit, SelfSimulationRecoversTruth) {
  const Dataset d = parse(synthetic_csv(400, kTheta, 2));
  FitOptions o;
  o.bootstrap_reps = 100;
  o.seed = 3;
  const FitReport rep =
      run_fit(d, "dry", {"wet", "cs"}, {"wet"},
              {Method::mle, Method::cox_snell, Method::firth, Method::bootstrap}, o);
  ASSERT_TRUE(rep.all_converged());
  ASSERT_EQ(rep.methods.size(), 4u);
  for (const auto& m : rep.methods) {
    const VectorXd est = m.fit->theta.theta();
    for (int j = 0; j < 5; ++j)
      EXPECT_LT(std::abs(est(j) - kTheta(j)), 3.0 * m.fit->std_errors(j))
          << method_name(m.method) << " " << j;
  }
  for (const auto& [method, rc] : rep.relative_changes)
    if (method == Method::mle) EXPECT_EQ(rc, VectorXd::Zero(5));
  EXPECT_EQ(rep.parameter_labels[1], "beta1 (wet)");
  EXPECT_EQ(rep.parameter_labels[4], "nu1 (wet)");
}

TEST(RunFit, TableLayout) {
  const Dataset d = parse(synthetic_csv(27, kTheta, 4));
  FitOptions o;
  o.bootstrap_reps = 20;
  const FitReport rep =
      run_fit(d, "dry", {"wet", "cs"}, {"wet"},
              {Method::mle, Method::cox_snell, Method::firth, Method::bootstrap}, o);
  const std::string table = format_fit_table(rep);
  std::istringstream in(table);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  // each estimate row is followed by a row of parenthesized SEs
  int pairs = 0;
  for (std::size_t k = 0; k + 1 < lines.size(); ++k) {
    if (lines[k].rfind("beta", 0) == 0 || lines[k].rfind("nu", 0) == 0) {
      const std::string& se = lines[k + 1];
      EXPECT_EQ(std::count(se.begin(), se.end(), '('), 4) << se;
      EXPECT_EQ(se.find_first_not_of(' ') , se.find('('));
      ++pairs;
    }
  }
  EXPECT_EQ(pairs, 5);
  EXPECT_NE(table.find("Relative change"), std::string::npos);
  // four decimals
  const VectorXd mle = rep.methods[0].fit->theta.theta();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", mle(0));
  EXPECT_NE(table.find(buf), std::string::npos);
}

TEST(RunFit, JsonSchema) {
  const Dataset d = parse(synthetic_csv(27, kTheta, 5));
  FitOptions o;
  o.bootstrap_reps = 10;
  o.seed = 8;
  const FitReport rep = run_fit(d, "dry", {"wet", "cs"}, {"wet"},
                                {Method::mle, Method::firth}, o);
  const auto j = nlohmann::json::parse(fit_report_json(rep));
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["model"]["response"], "dry");
  EXPECT_EQ(j["model"]["n"], 27);
  EXPECT_EQ(j["seed"], 8);
  for (const char* m : {"mle", "firth"}) {
    ASSERT_TRUE(j["methods"].contains(m));
    EXPECT_EQ(j["methods"][m]["estimates"].size(), 5u);
    EXPECT_EQ(j["methods"][m]["std_errors"].size(), 5u);
    EXPECT_TRUE(j["methods"][m]["converged"].get<bool>());
  }
  EXPECT_TRUE(j["relative_changes"].contains("firth"));
  // full precision
  EXPECT_EQ(j["methods"]["mle"]["estimates"][0].get<double>(),
            rep.methods[0].fit->theta.theta()(0));
}

TEST(RunFit, MissingColumnThrows) {
  const Dataset d = parse(synthetic_csv(27, kTheta, 6));
  EXPECT_THROW(run_fit(d, "dry", {"nope"}, {}, {Method::mle}, {}), InvalidData);
  EXPECT_THROW(run_fit(d, "dry", {"wet"}, {}, {}, {}), InvalidData);
}

TEST(RunFit, FailedMethodIsRecorded) {
  const Dataset d = parse(synthetic_csv(27, kTheta, 7));
  FitOptions o;
  o.max_iter = 1;
  const FitReport rep = run_fit(d, "dry", {"wet"}, {}, {Method::mle}, o);
  EXPECT_FALSE(rep.all_converged());
  EXPECT_FALSE(rep.methods[0].fit.has_value());
  EXPECT_FALSE(rep.methods[0].error.empty());
}

class Tool : public ::testing::Test {
 protected:
  void SetUp() override {
    if (std::string(BPREG_TOOL_PATH).empty()) GTEST_SKIP() << "tool not built";
  }
};

TEST_F(Tool, FitExitCodes) {
  const fs::path p = temp_file("bpreg_cli_fit.csv", synthetic_csv(27, kTheta, 9));
  const fs::path js = fs::temp_directory_path() / "bpreg_cli_fit.json";
  const std::string base =
      "fit --data " + p.string() + " --response dry --mean wet,cs --prec wet";
  const ToolRun ok = run_tool(base + " --boot-reps 20 --seed 1 --json " + js.string());
  EXPECT_EQ(ok.status, 0);
  EXPECT_NE(ok.out.find("(") , std::string::npos);
  const auto j = nlohmann::json::parse(slurp(js));
  EXPECT_EQ(j["methods"].size(), 4u);
  EXPECT_TRUE(j["methods"]["boot"]["converged"].get<bool>());

  EXPECT_NE(run_tool(base + " --methods mle --max-iter 1").status, 0);
  EXPECT_NE(run_tool("fit --data /nonexistent.csv --response dry").status, 0);
  EXPECT_NE(run_tool(base + " --methods ridge").status, 0);
  const ToolRun stdout_json = run_tool(base + " --methods mle --json -");
  EXPECT_EQ(stdout_json.status, 0);
  EXPECT_NO_THROW(nlohmann::json::parse(stdout_json.out));
  fs::remove(p);
  fs::remove(js);
}

TEST_F(Tool, SimulateIsByteDeterministic) {
  const fs::path a = fs::temp_directory_path() / "bpreg_sim_a";
  const fs::path b = fs::temp_directory_path() / "bpreg_sim_b";
  const std::string flags = "--n 30 --p 1 --q 1 --m 2000 --seed 42 --out ";
  ASSERT_EQ(run_tool("simulate " + flags + a.string()).status, 0);
  ASSERT_EQ(run_tool("simulate " + flags + b.string()).status, 0);
  const std::string ja = slurp(a / "report.json");
  EXPECT_EQ(ja, slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "replicates.csv"), slurp(b / "replicates.csv"));
  const auto j = nlohmann::json::parse(ja);
  EXPECT_EQ(j["parameters"].size(), 4u);
  EXPECT_EQ(j["estimators"].size(), 4u);
  for (const auto& [name, est] : j["estimators"].items()) {
    EXPECT_EQ(est["mean"].size(), 4u) << name;
    EXPECT_EQ(est["mse"].size(), 4u) << name;
  }
  EXPECT_EQ(j["config"]["m"], 2000);
  fs::remove_all(a);
  fs::remove_all(b);
}
