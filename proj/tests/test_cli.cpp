#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmrep_cli/cli.hpp"
#include "bmrep_cli/csv.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = bmrep::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, SpecialFunctions) {
  EXPECT_EQ(run({"hermite", "--n", "3", "--x", "2"}).out, "2\n");
  EXPECT_EQ(run({"stirling2", "--n", "30", "--k", "12"}).out, "177979707061075333384555\n");
  EXPECT_EQ(run({"gamma-coeff", "--l", "1", "--dw", "0.3", "--delta", "1"}).out, "-0.3\n");
}

TEST(Cli, Derivative) {
  EXPECT_EQ(run({"deriv", "--expr", "pow(W(1),3)", "--iterated", "1"}).out, "6*W(1)\n");
  EXPECT_EQ(run({"deriv", "--expr", "W(1)^3", "--terminal", "2", "--T", "1"}).out, "6*W(1)\n");
}

TEST(Cli, LognormalTable) {
  const Result r = run({"dyson", "lognormal-table", "--sigma", "0.6", "--T", "1", "--terms", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "n,dyson_partial,taylor_partial");
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_NEAR(rows[0][1], 0.3679, 5e-5);
  EXPECT_NEAR(rows[0][2], 1.0, 1e-15);
  EXPECT_NEAR(rows[9][2], -3.8787, 5e-5);
}

TEST(Cli, CsvRoundTripsValues) {
  bmrep::cli::Table table{{"n", "x"}, {{0, 0.1}, {1, 1.0 / 3}, {2, -2.718281828459045e-200}}};
  std::ostringstream out;
  bmrep::cli::write_csv(out, table);
  const auto rows = parse_csv(out.str());
  ASSERT_EQ(rows.size(), table.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i], table.rows[i]);
}

TEST(Cli, OutFile) {
  const auto path = std::filesystem::temp_directory_path() / "bmrep_cli_table.csv";
  const Result r = run({"dyson", "lognormal-table", "--terms", "3", "--out", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(parse_csv(buf.str()).size(), 3u);
  std::filesystem::remove(path);
}

TEST(Cli, BteExpandOnDefaultPath) {
  const Result r = run({"bte", "expand", "--expr", "pow(W(1),3)", "--t", "0", "--T", "1",
                        "--delta", "1", "--order", "3", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows.back()[3], 0.0);
}

TEST(Cli, BteMultiStepWithPathFile) {
  const auto path = std::filesystem::temp_directory_path() / "bmrep_cli_path.csv";
  {
    std::ofstream out(path);
    out << "time,value\n0,0\n0.5,1\n1,2\n";
  }
  const Result r = run({"bte", "expand", "--expr", "W(1)^3", "--t", "0.5", "--T", "1",
                        "--delta", "0.25", "--path", path.string(), "--format", "csv"});
  std::filesystem::remove(path);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(parse_csv(r.out)[0][0], 2.5, 1e-12);
}

TEST(Cli, DysonExamples) {
  const Result merton = run({"dyson", "eval", "--example", "merton", "--format", "csv"});
  ASSERT_EQ(merton.code, 0) << merton.err;
  EXPECT_NEAR(parse_csv(merton.out).back()[2], std::exp(1.0 / 6), 1e-10);
  const Result cubic =
      run({"dyson", "eval", "--example", "cubic", "--t", "0.5", "--w", "1", "--format", "csv"});
  EXPECT_EQ(parse_csv(cubic.out).back()[2], 2.5);
  const Result cir = run({"dyson", "cir", "--format", "csv"});
  ASSERT_EQ(cir.code, 0) << cir.err;
  EXPECT_NEAR(parse_csv(cir.out)[0][4], 0.990098988094, 5e-7);
}

TEST(Cli, OracleIsDeterministic) {
  const std::vector<std::string> args{"oracle", "mc", "--expr", "W(1)^2", "--samples", "4096",
                                      "--seed", "3", "--grid-step", "0.5"};
  const Result a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("standard_error"), std::string::npos);
}

TEST(Cli, SeedRequiredInCi) {
  setenv("CI", "1", 1);
  const Result r = run({"oracle", "mc", "--expr", "W(1)", "--samples", "16"});
  unsetenv("CI");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--seed"), std::string::npos);
}

TEST(Cli, ErrorsAndExitCodes) {
  const Result parse = run({"deriv", "--expr", "pow(W(1),3"});
  EXPECT_EQ(parse.code, 2);
  EXPECT_EQ(parse.err.rfind("error kind=parse offset=10 ", 0), 0u) << parse.err;
  EXPECT_EQ(run({"hermite", "--n", "2", "--x", "1", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"dyson", "eval", "--example", "nope"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  const Result numerical =
      run({"oracle", "mc", "--expr", "exp(scale(400,W(1)^2))", "--samples", "100", "--seed", "1",
           "--grid-step", "0.5"});
  EXPECT_EQ(numerical.code, 1);
  EXPECT_EQ(numerical.err.rfind("error kind=numerical module=mc_oracle operation=estimate", 0), 0u)
      << numerical.err;
}
