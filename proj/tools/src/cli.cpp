#include "bmrep_cli/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "bmrep/bte.hpp"
#include "bmrep/cir.hpp"
#include "bmrep/dyson.hpp"
#include "bmrep/error.hpp"
#include "bmrep/format.hpp"
#include "bmrep/lognormal.hpp"
#include "bmrep/malliavin.hpp"
#include "bmrep/mc.hpp"
#include "bmrep/parse.hpp"
#include "bmrep/special.hpp"
#include "bmrep_cli/csv.hpp"

namespace bmrep::cli {

namespace {

struct RunConfig {
  std::string format = "auto";
  std::string out_file;

  // hermite / stirling2 / gamma-coeff
  int n = 0;
  int k = 0;
  double x = 0.0;
  int l = 0;
  double dw = 0.0;
  double delta = 1.0;

  // expressions and windows
  std::string expr;
  double t = 0.0;
  double T = 1.0;
  std::optional<double> step;
  int order = 3;
  int iterated = 0;
  std::optional<int> terminal;
  std::string path_file;

  // dyson
  std::string example;
  std::optional<int> terms;
  double sigma = 0.6;
  double M = 0.0;
  std::optional<double> tau;
  double r = 0.05;
  int d = 1;
  double w = 0.0;
  std::string kernel = "poly[1]";
  std::string sigma_kernel = "poly[1]";
  std::string b_kernel = "poly[0]";
  int cir_order = 2;

  // oracle
  std::uint64_t samples = 1u << 20;
  std::optional<std::uint64_t> seed;
  double grid_step = 1.0 / 512.0;
  std::optional<double> cond_t;
  std::string prefix_file;
};

class Output {
 public:
  Output(std::ostream& stdout_stream, const std::string& file) : stream_(&stdout_stream) {
    if (!file.empty()) {
      file_.open(file);
      if (!file_) throw DomainError("cannot open output file '" + file + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator()() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n') ? ' ' : c;
  }
  return out + "\"";
}

void emit(std::ostream& out, const Table& table, const std::string& format) {
  if (format == "csv")
    write_csv(out, table);
  else
    write_table(out, table);
}

void emit_pairs(std::ostream& out, const std::vector<std::pair<std::string, double>>& pairs,
                const std::string& format) {
  if (format == "csv") {
    Table t;
    std::vector<double> row;
    for (const auto& [k, v] : pairs) {
      t.header.push_back(k);
      row.push_back(v);
    }
    t.rows.push_back(row);
    write_csv(out, t);
    return;
  }
  std::size_t width = 0;
  for (const auto& [k, v] : pairs) width = std::max(width, k.size());
  for (const auto& [k, v] : pairs)
    out << k << std::string(width - k.size() + 2, ' ') << format_number(v) << '\n';
}

// Zero path through every time the expression and window mention.
PathContext default_path(const Expr& f, std::initializer_list<double> extra) {
  std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
  for (double u : f.time_arguments()) knots.emplace_back(u, 0.0);
  for (double u : extra) knots.emplace_back(u, 0.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              knots.end());
  return PathContext::from_knots(std::move(knots));
}

PathContext load_path(const RunConfig& c, const Expr& f, std::initializer_list<double> extra) {
  if (!c.path_file.empty()) return read_path_csv_file(c.path_file);
  return default_path(f, extra);
}

std::string fmt(const RunConfig& c, const char* fallback) {
  return c.format == "auto" ? fallback : c.format;
}

int cmd_deriv(const RunConfig& c, std::ostream& out) {
  const Expr f = parse_expr(c.expr);
  Expr d;
  if (c.terminal) {
    d = derivative_at_terminal(f, *c.terminal, c.T);
  } else if (c.iterated > 0) {
    std::vector<SymbolicTime> times;
    for (int i = 1; i <= c.iterated; ++i) times.push_back({"s" + std::to_string(i), c.t, c.T});
    d = iterated_second_derivative(f, times);
  } else {
    d = malliavin_derivative(f, {"s", c.t, c.T});
  }
  out << d.text() << '\n';
  return 0;
}

int cmd_bte(const RunConfig& c, std::ostream& out) {
  const Expr f = parse_expr(c.expr);
  if (!(c.T > c.t)) throw DomainError("bte expand needs T > t");
  const double delta = c.step.value_or(c.T - c.t);
  const PathContext path = load_path(c, f, {c.t, c.T});
  const double steps = (c.T - c.t) / delta;
  const double m = c.t / delta;
  const std::string format = fmt(c, "table");
  if (std::abs(steps - 1.0) < 1e-9) {
    const BTEStep step = bte_expand(f, c.t, delta, c.order, path);
    Table table{{"l", "gamma", "derivative", "partial_sum"}, {}};
    for (std::size_t i = 0; i < step.terms.size(); ++i)
      table.rows.push_back({double(step.terms[i].order), step.terms[i].gamma,
                            step.terms[i].derivative, step.partial_sums[i]});
    emit(out, table, format);
    if (format != "csv") out << "value  " << format_number(step.value()) << '\n';
    return 0;
  }
  if (std::abs(steps - std::round(steps)) > 1e-9 || std::abs(m - std::round(m)) > 1e-9)
    throw DomainError("t and T must lie on the delta grid");
  const double v = bte_multi_step(f, static_cast<int>(std::round(m)),
                                  static_cast<int>(std::round(c.T / delta)), delta, c.order, path);
  emit_pairs(out, {{"value", v}}, format);
  return 0;
}

int cmd_dyson_eval(const RunConfig& c, std::ostream& out) {
  const std::string format = fmt(c, "table");
  if (c.example == "lognormal") {
    const auto s = lognormal_dyson_series(c.M, c.sigma, c.t, c.T, c.w, c.terms.value_or(10));
    Table table{{"n", "term", "partial_sum"}, {}};
    for (std::size_t i = 0; i < s.terms.size(); ++i)
      table.rows.push_back({double(i), s.terms[i], s.partial_sums[i]});
    emit(out, table, format);
    if (format != "csv" && s.smallest_term_index)
      out << "smallest_term_index  " << *s.smallest_term_index << '\n';
    return 0;
  }
  if (c.example == "cir") {
    const auto res = cir_price(c.tau.value_or(0.1), c.r, c.d, Kernel::polynomial({1.0}),
                               Kernel::polynomial({0.0}), c.cir_order, c.t);
    const double x = std::sqrt(2.0) * res.tau;
    const double closed = std::pow(1.0 / std::cosh(x), 0.5 * c.d) *
                          std::exp(-c.r * std::tanh(x) / std::sqrt(2.0));
    emit_pairs(out, {{"A0", res.A0}, {"A1", res.A1}, {"A2", res.A2}, {"price", res.price},
                     {"closed_form", closed}},
               format);
    return 0;
  }
  Expr f;
  double closed = 0.0;
  int default_terms = 20;
  const double t = c.t, T = c.T, w = c.w;
  if (c.example == "cubic") {
    f = examples::cubic(T);
    closed = examples::cubic_closed(t, T, w);
    default_terms = 4;
  } else if (c.example == "heat") {
    const double tau = c.tau.value_or(2.0);
    f = examples::heat_kernel(tau, T);
    closed = examples::heat_kernel_closed(tau, t, w);
    default_terms = 12;
  } else if (c.example == "merton") {
    f = examples::merton(T);
    closed = examples::merton_closed(t, T, w, 0.5 * w * t);
  } else if (c.example == "expfun") {
    const Kernel k = parse_kernel(c.kernel);
    f = examples::stochastic_exponential(k, T);
    const double slope = t > 0.0 ? w / t : 0.0;
    const double int_f_dw = slope * DeterministicKernel{k, 0.0, t}.integral();
    closed = examples::stochastic_exponential_closed(k, t, T, int_f_dw);
  } else {
    throw DomainError("unknown example '" + c.example + "'");
  }
  // path linear from 0 to w over [0, t]
  const PathContext path = t > 0.0 ? PathContext::from_knots({{t, w}, {T, w}})
                                   : PathContext::from_knots({{T, 0.0}});
  const auto e = conditional_expectation(f, t, T, path, c.terms.value_or(default_terms));
  Table table{{"n", "term", "partial_sum"}, {}};
  for (std::size_t i = 0; i < e.terms.size(); ++i)
    table.rows.push_back({double(i), e.terms[i], e.partial_sums[i]});
  emit(out, table, format);
  if (format != "csv") out << "closed_form  " << format_number(closed) << '\n';
  return 0;
}

int cmd_lognormal_table(const RunConfig& c, std::ostream& out) {
  const int n = c.terms.value_or(10);
  const auto dyson = lognormal_dyson_series(c.M, c.sigma, 0.0, c.T, 0.0, n);
  const auto taylor = lognormal_taylor_series(c.sigma, c.T, n);
  Table table{{"n", "dyson_partial", "taylor_partial"}, {}};
  for (int i = 0; i < n; ++i)
    table.rows.push_back({double(i), dyson.partial_sums[i], taylor.partial_sums[i]});
  emit(out, table, fmt(c, "csv"));
  return 0;
}

int cmd_dyson_cir(const RunConfig& c, std::ostream& out) {
  const Kernel sigma = parse_kernel(c.sigma_kernel);
  const Kernel b = parse_kernel(c.b_kernel);
  const double tau = c.tau.value_or(0.1);
  const auto res = cir_price(tau, c.r, c.d, sigma, b, c.cir_order, c.t);
  const double grid[] = {tau};
  const double ric = riccati_reference(grid, sigma, b, c.t)[0];
  emit_pairs(out,
             {{"A0", res.A0}, {"A1", res.A1}, {"A2", res.A2}, {"tau_tilde", res.tau_tilde},
              {"price", res.price}, {"C", res.C}, {"A", res.A}, {"riccati_C", ric},
              {"truncation_heuristic", res.truncation_heuristic}},
             fmt(c, "table"));
  return 0;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const Expr f = parse_expr(c.expr);
  if (!c.seed && std::getenv("CI")) throw DomainError("--seed is required when CI is set");
  const std::uint64_t seed = c.seed.value_or(7);
  MCEstimate est;
  if (c.cond_t) {
    const PathContext prefix = c.prefix_file.empty()
                                   ? PathContext::from_knots({{*c.cond_t, 0.0}})
                                   : read_path_csv_file(c.prefix_file);
    const double horizon = std::max(f.max_time(), *c.cond_t);
    est = estimate_conditional(f, *c.cond_t, prefix, TimeGrid::uniform(horizon, c.grid_step),
                               c.samples, seed);
  } else {
    est = estimate_expectation(f, TimeGrid::uniform(std::max(f.max_time(), 0.0), c.grid_step),
                               c.samples, seed);
  }
  emit_pairs(out,
             {{"mean", est.mean}, {"standard_error", est.standard_error},
              {"samples", double(est.samples)}, {"seed", double(est.seed)},
              {"grid_step", est.grid_step}},
             fmt(c, "table"));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional expectations of Brownian functionals"};
  app.name("bmrep");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;
  app.add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"auto", "table", "csv"}));
  app.add_option("--out", c.out_file, "Write results to this file");

  auto* hermite_cmd = app.add_subcommand("hermite", "Probabilists' Hermite polynomial h_n(x)");
  hermite_cmd->add_option("--n", c.n)->required()->check(CLI::NonNegativeNumber);
  hermite_cmd->add_option("--x", c.x)->required();

  auto* stirling_cmd = app.add_subcommand("stirling2", "Stirling number of the second kind");
  stirling_cmd->add_option("--n", c.n)->required()->check(CLI::NonNegativeNumber);
  stirling_cmd->add_option("--k", c.k)->required()->check(CLI::NonNegativeNumber);

  auto* gamma_cmd = app.add_subcommand("gamma-coeff", "Backward Taylor coefficient gamma(m, l)");
  gamma_cmd->add_option("--l", c.l)->required()->check(CLI::NonNegativeNumber);
  gamma_cmd->add_option("--dw", c.dw)->required();
  gamma_cmd->add_option("--delta", c.delta)->required()->check(CLI::PositiveNumber);

  auto* deriv_cmd = app.add_subcommand("deriv", "Symbolic Malliavin derivative");
  deriv_cmd->add_option("--expr", c.expr)->required();
  deriv_cmd->add_option("--t", c.t, "Lower end of the symbolic time interval");
  deriv_cmd->add_option("--T", c.T, "Upper end of the symbolic time interval");
  deriv_cmd->add_option("--iterated", c.iterated, "Number of D^2 applications")
      ->check(CLI::NonNegativeNumber);
  deriv_cmd->add_option("--terminal", c.terminal, "Order of D_T^l at T")
      ->check(CLI::NonNegativeNumber);

  auto* bte_cmd = app.add_subcommand("bte", "Backward Taylor expansion");
  bte_cmd->require_subcommand(1);
  auto* bte_expand_cmd = bte_cmd->add_subcommand("expand", "Expand E[F | F_t]");
  bte_expand_cmd->add_option("--expr", c.expr)->required();
  bte_expand_cmd->add_option("--t", c.t)->check(CLI::NonNegativeNumber);
  bte_expand_cmd->add_option("--T", c.T)->check(CLI::PositiveNumber);
  bte_expand_cmd->add_option("--delta", c.step)->check(CLI::PositiveNumber);
  bte_expand_cmd->add_option("--order", c.order)->check(CLI::NonNegativeNumber);
  bte_expand_cmd->add_option("--path", c.path_file, "CSV with columns time,value");

  auto* dyson_cmd = app.add_subcommand("dyson", "Dyson series conditional expectations");
  dyson_cmd->require_subcommand(1);
  auto* eval_cmd = dyson_cmd->add_subcommand("eval", "Run one of the worked examples");
  eval_cmd->add_option("--example", c.example)
      ->required()
      ->check(CLI::IsMember({"cubic", "heat", "merton", "lognormal", "cir", "expfun"}));
  eval_cmd->add_option("--t", c.t)->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--T", c.T)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--terms", c.terms)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--sigma", c.sigma)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--M", c.M);
  eval_cmd->add_option("--tau", c.tau)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--r", c.r);
  eval_cmd->add_option("--d", c.d)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--w", c.w, "Value of W(t)");
  eval_cmd->add_option("--kernel", c.kernel, "Kernel f of the stochastic exponential");

  auto* table_cmd = dyson_cmd->add_subcommand("lognormal-table", "Dyson and Taylor partial sums");
  table_cmd->add_option("--sigma", c.sigma)->check(CLI::PositiveNumber);
  table_cmd->add_option("--T", c.T)->check(CLI::PositiveNumber);
  table_cmd->add_option("--M", c.M);
  table_cmd->add_option("--terms", c.terms)->check(CLI::Range(1, kMaxLognormalTerms));
  table_cmd->add_option("--out", c.out_file);

  auto* cir_cmd = dyson_cmd->add_subcommand("cir", "Extended CIR bond price");
  cir_cmd->add_option("--tau", c.tau)->check(CLI::PositiveNumber);
  cir_cmd->add_option("--r", c.r);
  cir_cmd->add_option("--d", c.d)->check(CLI::PositiveNumber);
  cir_cmd->add_option("--t", c.t)->check(CLI::NonNegativeNumber);
  cir_cmd->add_option("--order", c.cir_order)->check(CLI::Range(0, 2));
  cir_cmd->add_option("--sigma-kernel", c.sigma_kernel);
  cir_cmd->add_option("--b-kernel", c.b_kernel);

  auto* oracle_cmd = app.add_subcommand("oracle", "Monte Carlo oracle");
  oracle_cmd->require_subcommand(1);
  auto* mc_cmd = oracle_cmd->add_subcommand("mc", "Estimate E[F] or E[F | F_t]");
  mc_cmd->add_option("--expr", c.expr)->required();
  mc_cmd->add_option("--samples", c.samples)->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", c.seed);
  mc_cmd->add_option("--grid-step", c.grid_step)->check(CLI::PositiveNumber);
  mc_cmd->add_option("--t", c.cond_t)->check(CLI::NonNegativeNumber);
  mc_cmd->add_option("--prefix", c.prefix_file, "CSV prefix path with columns time,value");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Output sink(out, c.out_file);
    std::ostream& o = sink();
    if (hermite_cmd->parsed()) {
      o << format_number(hermite(c.n, c.x)) << '\n';
    } else if (stirling_cmd->parsed()) {
      o << stirling2(c.n, c.k).str() << '\n';
    } else if (gamma_cmd->parsed()) {
      o << format_number(gamma_coeff(c.l, c.dw, c.delta)) << '\n';
    } else if (deriv_cmd->parsed()) {
      return cmd_deriv(c, o);
    } else if (bte_expand_cmd->parsed()) {
      return cmd_bte(c, o);
    } else if (eval_cmd->parsed()) {
      return cmd_dyson_eval(c, o);
    } else if (table_cmd->parsed()) {
      return cmd_lognormal_table(c, o);
    } else if (cir_cmd->parsed()) {
      return cmd_dyson_cir(c, o);
    } else if (mc_cmd->parsed()) {
      return cmd_oracle(c, o);
    }
    return 0;
  } catch (const ParseError& e) {
    err << "error kind=parse offset=" << e.offset() << " message=" << quoted(e.what()) << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error kind=usage message=" << quoted(e.what()) << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "error kind=numerical module=" << e.module() << " operation=" << e.operation()
        << " message=" << quoted(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error kind=failure message=" << quoted(e.what()) << '\n';
    return 1;
  }
}

}  // namespace bmrep::cli
