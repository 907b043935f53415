#include "bmrep/expr.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "bmrep/error.hpp"
#include "bmrep/format.hpp"
#include "bmrep/special.hpp"

namespace bmrep {

// ---------------------------------------------------------------- smooth

namespace {

double expnegexp_derivative(int n, double x) {
  // d^n/dx^n exp(-e^x) = exp(-e^x) sum_i (-1)^i S(n, i) e^{i x}
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = stirling2_double(n, i);
    if (s == 0.0) continue;
    sum += ((i % 2 == 0) ? s : -s) * std::exp(i * x);
  }
  return std::exp(-std::exp(x)) * sum;
}

double gauss_derivative(int n, double x) {
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite(n, x) * std::exp(-0.5 * x * x);
}

const std::vector<SmoothFunction>& registry() {
  static const std::vector<SmoothFunction> fns{
      {"exp", [](int, double x) { return std::exp(x); }},
      {"expnegexp", expnegexp_derivative},
      {"gauss", gauss_derivative},
  };
  return fns;
}

}  // namespace

const SmoothFunction& smooth_function(const std::string& name) {
  for (const auto& f : registry())
    if (f.name == name) return f;
  throw DomainError("unregistered smooth function '" + name + "'");
}

std::vector<std::string> smooth_function_names() {
  std::vector<std::string> out;
  for (const auto& f : registry()) out.push_back(f.name);
  return out;
}

// ---------------------------------------------------------------- atoms

struct Atom::Data {
  AtomKind kind;
  double u = 0.0;
  DeterministicKernel kernel;
  double a = 0.0;
  double b = 0.0;
  std::string name;
  int order = 0;
  std::shared_ptr<const Expr> argument;
  std::string key;
};

namespace {

void check_time(double u) {
  if (!(u >= 0.0) || !std::isfinite(u))
    throw DomainError("time argument " + format_number(u) + " must be a finite nonnegative time");
}

void check_interval(double a, double b) {
  check_time(a);
  check_time(b);
  if (a > b) throw DomainError("integral bounds must satisfy a <= b");
}

}  // namespace

Atom Atom::brownian(double u) {
  check_time(u);
  auto d = std::make_shared<Data>();
  d->kind = AtomKind::brownian;
  d->u = u;
  d->key = "W(" + format_number(u) + ")";
  return Atom(std::move(d));
}

Atom Atom::wiener_integral(const DeterministicKernel& f) {
  check_interval(f.lo, f.hi);
  auto d = std::make_shared<Data>();
  d->kind = AtomKind::wiener_integral;
  d->kernel = f;
  d->a = f.lo;
  d->b = f.hi;
  d->key = "wint(" + f.text() + ")";
  return Atom(std::move(d));
}

Atom Atom::time_integral(double a, double b) {
  check_interval(a, b);
  auto d = std::make_shared<Data>();
  d->kind = AtomKind::time_integral;
  d->a = a;
  d->b = b;
  d->key = "intdt(W," + format_number(a) + "," + format_number(b) + ")";
  return Atom(std::move(d));
}

Atom Atom::smooth(const std::string& name, int order, const Expr& argument) {
  smooth_function(name);
  if (order < 0) throw DomainError("smooth derivative order must be nonnegative");
  auto d = std::make_shared<Data>();
  d->kind = AtomKind::smooth;
  d->name = name;
  d->order = order;
  d->argument = std::make_shared<const Expr>(argument);
  d->key = order == 0 ? "apply(" + name + "," + argument.text() + ")"
                      : "dapply(" + name + "," + std::to_string(order) + "," +
                            argument.text() + ")";
  return Atom(std::move(d));
}

AtomKind Atom::kind() const noexcept { return d_->kind; }
double Atom::time() const noexcept { return d_->u; }
const DeterministicKernel& Atom::kernel() const noexcept { return d_->kernel; }
double Atom::lo() const noexcept { return d_->a; }
double Atom::hi() const noexcept { return d_->b; }
const std::string& Atom::function_name() const noexcept { return d_->name; }
int Atom::order() const noexcept { return d_->order; }
const Expr& Atom::argument() const noexcept { return *d_->argument; }
const std::string& Atom::key() const noexcept { return d_->key; }

double PathEvaluator::value(const Atom& atom) const {
  switch (atom.kind()) {
    case AtomKind::brownian: return path_.brownian(atom.time());
    case AtomKind::wiener_integral: return path_.wiener_integral(atom.kernel());
    case AtomKind::time_integral: return path_.time_integral(atom.lo(), atom.hi());
    case AtomKind::smooth: break;
  }
  throw DomainError("not a path primitive: " + atom.key());
}

// ---------------------------------------------------------------- time factors

double TimeFactor::operator()(double s) const {
  if (s > chi) return 0.0;
  double v = 1.0;
  for (const auto& [k, p] : kernels) v *= std::pow(k(s), p);
  for (const auto& [r, p] : ramps) v *= std::pow(std::max(0.0, r.b - std::max(s, r.a)), p);
  return v;
}

PiecewiseFunction TimeFactor::function() const {
  PiecewiseFunction f = PiecewiseFunction::constant(1.0, time.lo, std::min(time.hi, chi));
  for (const auto& [k, p] : kernels) {
    const auto g = PiecewiseFunction::from_kernel(k);
    for (int i = 0; i < p; ++i) f = f * g;
  }
  for (const auto& [r, p] : ramps) {
    const auto g = PiecewiseFunction::ramp(r.a, r.b, time.lo, time.hi);
    for (int i = 0; i < p; ++i) f = f * g;
  }
  return f;
}

std::vector<double> TimeFactor::breakpoints() const {
  std::vector<double> pts;
  auto push = [&](double x) {
    if (x > time.lo && x < time.hi) pts.push_back(x);
  };
  push(chi);
  for (const auto& [k, p] : kernels) {
    push(k.lo);
    push(k.hi);
  }
  for (const auto& [r, p] : ramps) {
    push(r.a);
    push(r.b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::string TimeFactor::text() const {
  std::string out;
  auto sep = [&]() {
    if (!out.empty()) out += '*';
  };
  auto power = [](int p) { return p == 1 ? std::string() : "^" + std::to_string(p); };
  if (std::isfinite(chi)) out += "chi(" + time.name + "," + format_number(chi) + ")";
  for (const auto& [k, p] : kernels) {
    sep();
    out += "ker(" + time.name + "," + k.text() + ")" + power(p);
  }
  for (const auto& [r, p] : ramps) {
    sep();
    out += "ramp(" + time.name + "," + format_number(r.a) + "," + format_number(r.b) + ")" +
           power(p);
  }
  return out;
}

namespace {

// Normalizes a factor in place. Returns a scalar when the factor collapses
// to a constant (degenerate interval, vanishing support or no content).
std::optional<double> simplify(TimeFactor& f) {
  const double lo = f.time.lo;
  const double hi = f.time.hi;
  std::sort(f.kernels.begin(), f.kernels.end(),
            [](const auto& x, const auto& y) { return x.first.text() < y.first.text(); });
  std::vector<std::pair<DeterministicKernel, int>> ks;
  for (auto& kp : f.kernels) {
    if (!ks.empty() && ks.back().first.text() == kp.first.text())
      ks.back().second += kp.second;
    else
      ks.push_back(kp);
  }
  f.kernels = std::move(ks);
  std::sort(f.ramps.begin(), f.ramps.end(), [](const auto& x, const auto& y) {
    return std::pair(x.first.a, x.first.b) < std::pair(y.first.a, y.first.b);
  });
  std::vector<std::pair<Ramp, int>> rs;
  for (auto& rp : f.ramps) {
    if (!rs.empty() && rs.back().first.a == rp.first.a && rs.back().first.b == rp.first.b)
      rs.back().second += rp.second;
    else
      rs.push_back(rp);
  }
  f.ramps = std::move(rs);

  if (lo == hi) return f(lo);

  if (f.chi >= hi) f.chi = std::numeric_limits<double>::infinity();
  if (f.chi <= lo) return 0.0;
  for (const auto& [k, p] : f.kernels) {
    if (k.hi <= lo || k.lo >= hi || k.function.is_zero()) return 0.0;
    if (k.hi <= f.chi) f.chi = std::numeric_limits<double>::infinity();
  }
  for (const auto& [r, p] : f.ramps) {
    if (r.b <= lo) return 0.0;
    if (r.b <= f.chi) f.chi = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(f.chi) && f.kernels.empty() && f.ramps.empty()) return 1.0;
  return std::nullopt;
}

std::string power_suffix(int p) { return p == 1 ? std::string() : "^" + std::to_string(p); }

void finalize_key(Term& t) {
  std::string key;
  auto sep = [&]() {
    if (!key.empty()) key += '*';
  };
  for (const auto& [a, p] : t.atoms) {
    sep();
    key += a.key() + power_suffix(p);
  }
  if (t.exponent) {
    sep();
    key += "exp(" + t.exponent->text() + ")";
  }
  for (const auto& f : t.times) {
    sep();
    key += f.text();
  }
  t.key = std::move(key);
}

std::optional<Term> product(const Term& a, const Term& b) {
  Term t;
  t.coef = a.coef * b.coef;
  if (t.coef == 0.0) return std::nullopt;
  // atoms: merge sorted lists
  std::size_t i = 0, j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    if (j == b.atoms.size() || (i < a.atoms.size() && a.atoms[i].first.key() < b.atoms[j].first.key())) {
      t.atoms.push_back(a.atoms[i++]);
    } else if (i == a.atoms.size() || b.atoms[j].first.key() < a.atoms[i].first.key()) {
      t.atoms.push_back(b.atoms[j++]);
    } else {
      t.atoms.emplace_back(a.atoms[i].first, a.atoms[i].second + b.atoms[j].second);
      ++i;
      ++j;
    }
  }
  if (a.exponent && b.exponent) {
    Expr sum = *a.exponent + *b.exponent;
    if (!sum.is_zero()) t.exponent = std::make_shared<const Expr>(std::move(sum));
  } else {
    t.exponent = a.exponent ? a.exponent : b.exponent;
  }
  i = 0;
  j = 0;
  std::vector<TimeFactor> merged;
  while (i < a.times.size() || j < b.times.size()) {
    if (j == b.times.size() || (i < a.times.size() && a.times[i].time.name < b.times[j].time.name)) {
      merged.push_back(a.times[i++]);
    } else if (i == a.times.size() || b.times[j].time.name < a.times[i].time.name) {
      merged.push_back(b.times[j++]);
    } else {
      TimeFactor f = a.times[i];
      const TimeFactor& g = b.times[j];
      f.chi = std::min(f.chi, g.chi);
      f.kernels.insert(f.kernels.end(), g.kernels.begin(), g.kernels.end());
      f.ramps.insert(f.ramps.end(), g.ramps.begin(), g.ramps.end());
      merged.push_back(std::move(f));
      ++i;
      ++j;
    }
  }
  for (auto& f : merged) {
    if (auto scalar = simplify(f)) {
      t.coef *= *scalar;
      if (t.coef == 0.0) return std::nullopt;
    } else {
      t.times.push_back(std::move(f));
    }
  }
  finalize_key(t);
  return t;
}

Term unit_term(double c) {
  Term t;
  t.coef = c;
  return t;
}

void collect_atoms(const Expr& e, std::map<std::string, Atom>& out);

void collect_atom(const Atom& a, std::map<std::string, Atom>& out) {
  if (a.kind() == AtomKind::smooth)
    collect_atoms(a.argument(), out);
  else
    out.emplace(a.key(), a);
}

void collect_atoms(const Expr& e, std::map<std::string, Atom>& out) {
  for (const auto& t : e.terms()) {
    for (const auto& [a, p] : t.atoms) collect_atom(a, out);
    if (t.exponent) collect_atoms(*t.exponent, out);
  }
}

}  // namespace

// ---------------------------------------------------------------- Expr

Expr Expr::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.key < y.key; });
  Expr out;
  std::size_t i = 0;
  while (i < terms.size()) {
    std::size_t j = i;
    double sum = 0.0;
    double mass = 0.0;
    while (j < terms.size() && terms[j].key == terms[i].key) {
      sum += terms[j].coef;
      mass += std::abs(terms[j].coef);
      ++j;
    }
    const bool cancelled =
        sum == 0.0 || (j - i > 1 && std::abs(sum) <= 4.0 * std::numeric_limits<double>::epsilon() * mass);
    if (!cancelled) {
      Term t = std::move(terms[i]);
      t.coef = sum;
      out.terms_.push_back(std::move(t));
    }
    i = j;
  }
  return out;
}

Expr Expr::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("constant must be finite");
  Expr e;
  if (c != 0.0) e.terms_.push_back(unit_term(c));
  return e;
}

Expr Expr::from_atom(const Atom& atom) {
  Term t = unit_term(1.0);
  t.atoms.emplace_back(atom, 1);
  finalize_key(t);
  Expr e;
  e.terms_.push_back(std::move(t));
  return e;
}

Expr Expr::from_factor(const TimeFactor& factor) {
  TimeFactor f = factor;
  if (auto scalar = simplify(f)) return constant(*scalar);
  Term t = unit_term(1.0);
  t.times.push_back(std::move(f));
  finalize_key(t);
  Expr e;
  e.terms_.push_back(std::move(t));
  return e;
}

Expr Expr::from_term(Term term) {
  if (term.coef == 0.0) return Expr();
  finalize_key(term);
  Expr e;
  e.terms_.push_back(std::move(term));
  return e;
}

Expr Expr::brownian(double u) { return from_atom(Atom::brownian(u)); }

Expr Expr::wiener_integral(const Kernel& f, double a, double b) {
  check_interval(a, b);
  if (a == b || f.is_zero()) return Expr();
  return from_atom(Atom::wiener_integral(DeterministicKernel{f, a, b}));
}

Expr Expr::time_integral(double a, double b) {
  check_interval(a, b);
  if (a == b) return Expr();
  return from_atom(Atom::time_integral(a, b));
}

Expr Expr::exp(const Expr& argument) {
  if (argument.has_time_factors())
    throw ClosureError("exp argument cannot depend on symbolic times");
  const double c = argument.constant_term();
  Expr rest = argument - constant(c);
  if (rest.is_zero()) return constant(std::exp(c));
  Term t = unit_term(std::exp(c));
  if (!std::isfinite(t.coef)) throw NumericalError("functional_dsl", "exp", "constant factor overflows");
  t.exponent = std::make_shared<const Expr>(std::move(rest));
  finalize_key(t);
  Expr e;
  e.terms_.push_back(std::move(t));
  return e;
}

Expr Expr::apply(const std::string& name, const Expr& argument, int order) {
  const auto& fn = smooth_function(name);
  if (order < 0) throw DomainError("smooth derivative order must be nonnegative");
  if (name == "exp") return exp(argument);
  if (argument.has_time_factors())
    throw ClosureError("smooth argument cannot depend on symbolic times");
  if (argument.is_constant()) return constant(fn.derivative(order, argument.constant_term()));
  return from_atom(Atom::smooth(name, order, argument));
}

bool Expr::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].key.empty());
}

double Expr::constant_term() const noexcept {
  for (const auto& t : terms_)
    if (t.key.empty()) return t.coef;
  return 0.0;
}

bool Expr::has_time_factors() const noexcept {
  return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return !t.times.empty(); });
}

std::string Expr::text() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    const bool neg = t.coef < 0.0;
    const double mag = std::abs(t.coef);
    if (first)
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    first = false;
    if (t.key.empty())
      out += format_number(mag);
    else if (mag == 1.0)
      out += t.key;
    else
      out += format_number(mag) + "*" + t.key;
  }
  return out;
}

Expr Expr::operator-() const { return scaled(-1.0); }

Expr Expr::scaled(double c) const {
  if (c == 0.0) return Expr();
  Expr out = *this;
  for (auto& t : out.terms_) t.coef *= c;
  return out;
}

Expr Expr::pow(int n) const {
  if (n < 0) throw DomainError("power exponent must be a nonnegative integer");
  Expr result = constant(1.0);
  Expr base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::vector<Term> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return Expr::from_terms(std::move(terms));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  std::vector<Term> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_)
      if (auto t = product(x, y)) terms.push_back(std::move(*t));
  return Expr::from_terms(std::move(terms));
}

bool operator==(const Expr& a, const Expr& b) { return a.text() == b.text(); }

namespace {

double atom_value(const Atom& a, const AtomEvaluator& ev) {
  if (a.kind() != AtomKind::smooth) return ev.value(a);
  const double x = a.argument().evaluate(ev);
  return smooth_function(a.function_name()).derivative(a.order(), x);
}

double path_part(const Term& t, const AtomEvaluator& ev) {
  double v = t.coef;
  for (const auto& [a, p] : t.atoms) {
    const double x = atom_value(a, ev);
    v *= (p == 1) ? x : std::pow(x, p);
  }
  if (t.exponent) v *= std::exp(t.exponent->evaluate(ev));
  return v;
}

}  // namespace

std::vector<double> Expr::term_values(const AtomEvaluator& atoms) const {
  std::vector<double> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(path_part(t, atoms));
  return out;
}

double Expr::evaluate(const AtomEvaluator& atoms, const TimeAssignment* times) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double v = path_part(t, atoms);
    for (const auto& f : t.times) {
      if (!times) throw DomainError("symbolic time '" + f.time.name + "' has no value");
      auto it = times->find(f.time.name);
      if (it == times->end()) throw DomainError("symbolic time '" + f.time.name + "' has no value");
      v *= f(it->second);
    }
    if (!std::isfinite(v))
      throw NumericalError("functional_dsl", "evaluate",
                           "non-finite value in term '" + (t.key.empty() ? std::string("1") : t.key) + "'");
    total += v;
  }
  return total;
}

double Expr::evaluate(const PathContext& path, const TimeAssignment* times) const {
  return evaluate(PathEvaluator(path), times);
}

namespace {

Expr freeze_atom(const Atom& a, double t) {
  switch (a.kind()) {
    case AtomKind::brownian: return Expr::brownian(std::min(a.time(), t));
    case AtomKind::wiener_integral: {
      const double lo = std::min(a.lo(), t);
      const double hi = std::min(a.hi(), t);
      return Expr::wiener_integral(a.kernel().function, lo, hi);
    }
    case AtomKind::time_integral: {
      Expr out = Expr::time_integral(std::min(a.lo(), t), std::min(a.hi(), t));
      const double tail = a.hi() - std::max(a.lo(), t);
      if (tail > 0.0) out = out + Expr::brownian(t).scaled(tail);
      return out;
    }
    case AtomKind::smooth:
      return Expr::apply(a.function_name(), a.argument().freeze(t), a.order());
  }
  return Expr();
}

Expr rebuild(const Term& t, const std::function<Expr(const Atom&)>& map_atom,
             const std::function<Expr(const Expr&)>& map_exponent) {
  Expr out = Expr::constant(t.coef);
  for (const auto& [a, p] : t.atoms) out = out * map_atom(a).pow(p);
  if (t.exponent) out = out * Expr::exp(map_exponent(*t.exponent));
  for (const auto& f : t.times) out = out * Expr::from_factor(f);
  return out;
}

}  // namespace

Expr Expr::freeze(double t) const {
  check_time(t);
  std::vector<Term> terms;
  for (const auto& term : terms_) {
    Expr e = rebuild(
        term, [t](const Atom& a) { return freeze_atom(a, t); },
        [t](const Expr& x) { return x.freeze(t); });
    terms.insert(terms.end(), e.terms_.begin(), e.terms_.end());
  }
  return from_terms(std::move(terms));
}

Expr Expr::integrate_time(const SymbolicTime& s) const {
  std::vector<Term> terms;
  for (const auto& term : terms_) {
    Term t = term;
    auto it = std::find_if(t.times.begin(), t.times.end(),
                           [&](const TimeFactor& f) { return f.time.name == s.name; });
    if (it == t.times.end()) {
      t.coef *= s.hi - s.lo;
    } else {
      t.coef *= it->integral();
      t.times.erase(it);
    }
    if (t.coef == 0.0) continue;
    finalize_key(t);
    terms.push_back(std::move(t));
  }
  return from_terms(std::move(terms));
}

Expr Expr::pin_time(const std::string& name, double value) const {
  std::vector<Term> terms;
  for (const auto& term : terms_) {
    Term t = term;
    auto it = std::find_if(t.times.begin(), t.times.end(),
                           [&](const TimeFactor& f) { return f.time.name == name; });
    if (it != t.times.end()) {
      t.coef *= (*it)(value);
      t.times.erase(it);
      finalize_key(t);
    }
    if (t.coef == 0.0) continue;
    terms.push_back(std::move(t));
  }
  return from_terms(std::move(terms));
}

std::vector<Atom> Expr::path_atoms() const {
  std::map<std::string, Atom> found;
  collect_atoms(*this, found);
  std::vector<Atom> out;
  for (auto& [k, a] : found) out.push_back(a);
  return out;
}

std::vector<double> Expr::time_arguments() const {
  std::set<double> ts;
  for (const auto& a : path_atoms()) {
    if (a.kind() == AtomKind::brownian) {
      ts.insert(a.time());
    } else {
      ts.insert(a.lo());
      ts.insert(a.hi());
    }
  }
  return {ts.begin(), ts.end()};
}

double Expr::max_time() const {
  const auto ts = time_arguments();
  return ts.empty() ? 0.0 : ts.back();
}

bool Expr::is_cylindrical() const {
  const auto atoms = path_atoms();
  return std::all_of(atoms.begin(), atoms.end(),
                     [](const Atom& a) { return a.kind() == AtomKind::brownian; });
}

double directional_derivative_oracle(const Expr& f, const DeterministicKernel& h,
                                     const PathContext& path, double eps) {
  if (!(eps > 0.0)) throw DomainError("oracle step must be positive");
  const double up = f.evaluate(path.shifted(h, eps));
  const double down = f.evaluate(path.shifted(h, -eps));
  const double v = (up - down) / (2.0 * eps);
  if (!std::isfinite(v))
    throw NumericalError("functional_dsl", "directional_derivative_oracle", "non-finite difference");
  return v;
}

}  // namespace bmrep
