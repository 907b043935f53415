#include "bmrep/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <mutex>
#include <unordered_map>

#include "bmrep/error.hpp"
#include "bmrep/format.hpp"

namespace bmrep {

namespace {

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

// Atom values read from a value array through precomputed linear forms.
class GridEvaluator final : public AtomEvaluator {
 public:
  GridEvaluator(const Expr& f, const std::vector<double>& grid) {
    for (const auto& a : f.path_atoms()) {
      LinearForm form;
      switch (a.kind()) {
        case AtomKind::brownian: form = forms::brownian(grid, a.time()); break;
        case AtomKind::wiener_integral: form = forms::wiener_integral(grid, a.kernel()); break;
        case AtomKind::time_integral: form = forms::time_integral(grid, a.lo(), a.hi()); break;
        case AtomKind::smooth: continue;
      }
      forms_.emplace(a.key(), std::move(form));
    }
  }

  void bind(std::span<const double> values) { values_ = values; }

  double value(const Atom& atom) const override {
    auto it = forms_.find(atom.key());
    if (it == forms_.end()) throw DomainError("atom not prepared: " + atom.key());
    return it->second.apply(values_);
  }

 private:
  std::unordered_map<std::string, LinearForm> forms_;
  std::span<const double> values_;
};

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
};

Moments combine(const Moments& a, const Moments& b) {
  if (a.n == 0.0) return b;
  if (b.n == 0.0) return a;
  Moments out;
  out.n = a.n + b.n;
  const double d = b.mean - a.mean;
  out.mean = a.mean + d * (b.n / out.n);
  out.m2 = a.m2 + b.m2 + d * d * (a.n * b.n / out.n);
  return out;
}

Moments pairwise(std::span<const Moments> parts) {
  if (parts.empty()) return {};
  if (parts.size() == 1) return parts[0];
  const std::size_t mid = parts.size() / 2;
  return combine(pairwise(parts.first(mid)), pairwise(parts.subspan(mid)));
}

// Runs sample(k, engine, values) for every k and reduces deterministically.
// `fixed` holds the prefix of the value array that is never simulated.
template <class Eval>
Moments run_blocks(std::uint64_t n, std::uint64_t seed, std::uint64_t block_size, unsigned threads,
                   const std::vector<double>& grid, std::size_t first_free,
                   const std::vector<double>& fixed, Eval&& eval_factory) {
  if (block_size == 0) throw DomainError("block size must be positive");
  const std::uint64_t blocks = (n + block_size - 1) / block_size;
  std::vector<Moments> results(blocks);
  std::atomic<std::uint64_t> next{0};
  std::vector<double> sd(grid.size(), 0.0);
  for (std::size_t j = first_free; j < grid.size(); ++j) sd[j] = std::sqrt(grid[j] - grid[j - 1]);

  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    auto eval = eval_factory();
    std::vector<double> values(grid.size(), 0.0);
    std::copy(fixed.begin(), fixed.end(), values.begin());
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= blocks || failed.load()) return;
      auto engine = block_engine(seed, b);
      std::normal_distribution<double> normal(0.0, 1.0);
      Moments m;
      const std::uint64_t end = std::min(n, (b + 1) * block_size);
      for (std::uint64_t k = b * block_size; k < end; ++k) {
        for (std::size_t j = first_free; j < grid.size(); ++j)
          values[j] = values[j - 1] + sd[j] * normal(engine);
        double x;
        try {
          x = eval(values);
        } catch (const Error&) {
          x = NAN;
        }
        if (!std::isfinite(x)) {
          std::lock_guard lock(failure_mutex);
          if (!failed.exchange(true)) failure = "non-finite sample at index " + std::to_string(k);
          return;
        }
        m.add(x);
      }
      results[b] = m;
    }
  };
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(blocks, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed) throw NumericalError("mc_oracle", "estimate", failure);
  return pairwise(results);
}

MCEstimate to_estimate(const Moments& m, std::uint64_t seed, double step) {
  MCEstimate e;
  e.samples = static_cast<std::uint64_t>(m.n);
  e.mean = m.mean;
  e.seed = seed;
  e.grid_step = step;
  e.standard_error = m.n > 1.0 ? std::sqrt(m.m2 / (m.n - 1.0) / m.n) : 0.0;
  return e;
}

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  std::vector<double> out;
  for (double x : a) {
    if (!out.empty() && std::abs(x - out.back()) <= 1e-12 * std::max(1.0, std::abs(x))) continue;
    out.push_back(x);
  }
  return out;
}

}  // namespace

TimeGrid TimeGrid::uniform(double horizon, double step) {
  if (!(horizon >= 0.0) || !(step > 0.0)) throw DomainError("grid needs horizon >= 0 and step > 0");
  TimeGrid g;
  const auto n = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
  for (std::size_t j = 0; j <= n; ++j) g.times.push_back(std::min(horizon, j * step));
  if (g.times.size() > 1 && g.times[g.times.size() - 1] == g.times[g.times.size() - 2])
    g.times.pop_back();
  return g;
}

double TimeGrid::max_step() const {
  double h = 0.0;
  for (std::size_t j = 1; j < times.size(); ++j) h = std::max(h, times[j] - times[j - 1]);
  return h;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("BMREP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::vector<double>> simulate_paths(const TimeGrid& grid, std::uint64_t n,
                                                std::uint64_t seed, std::uint64_t block_size) {
  if (grid.times.empty() || grid.times.front() != 0.0) throw DomainError("grid must start at 0");
  if (block_size == 0) throw DomainError("block size must be positive");
  std::vector<std::vector<double>> paths;
  paths.reserve(n);
  std::vector<double> sd(grid.times.size(), 0.0);
  for (std::size_t j = 1; j < grid.times.size(); ++j)
    sd[j] = std::sqrt(grid.times[j] - grid.times[j - 1]);
  for (std::uint64_t b = 0; b * block_size < n; ++b) {
    auto engine = block_engine(seed, b);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::uint64_t k = b * block_size; k < std::min(n, (b + 1) * block_size); ++k) {
      std::vector<double> v(grid.times.size(), 0.0);
      for (std::size_t j = 1; j < v.size(); ++j) v[j] = v[j - 1] + sd[j] * normal(engine);
      paths.push_back(std::move(v));
    }
  }
  return paths;
}

MCEstimate estimate_expectation(const Expr& f, const TimeGrid& grid, std::uint64_t n,
                                std::uint64_t seed, const MCOptions& options) {
  if (n < 1) throw DomainError("estimate_expectation needs at least one sample");
  // point values only: the intermediate grid adds nothing to the law of F
  auto times = merged(f.is_cylindrical() ? std::vector<double>{} : grid.times, f.time_arguments());
  times = merged(std::move(times), {0.0});
  if (times.front() != 0.0) throw DomainError("grid times must be nonnegative");
  const auto factory = [&]() {
    return [ev = std::make_shared<GridEvaluator>(f, times), &f](const std::vector<double>& v) {
      ev->bind(v);
      return f.evaluate(*ev);
    };
  };
  const Moments m = run_blocks(n, seed, options.block_size, options.threads, times, 1, {0.0}, factory);
  return to_estimate(m, seed, TimeGrid{times}.max_step());
}

MCEstimate estimate_conditional(const Expr& f, double t, const PathContext& prefix,
                                const TimeGrid& grid, std::uint64_t n, std::uint64_t seed,
                                const MCOptions& options) {
  if (n < 1) throw DomainError("estimate_conditional needs at least one sample");
  if (t > prefix.coverage() * (1.0 + 1e-12))
    throw DomainError("prefix covers [0, " + format_number(prefix.coverage()) + "] but t = " +
                      format_number(t));
  const PathContext plain = prefix.with_horizon(std::nullopt);
  std::vector<double> times;
  std::vector<double> fixed;
  for (std::size_t j = 0; j < prefix.times().size() && prefix.times()[j] < t; ++j) {
    times.push_back(prefix.times()[j]);
    fixed.push_back(prefix.values()[j]);
  }
  times.push_back(t);
  fixed.push_back(plain.brownian(t));
  std::vector<double> later;
  for (double x : merged(f.is_cylindrical() ? std::vector<double>{} : grid.times,
                         f.time_arguments()))
    if (x > t * (1.0 + 1e-12) + 1e-15) later.push_back(x);
  const std::size_t first_free = times.size();
  times.insert(times.end(), later.begin(), later.end());
  const auto factory = [&]() {
    return [ev = std::make_shared<GridEvaluator>(f, times), &f](const std::vector<double>& v) {
      ev->bind(v);
      return f.evaluate(*ev);
    };
  };
  const Moments m =
      run_blocks(n, seed, options.block_size, options.threads, times, first_free, fixed, factory);
  return to_estimate(m, seed, TimeGrid{times}.max_step());
}

}  // namespace bmrep
