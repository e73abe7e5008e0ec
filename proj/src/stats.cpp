#include "trivscan/stats.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "trivscan/error.hpp"

namespace trivscan::stats {

namespace {

constexpr std::size_t kExactCap = 20;

void require_nonempty(Sample a, Sample b, const char* what) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::invalid_argument, std::string(what) + " needs two non-empty samples");
}

// Twice the midrank of every pooled value, so ranks stay integral.
std::vector<long long> doubled_midranks(Sample a, Sample b) {
  const std::size_t n = a.size() + b.size();
  std::vector<std::pair<double, std::size_t>> pooled;
  pooled.reserve(n);
  for (std::size_t i = 0; i < a.size(); ++i) pooled.emplace_back(a[i], i);
  for (std::size_t i = 0; i < b.size(); ++i) pooled.emplace_back(b[i], a.size() + i);
  std::sort(pooled.begin(), pooled.end());
  std::vector<long long> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    // positions i..j-1 share rank ((i+1) + j) / 2
    const long long twice = static_cast<long long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[pooled[k].second] = twice;
    i = j;
  }
  return ranks;
}

bool all_identical(Sample a, Sample b) {
  const double v = a.front();
  return std::all_of(a.begin(), a.end(), [v](double x) { return x == v; }) &&
         std::all_of(b.begin(), b.end(), [v](double x) { return x == v; });
}

double tie_term(Sample a, Sample b) {
  std::map<double, long long> counts;
  for (double x : a) ++counts[x];
  for (double x : b) ++counts[x];
  double sum = 0.0;
  for (const auto& [_, t] : counts) sum += static_cast<double>(t * t * t - t);
  return sum;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void draw(std::mt19937_64& rng, Sample from, std::vector<double>& into) {
  std::uniform_int_distribution<std::size_t> pick(0, from.size() - 1);
  for (auto& x : into) x = from[pick(rng)];
}

}  // namespace

double mann_whitney_statistic(Sample a, Sample b) {
  require_nonempty(a, b, "Mann-Whitney U");
  const auto ranks = doubled_midranks(a, b);
  long long twice_rank_sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) twice_rank_sum += ranks[i];
  const double n1 = static_cast<double>(a.size());
  return static_cast<double>(twice_rank_sum) / 2.0 - n1 * (n1 + 1.0) / 2.0;
}

double mann_whitney_exact_p(Sample a, Sample b) {
  require_nonempty(a, b, "Mann-Whitney U");
  const std::size_t n = a.size() + b.size();
  if (n > kExactCap) throw Error(ErrorKind::invalid_argument, "exact Mann-Whitney limited to 20 observations");
  const auto ranks = doubled_midranks(a, b);
  const long long n1 = static_cast<long long>(a.size());
  const long long n2 = static_cast<long long>(b.size());
  // Work with 2U so every quantity is an integer; centre is n1*n2.
  auto twice_u = [&](std::uint32_t mask) {
    long long r = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) r += ranks[static_cast<std::size_t>(std::countr_zero(m))];
    return r - n1 * (n1 + 1);
  };
  std::uint32_t observed = (1u << a.size()) - 1u;
  const long long obs_dev = std::llabs(twice_u(observed) - n1 * n2);
  std::uint64_t total = 0, extreme = 0;
  // Gosper's hack over all n-bit masks with n1 bits set.
  for (std::uint32_t mask = observed; mask < (1u << n);) {
    ++total;
    if (std::llabs(twice_u(mask) - n1 * n2) >= obs_dev) ++extreme;
    const std::uint32_t c = mask & (~mask + 1u);
    const std::uint32_t r = mask + c;
    if (r == 0) break;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

double mann_whitney_normal_p(Sample a, Sample b, bool continuity_correction) {
  const double u = mann_whitney_statistic(a, b);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  const double variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term(a, b) / (n * (n - 1.0)));
  if (!(variance > 0.0)) return 1.0;
  double deviation = std::abs(u - n1 * n2 / 2.0);
  if (continuity_correction) deviation = std::max(0.0, deviation - 0.5);
  const double z = deviation / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MannWhitneyResult mann_whitney_u(Sample a, Sample b, const MannWhitneyOptions& options) {
  require_nonempty(a, b, "Mann-Whitney U");
  MannWhitneyResult r;
  r.n1 = a.size();
  r.n2 = b.size();
  if (all_identical(a, b)) {
    r.u = static_cast<double>(r.n1 * r.n2) / 2.0;
    r.p = 1.0;
    r.degenerate = true;
    r.method = PValueMethod::exact;
    return r;
  }
  r.u = mann_whitney_statistic(a, b);
  if (r.n1 + r.n2 <= std::min(options.exact_max_total, kExactCap)) {
    r.method = PValueMethod::exact;
    r.p = mann_whitney_exact_p(a, b);
  } else {
    r.method = PValueMethod::normal;
    r.p = mann_whitney_normal_p(a, b, options.continuity_correction);
  }
  return r;
}

double cliffs_delta(Sample a, Sample b) {
  require_nonempty(a, b, "Cliff's delta");
  std::vector<double> sorted(b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end());
  long long dominance = 0;
  for (double x : a) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
    dominance += below - above;
  }
  return static_cast<double>(dominance) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

std::string_view to_string(Magnitude m) {
  switch (m) {
    case Magnitude::negligible: return "negligible";
    case Magnitude::small: return "small";
    case Magnitude::medium: return "medium";
    case Magnitude::large: return "large";
  }
  return "negligible";
}

Magnitude delta_magnitude(double delta) {
  const double d = std::abs(delta);
  if (d < 0.147) return Magnitude::negligible;
  if (d < 0.33) return Magnitude::small;
  if (d < 0.474) return Magnitude::medium;
  return Magnitude::large;
}

GroupComparison compare_groups(Sample a, Sample b, const MannWhitneyOptions& options) {
  const auto mw = mann_whitney_u(a, b, options);
  GroupComparison g;
  g.u = mw.u;
  g.p = mw.p;
  g.method = mw.method;
  g.degenerate = mw.degenerate;
  g.n1 = mw.n1;
  g.n2 = mw.n2;
  g.delta = cliffs_delta(a, b);
  g.magnitude = delta_magnitude(g.delta);
  return g;
}

BootstrapResult bootstrap_significance(Sample small, Sample large, const BootstrapOptions& options) {
  if (small.size() < 2 || large.size() < small.size()) {
    throw Error(ErrorKind::invalid_argument, "bootstrap needs |small| >= 2 and |large| >= |small|");
  }
  if (options.iterations == 0) throw Error(ErrorKind::invalid_argument, "bootstrap needs at least one iteration");

  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::size_t hits = 0;
    std::vector<double> lhs(small.size()), rhs(small.size());
    for (std::size_t i = begin; i < end; ++i) {
      std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(i)));
      if (options.scheme == BootstrapScheme::resample_both) draw(rng, small, lhs);
      else std::copy(small.begin(), small.end(), lhs.begin());
      draw(rng, large, rhs);
      if (mann_whitney_u(lhs, rhs, options.test).p < options.alpha) ++hits;
    }
    return hits;
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.iterations)));
  std::size_t significant = 0;
  if (threads == 1) {
    significant = run_range(0, options.iterations);
  } else {
    std::vector<std::size_t> partial(threads, 0);
    std::vector<std::thread> pool;
    const std::size_t chunk = (options.iterations + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(options.iterations, t * chunk);
      const std::size_t end = std::min(options.iterations, begin + chunk);
      pool.emplace_back([&, t, begin, end] { partial[t] = run_range(begin, end); });
    }
    for (auto& th : pool) th.join();
    significant = std::accumulate(partial.begin(), partial.end(), std::size_t{0});
  }
  BootstrapResult r;
  r.iterations = options.iterations;
  r.alpha = options.alpha;
  r.seed = options.seed;
  r.significant = significant;
  r.significant_fraction = static_cast<double>(significant) / static_cast<double>(options.iterations);
  return r;
}

std::uint64_t cochran_sample_size(std::optional<std::uint64_t> population, double confidence, double margin,
                                  double proportion) {
  double z = 0.0;
  if (std::abs(confidence - 0.90) < 1e-9) z = 1.645;
  else if (std::abs(confidence - 0.95) < 1e-9) z = 1.960;
  else if (std::abs(confidence - 0.99) < 1e-9) z = 2.576;
  else throw Error(ErrorKind::invalid_confidence, "confidence must be 0.90, 0.95 or 0.99");
  if (!(margin > 0.0 && margin < 1.0)) throw Error(ErrorKind::invalid_argument, "margin must lie in (0, 1)");
  if (!(proportion > 0.0 && proportion < 1.0)) throw Error(ErrorKind::invalid_argument, "proportion must lie in (0, 1)");
  if (population && *population == 0) throw Error(ErrorKind::invalid_argument, "population must be at least 1");

  double n = z * z * proportion * (1.0 - proportion) / (margin * margin);
  if (population) n = n / (1.0 + (n - 1.0) / static_cast<double>(*population));
  // Absorb floating error before rounding up (N=1 must give exactly 1).
  auto size = static_cast<std::uint64_t>(std::ceil(n - 1e-9));
  size = std::max<std::uint64_t>(size, 1);
  if (population) size = std::min(size, *population);
  return size;
}

EvalReport evaluate_confusion(const std::array<std::array<int, 3>, 3>& confusion) {
  EvalReport r;
  r.confusion = confusion;
  int correct = 0;
  std::array<int, 3> predicted{};
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t p = 0; p < 3; ++p) {
      r.total += confusion[t][p];
      predicted[p] += confusion[t][p];
      r.per_class[t].support += confusion[t][p];
    }
    correct += confusion[t][t];
  }
  if (r.total == 0) throw Error(ErrorKind::invalid_argument, "evaluation needs at least one prediction");
  r.accuracy = static_cast<double>(correct) / r.total;

  int present = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    auto& s = r.per_class[c];
    const int tp = confusion[c][c];
    s.precision = predicted[c] ? static_cast<double>(tp) / predicted[c] : 0.0;
    s.recall = s.support ? static_cast<double>(tp) / s.support : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    if (s.support == 0) {
      r.warnings.push_back(std::string("class '") + std::string(to_string(kEvalOrder[c])) +
                           "' absent from ground truth; recall defined as 0");
    }
    if (s.support == 0 && predicted[c] == 0) continue;
    ++present;
    r.macro_f1 += s.f1;
    r.weighted_f1 += s.f1 * s.support;
  }
  r.macro_f1 /= present;
  r.weighted_f1 /= r.total;
  // Micro averages pool every decision; for single-label data they reduce to accuracy.
  const double micro_p = static_cast<double>(correct) / r.total;
  const double micro_r = static_cast<double>(correct) / r.total;
  r.micro_f1 = (micro_p + micro_r) > 0.0 ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  return r;
}

EvalReport evaluate(const std::vector<std::pair<Label, Label>>& predictions) {
  std::array<std::array<int, 3>, 3> confusion{};
  auto index = [](Label l) {
    return static_cast<std::size_t>(std::find(kEvalOrder.begin(), kEvalOrder.end(), l) - kEvalOrder.begin());
  };
  for (const auto& [truth, predicted] : predictions) ++confusion[index(truth)][index(predicted)];
  return evaluate_confusion(confusion);
}

}  // namespace trivscan::stats
