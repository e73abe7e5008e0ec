#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "trivscan/error.hpp"
#include "trivscan/stats.hpp"

using namespace trivscan;
using namespace trivscan::stats;
using V = std::vector<double>;

namespace {

// All-pairs U: ties count one half.
double brute_u(const V& a, const V& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

// Every way to pick |a| of the pooled values as the first group.
double brute_exact_p(const V& a, const V& b) {
  V pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), n1 = a.size();
  const double mu = n1 * b.size() / 2.0;
  const double obs = std::fabs(brute_u(a, b) - mu);
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + n1, 1);
  std::sort(pick.begin(), pick.end());
  long total = 0, extreme = 0;
  do {
    V x, y;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? x : y).push_back(pooled[i]);
    ++total;
    if (std::fabs(brute_u(x, y) - mu) >= obs - 1e-9) ++extreme;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return static_cast<double>(extreme) / total;
}

double brute_delta(const V& a, const V& b) {
  long gt = 0, lt = 0;
  for (double x : a)
    for (double y : b) {
      if (x > y) ++gt;
      if (x < y) ++lt;
    }
  return static_cast<double>(gt - lt) / static_cast<double>(a.size() * b.size());
}

V random_sample(std::mt19937_64& rng, std::size_t n, int max_value) {
  V out(n);
  for (auto& v : out) v = static_cast<double>(rng() % (max_value + 1));
  return out;
}

}  // namespace

TEST_CASE("mann-whitney small exact example") {
  auto r = mann_whitney_u(V{1, 2}, V{3, 4});
  CHECK(r.u == 0);
  CHECK(r.method == PValueMethod::exact);
  CHECK(r.p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(mann_whitney_exact_p(V{1, 5, 9, 2, 7}, V{3, 4, 10, 11, 12, 6}) == doctest::Approx(0.246753246753247));
}

TEST_CASE("identical samples") {
  V a{3, 1, 4, 1, 5};
  auto r = mann_whitney_u(a, a);
  CHECK(r.u == doctest::Approx(a.size() * a.size() / 2.0));
  CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("separated samples are significant") {
  V a(20), b(20);
  std::iota(a.begin(), a.end(), 1.0);
  std::iota(b.begin(), b.end(), 31.0);
  auto r = mann_whitney_u(a, b);
  CHECK(r.method == PValueMethod::normal);
  CHECK(r.p < 0.001);
  CHECK(r.p == doctest::Approx(6.79561512817336e-08).epsilon(1e-9));
}

TEST_CASE("normal approximation matches a reference implementation") {
  V a{1, 2, 2, 3, 5, 8, 8, 9, 12, 15, 15, 20}, b{3, 4, 4, 6, 10, 11, 13, 13, 14, 16, 18, 21, 22, 25};
  CHECK(mann_whitney_statistic(a, b) == 50.5);
  CHECK(mann_whitney_normal_p(a, b, true) == doctest::Approx(0.0893040375821959).epsilon(1e-9));
  CHECK(mann_whitney_normal_p(a, b, false) == doctest::Approx(0.0845591892481564).epsilon(1e-9));
  V c{0, 0, 0, 1, 1, 2, 3, 0, 0, 1, 4, 0, 0, 2, 0, 1}, d{0, 1, 1, 2, 3, 3, 4, 5, 0, 1, 2, 6, 7, 1, 2, 3, 0, 8};
  CHECK(mann_whitney_statistic(c, d) == 74.0);
  CHECK(mann_whitney_normal_p(c, d) == doctest::Approx(0.0138238629354447).epsilon(1e-9));
  MannWhitneyOptions no_cc;
  no_cc.continuity_correction = false;
  CHECK(mann_whitney_u(c, d, no_cc).p == doctest::Approx(0.0131559759042119).epsilon(1e-9));
}

TEST_CASE("degenerate and invalid input") {
  auto r = mann_whitney_u(V{2, 2, 2}, V{2, 2});
  CHECK(r.degenerate);
  CHECK(r.p == 1.0);
  CHECK_THROWS_AS(mann_whitney_u(V{}, V{1}), Error);
  CHECK_THROWS_AS(cliffs_delta(V{1}, V{}), Error);
}

TEST_CASE("exact path agrees with brute-force enumeration") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 300; ++round) {
    std::size_t n1 = 1 + rng() % 6, n2 = 1 + rng() % 6;
    V a = random_sample(rng, n1, 3), b = random_sample(rng, n2, 3);
    CAPTURE(round);
    CHECK(mann_whitney_statistic(a, b) == brute_u(a, b));
    CHECK(mann_whitney_exact_p(a, b) == doctest::Approx(brute_exact_p(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("property: U(a,b) + U(b,a) = n1*n2") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 1000; ++round) {
    V a = random_sample(rng, 1 + rng() % 30, 10), b = random_sample(rng, 1 + rng() % 30, 10);
    CHECK(mann_whitney_statistic(a, b) + mann_whitney_statistic(b, a) == static_cast<double>(a.size() * b.size()));
  }
}

TEST_CASE("cliff's delta examples") {
  CHECK(cliffs_delta(V{1, 2, 3}, V{1, 2, 3}) == 0.0);
  CHECK(cliffs_delta(V{1, 2, 3}, V{4, 5, 6}) == -1.0);
  CHECK(cliffs_delta(V{1, 3}, V{2}) == 0.0);
  CHECK(delta_magnitude(0.1) == Magnitude::negligible);
  CHECK(delta_magnitude(-0.147) == Magnitude::small);
  CHECK(delta_magnitude(0.2) == Magnitude::small);
  CHECK(delta_magnitude(0.33) == Magnitude::medium);
  CHECK(delta_magnitude(-0.4) == Magnitude::medium);
  CHECK(delta_magnitude(0.474) == Magnitude::large);
  CHECK(delta_magnitude(-1.0) == Magnitude::large);
  CHECK(to_string(Magnitude::medium) == "medium");
}

TEST_CASE("property: cliff's delta matches all-pairs counting, is antisymmetric and bounded") {
  std::mt19937_64 rng(29);
  for (int round = 0; round < 1000; ++round) {
    V a = random_sample(rng, 1 + rng() % 50, 1 + static_cast<int>(rng() % 20));
    V b = random_sample(rng, 1 + rng() % 50, 1 + static_cast<int>(rng() % 20));
    double d = cliffs_delta(a, b);
    CHECK(d == brute_delta(a, b));
    CHECK(cliffs_delta(b, a) == -d);
    CHECK(d >= -1.0);
    CHECK(d <= 1.0);
  }
}

TEST_CASE("compare_groups bundles the pieces") {
  auto g = compare_groups(V{1, 2, 3}, V{4, 5, 6});
  CHECK(g.delta == -1.0);
  CHECK(g.magnitude == Magnitude::large);
  CHECK(g.n1 == 3);
  CHECK(g.n2 == 3);
  CHECK(g.method == PValueMethod::exact);
  CHECK(g.p == doctest::Approx(0.1));
}

TEST_CASE("bootstrap") {
  V constant(10, 4.0), big(100, 4.0);
  BootstrapOptions opt;
  opt.seed = 1;
  CHECK(bootstrap_significance(constant, big, opt).significant_fraction == 0.0);

  std::mt19937_64 rng(31);
  std::lognormal_distribution<double> dist(1.0, 1.0);
  V small(40), large(500);
  for (auto& v : small) v = dist(rng);
  for (auto& v : large) v = dist(rng);
  opt.seed = 42;
  opt.iterations = 300;
  auto one = bootstrap_significance(small, large, opt);
  auto again = bootstrap_significance(small, large, opt);
  CHECK(one.significant == again.significant);
  opt.threads = 4;
  CHECK(bootstrap_significance(small, large, opt).significant == one.significant);
  opt.scheme = BootstrapScheme::resample_both;
  auto both = bootstrap_significance(small, large, opt);
  CHECK(both.iterations == 300);
  opt.seed = 43;
  opt.scheme = BootstrapScheme::size_matched;
  opt.threads = 1;
  CHECK(bootstrap_significance(small, large, opt).seed == 43);

  CHECK_THROWS_AS(bootstrap_significance(V{1}, large, opt), Error);
  CHECK_THROWS_AS(bootstrap_significance(large, small, opt), Error);
}

TEST_CASE("cochran") {
  CHECK(cochran_sample_size(3220, 0.90, 0.05) == 250);
  CHECK(cochran_sample_size(std::nullopt, 0.95, 0.05) == 385);
  CHECK(cochran_sample_size(1, 0.95, 0.05) == 1);
  CHECK(cochran_sample_size(std::nullopt, 0.99, 0.05) == 664);
  CHECK(cochran_sample_size(100, 0.95, 0.05) == 80);
  try {
    cochran_sample_size(100, 0.80, 0.05);
    FAIL("expected InvalidConfidence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_confidence);
  }
  CHECK_THROWS_AS(cochran_sample_size(100, 0.95, 0.0), Error);
  CHECK_THROWS_AS(cochran_sample_size(100, 0.95, 0.05, 1.5), Error);
  CHECK_THROWS_AS(cochran_sample_size(0, 0.95, 0.05), Error);
}

TEST_CASE("evaluation: all correct") {
  std::vector<std::pair<Label, Label>> pairs = {{Label::normal, Label::normal},
                                                {Label::trivial, Label::trivial},
                                                {Label::data_only, Label::data_only}};
  auto r = evaluate(pairs);
  CHECK(r.accuracy == 1.0);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.weighted_f1 == 1.0);

  auto single = evaluate({{Label::trivial, Label::trivial}, {Label::trivial, Label::trivial}});
  CHECK(single.weighted_f1 == 1.0);
  CHECK(single.macro_f1 == 1.0);
  CHECK_THROWS_AS(evaluate({}), Error);
}

TEST_CASE("evaluation: fixture confusion matrix") {
  auto r = evaluate_confusion({{{90, 5, 0}, {3, 50, 2}, {0, 1, 4}}});
  CHECK(r.total == 155);
  CHECK(r.accuracy == doctest::Approx(144.0 / 155.0));
  CHECK(r.per_class[0].precision == doctest::Approx(90.0 / 93.0));
  CHECK(r.per_class[0].recall == doctest::Approx(90.0 / 95.0));
  CHECK(r.per_class[0].f1 == doctest::Approx(180.0 / 188.0));
  CHECK(r.per_class[1].f1 == doctest::Approx(100.0 / 111.0));
  CHECK(r.per_class[2].f1 == doctest::Approx(8.0 / 11.0));
  CHECK(r.per_class[2].support == 5);
  CHECK(r.macro_f1 == doctest::Approx((180.0 / 188.0 + 100.0 / 111.0 + 8.0 / 11.0) / 3.0));
  CHECK(r.weighted_f1 == doctest::Approx((95 * 180.0 / 188.0 + 55 * 100.0 / 111.0 + 5 * 8.0 / 11.0) / 155.0));
  CHECK(r.macro_f1 == doctest::Approx(0.861873478895));
  CHECK(r.weighted_f1 == doctest::Approx(0.929957161254));
}

TEST_CASE("evaluation: undefined precision is zero with a warning") {
  auto r = evaluate({{Label::normal, Label::trivial}, {Label::normal, Label::normal}});
  CHECK(r.per_class[1].precision == 0.0);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("property: micro F1 equals accuracy") {
  std::mt19937_64 rng(37);
  for (int round = 0; round < 500; ++round) {
    std::array<std::array<int, 3>, 3> m{};
    for (auto& row : m)
      for (auto& v : row) v = static_cast<int>(rng() % 20);
    m[0][0] += 1;
    auto r = evaluate_confusion(m);
    CHECK(r.micro_f1 == doctest::Approx(r.accuracy));
    CHECK(r.macro_f1 >= 0.0);
    CHECK(r.macro_f1 <= 1.0);
  }
}
