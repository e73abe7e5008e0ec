#pragma once

// Rank-based group comparison, bootstrap significance, Cochran sample
// sizing and three-class evaluation metrics.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trivscan/classifier.hpp"

namespace trivscan::stats {

using Sample = std::span<const double>;

enum class PValueMethod { exact, normal };

struct MannWhitneyOptions {
  bool continuity_correction = true;
  /// Combined sizes up to this use exhaustive enumeration (capped at 20).
  std::size_t exact_max_total = 12;
};

struct MannWhitneyResult {
  double u = 0.0;  // U of the first sample, from midranks
  double p = 1.0;  // two-sided
  PValueMethod method = PValueMethod::normal;
  bool degenerate = false;  // every value identical; p is defined as 1
  std::size_t n1 = 0, n2 = 0;
};

/// Throws Error(invalid_argument) when either sample is empty.
MannWhitneyResult mann_whitney_u(Sample a, Sample b, const MannWhitneyOptions& options = {});

/// U of `a` against `b` using midranks of the pooled sample.
double mann_whitney_statistic(Sample a, Sample b);

/// Two-sided p by enumerating every split of the pooled midranks:
/// P(|U - n1*n2/2| >= |u_obs - n1*n2/2|).
double mann_whitney_exact_p(Sample a, Sample b);

/// Two-sided p from the tie-corrected normal approximation.
double mann_whitney_normal_p(Sample a, Sample b, bool continuity_correction = true);

/// (#{x > y} - #{x < y}) / (n1 * n2). Throws Error(invalid_argument) on empty input.
double cliffs_delta(Sample a, Sample b);

enum class Magnitude { negligible, small, medium, large };
std::string_view to_string(Magnitude m);
/// Romano et al. cutoffs 0.147 / 0.33 / 0.474.
Magnitude delta_magnitude(double delta);

struct GroupComparison {
  double u = 0.0;
  double p = 1.0;
  double delta = 0.0;
  Magnitude magnitude = Magnitude::negligible;
  std::size_t n1 = 0, n2 = 0;
  PValueMethod method = PValueMethod::normal;
  bool degenerate = false;
};

GroupComparison compare_groups(Sample a, Sample b, const MannWhitneyOptions& options = {});

enum class BootstrapScheme {
  size_matched,   // draw |small| values from the large group only
  resample_both,  // draw |small| values from each group
};

struct BootstrapOptions {
  std::size_t iterations = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  BootstrapScheme scheme = BootstrapScheme::size_matched;
  unsigned threads = 1;
  MannWhitneyOptions test;
};

struct BootstrapResult {
  std::size_t iterations = 0;
  double alpha = 0.05;
  std::size_t significant = 0;
  double significant_fraction = 0.0;
  std::uint64_t seed = 0;
};

/// Fraction of resampled comparisons with p < alpha. Each iteration owns a
/// generator seeded from (seed, iteration), so results do not depend on
/// the thread count. Throws Error(invalid_argument) unless
/// |small| >= 2 and |large| >= |small|.
BootstrapResult bootstrap_significance(Sample small, Sample large, const BootstrapOptions& options = {});

/// Cochran's n0 = z^2 p (1-p) / e^2 with finite-population correction,
/// rounded up. `population` of nullopt means infinite. Confidence must be
/// 0.90, 0.95 or 0.99; otherwise Error(invalid_confidence).
std::uint64_t cochran_sample_size(std::optional<std::uint64_t> population, double confidence, double margin,
                                  double proportion = 0.5);

/// Confusion-matrix order: normal, trivial, data-only.
inline constexpr std::array<Label, 3> kEvalOrder = {Label::normal, Label::trivial, Label::data_only};

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;  // true instances
};

struct EvalReport {
  std::array<std::array<int, 3>, 3> confusion{};  // [true][predicted]
  int total = 0;
  double accuracy = 0.0;
  std::array<ClassScores, 3> per_class{};
  double macro_f1 = 0.0;     // over classes present in truth or predictions
  double weighted_f1 = 0.0;  // weighted by true-class support
  double micro_f1 = 0.0;
  std::vector<std::string> warnings;
};

/// Pairs are (true label, predicted label). Throws Error(invalid_argument) when empty.
EvalReport evaluate(const std::vector<std::pair<Label, Label>>& predictions);
EvalReport evaluate_confusion(const std::array<std::array<int, 3>, 3>& confusion);

}  // namespace trivscan::stats
