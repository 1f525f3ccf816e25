#include "qecml/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qecml::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  double sum = 0.0;
  for (const double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 samples");
  const double m = mean(xs);
  double sum = 0.0;
  for (const double x : xs) sum += (x - m) * (x - m);
  return sum / static_cast<double>(xs.size() - 1);
}

double std_dev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

double standard_error(std::span<const double> xs) {
  return std_dev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

MeanComparison compare_means(std::span<const double> a, std::span<const double> b,
                             double z_threshold) {
  if (z_threshold <= 0.0) throw std::invalid_argument("z_threshold must be positive");
  MeanComparison cmp;
  cmp.mean_a = mean(a);
  cmp.mean_b = mean(b);
  cmp.difference = cmp.mean_a - cmp.mean_b;
  const double se_a = standard_error(a);
  const double se_b = standard_error(b);
  cmp.se_difference = std::sqrt(se_a * se_a + se_b * se_b);
  if (cmp.se_difference == 0.0) {
    // Degenerate samples: any non-zero difference is unambiguous.
    cmp.z = cmp.difference == 0.0 ? 0.0
                                  : std::copysign(
                                        std::numeric_limits<double>::infinity(),
                                        cmp.difference);
  } else {
    cmp.z = cmp.difference / cmp.se_difference;
  }
  cmp.significant = std::abs(cmp.z) >= z_threshold;
  return cmp;
}

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a,
                                    std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("wilcoxon_signed_rank needs paired samples");
  if (a.empty()) throw std::invalid_argument("wilcoxon_signed_rank: empty samples");

  std::vector<double> diffs;
  diffs.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }

  WilcoxonResult result;
  result.n_nonzero = static_cast<int>(diffs.size());
  if (diffs.empty()) return result;  // indistinguishable: W = 0, p = 1

  const size_t n = diffs.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return std::abs(diffs[i]) < std::abs(diffs[j]);
  });

  // Midranks doubled so ties stay integral.
  std::vector<long> rank2(n, 0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
      ++j;
    const long doubled = static_cast<long>(i + j) + 2;  // 2 * mean of ranks i+1..j+1
    for (size_t k = i; k <= j; ++k) rank2[order[k]] = doubled;
    i = j + 1;
  }

  long w2_plus = 0;
  long total2 = 0;
  for (size_t k = 0; k < n; ++k) {
    total2 += rank2[k];
    if (diffs[k] > 0.0) w2_plus += rank2[k];
  }
  const long w2_minus = total2 - w2_plus;
  const long w2 = std::min(w2_plus, w2_minus);
  result.statistic = static_cast<double>(w2) / 2.0;

  if (n <= 25) {
    // Exact null distribution by sign-flip enumeration: ways[s] counts the
    // subsets of doubled ranks summing to s. 2^25 fits a double exactly.
    std::vector<double> ways(static_cast<size_t>(total2) + 1, 0.0);
    ways[0] = 1.0;
    long reach = 0;
    for (size_t k = 0; k < n; ++k) {
      const long r = rank2[k];
      for (long s = reach; s >= 0; --s)
        if (ways[static_cast<size_t>(s)] != 0.0)
          ways[static_cast<size_t>(s + r)] += ways[static_cast<size_t>(s)];
      reach += r;
    }
    double tail = 0.0;
    for (long s = 0; s <= w2; ++s) tail += ways[static_cast<size_t>(s)];
    // Two-sided by symmetry of the null distribution around total2 / 2; the
    // two tails only overlap when W sits exactly in the middle.
    double p = 2.0 * tail;
    if (2 * w2 == total2) p -= ways[static_cast<size_t>(w2)];
    result.p_value = std::min(1.0, p / std::ldexp(1.0, static_cast<int>(n)));
    result.exact = true;
  } else {
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    double tie_term = 0.0;
    i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n &&
             std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
        ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    const double sigma2 =
        nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double w = static_cast<double>(w2) / 2.0;
    const double z = (mu - w - 0.5) / std::sqrt(sigma2);  // continuity corrected
    result.p_value = std::min(1.0, 2.0 * normal_sf(z));
    result.exact = false;
  }
  return result;
}

FlatnessResult trace_flatness(std::span<const double> trace, int window,
                              double z_threshold) {
  if (window < 2) throw std::invalid_argument("flatness window must be >= 2");
  if (trace.size() < static_cast<size_t>(2 * window))
    throw std::invalid_argument("trace shorter than two windows");
  const size_t n = trace.size();
  const auto prev = trace.subspan(n - 2 * static_cast<size_t>(window),
                                  static_cast<size_t>(window));
  const auto last = trace.subspan(n - static_cast<size_t>(window));
  FlatnessResult result;
  result.comparison = compare_means(last, prev, z_threshold);
  result.flat = !result.comparison.significant;
  return result;
}

}  // namespace qecml::stats
