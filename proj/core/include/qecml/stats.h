#pragma once

#include <span>

namespace qecml::stats {

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // sample variance, n - 1
double std_dev(std::span<const double> xs);
double standard_error(std::span<const double> xs);

// Two-sample mean comparison with independent standard errors.
struct MeanComparison {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double difference = 0.0;     // mean_a - mean_b
  double se_difference = 0.0;  // sqrt(se_a^2 + se_b^2)
  double z = 0.0;              // difference / se_difference
  bool significant = false;    // |z| >= threshold
};
MeanComparison compare_means(std::span<const double> a, std::span<const double> b,
                             double z_threshold = 2.0);

// Two-sided Wilcoxon signed-rank test for paired samples. Zero differences
// are dropped (Wilcoxon's convention); when every difference is zero the
// samples are indistinguishable and p = 1. Up to 25 non-zero pairs the
// p-value is exact (sign-flip enumeration over midranks); beyond that a
// normal approximation with tie correction is used.
struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double p_value = 1.0;
  int n_nonzero = 0;
  bool exact = true;
};
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a,
                                    std::span<const double> b);

// Tail flatness of a trace: the last `window` points against the preceding
// `window` points; flat when the mean difference is within z * SE.
struct FlatnessResult {
  bool flat = false;
  MeanComparison comparison;
};
FlatnessResult trace_flatness(std::span<const double> trace, int window,
                              double z_threshold = 2.0);

}  // namespace qecml::stats
