#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace erw {

// Simulation measures, operationally: P_{x,omega} fixes the environment
// seed and varies only the tosses; the annealed P_x draws a fresh
// environment per replicate. Replicate r of a batch always uses
// replicate_seed(master, r), so any subset of replicates can be recomputed
// in isolation.

struct EstimatorSummary {
    std::int64_t n = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double level = 0.0;
};

// Normal-approximation confidence interval; requires n >= 2. With constant
// samples the interval degenerates to the point.
EstimatorSummary mean_ci(std::span<const double> samples, double level);

double normal_cdf(double x);
double normal_quantile(double p); // inverse of normal_cdf

// Two-sided two-sample Kolmogorov-Smirnov statistic with tie handling
// (CDFs compared at pooled jump points) and the asymptotic Smirnov
// critical values; those are conservative for discrete data.
struct KsResult {
    double stat = 0.0;
    double crit_5pct = 0.0;
    double crit_1pct = 0.0;
    std::int64_t n_a = 0, n_b = 0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS distance of the samples against the standard normal CDF.
double ks_one_sample_normal(std::vector<double> samples);
// Asymptotic one-sided ... critical value c(alpha)/sqrt(n) for alpha in {0.05, 0.01}.
double ks_critical(std::int64_t n_effective, double alpha);

// Pearson chi-square against expected counts; critical value via the
// Wilson-Hilferty approximation.
struct ChiSquareResult {
    double stat = 0.0;
    std::int64_t dof = 0;
    double crit_1pct = 0.0;
};
ChiSquareResult chi_square(std::span<const std::int64_t> observed, std::span<const double> expected);

} // namespace erw
