#include "erw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace erw {

EstimatorSummary mean_ci(std::span<const double> samples, double level) {
    if (samples.size() < 2) throw std::invalid_argument("mean_ci needs at least 2 samples");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0,1)");
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double x : samples) sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    return EstimatorSummary{static_cast<std::int64_t>(samples.size()), mean, se,
                            mean - z * se, mean + z * se, level};
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
    // Acklam's rational approximation polished by one Newton step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double e = normal_cdf(x) - p;
    x -= e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    return x;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double stat = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        stat = std::max(stat, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    const double scale = std::sqrt((na + nb) / (na * nb));
    KsResult r;
    r.stat = stat;
    r.crit_5pct = 1.358 * scale;
    r.crit_1pct = 1.628 * scale;
    r.n_a = static_cast<std::int64_t>(a.size());
    r.n_b = static_cast<std::int64_t>(b.size());
    return r;
}

double ks_one_sample_normal(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("ks needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = normal_cdf(samples[i]);
        stat = std::max(stat, std::max(f - static_cast<double>(i) / n,
                                       static_cast<double>(i + 1) / n - f));
    }
    return stat;
}

double ks_critical(std::int64_t n_effective, double alpha) {
    const double c = alpha <= 0.01 ? 1.628 : 1.358;
    return c / std::sqrt(static_cast<double>(n_effective));
}

ChiSquareResult chi_square(std::span<const std::int64_t> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square needs matching non-empty bins");
    ChiSquareResult r;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw std::invalid_argument("expected counts must be positive");
        const double diff = static_cast<double>(observed[i]) - expected[i];
        r.stat += diff * diff / expected[i];
    }
    r.dof = static_cast<std::int64_t>(observed.size()) - 1;
    const double k = static_cast<double>(r.dof);
    const double z = normal_quantile(0.99);
    const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    r.crit_1pct = k * t * t * t;
    return r;
}

} // namespace erw
