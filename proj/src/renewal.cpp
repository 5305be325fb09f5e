#include "erw/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "erw/coins.hpp"
#include "erw/parallel.hpp"
#include "erw/stats.hpp"

namespace erw {

RenewalScan find_renewals(const WalkPath& path, std::int64_t margin) {
    if (margin < 0) throw std::invalid_argument("margin must be >= 0");
    const std::int64_t h = path.horizon();
    RenewalScan scan;
    if (h < 1) return scan;
    // suffix_min[n] = min X_m over m >= n
    std::vector<std::int32_t> suffix_min(path.positions.size());
    suffix_min.back() = path.positions.back();
    for (std::int64_t n = h - 1; n >= 0; --n)
        suffix_min[static_cast<std::size_t>(n)] =
            std::min(path.positions[static_cast<std::size_t>(n)], suffix_min[static_cast<std::size_t>(n + 1)]);
    std::int32_t prefix_max = path.positions[0];
    for (std::int64_t n = 1; n <= h; ++n) {
        const std::int32_t x = path.positions[static_cast<std::size_t>(n)];
        const bool past_below = prefix_max < x;
        const bool future_above = n == h || suffix_min[static_cast<std::size_t>(n + 1)] >= x;
        prefix_max = std::max(prefix_max, x);
        if (past_below && future_above) {
            if (h - n >= margin)
                scan.taus.push_back(n);
            else
                ++scan.censored_candidates;
        }
    }
    return scan;
}

Cycle cycle_stats(const WalkPath& path, std::int64_t tau_a, std::int64_t tau_b) {
    if (!(tau_a < tau_b) || tau_a < 0 || tau_b > path.horizon())
        throw std::invalid_argument("invalid renewal pair");
    const std::int64_t xa = path.at(tau_a), xb = path.at(tau_b);
    if (xa >= xb) throw std::invalid_argument("invalid renewal pair: no space increment");
    Cycle c;
    c.space = xb - xa;
    c.time = tau_b - tau_a;
    c.d.assign(static_cast<std::size_t>(c.space) + 1, 0);
    for (std::int64_t n = tau_a + 1; n < tau_b; ++n) {
        if (path.at(n + 1) != path.at(n) - 1) continue;
        const std::int64_t k = xb - path.at(n);
        if (k < 0 || k > c.space) throw std::invalid_argument("invalid renewal pair: cycle leaves its band");
        ++c.d[static_cast<std::size_t>(k)];
    }
    c.identity_ok = c.time == c.space + 2 * c.sum_d();
    return c;
}

RenewalReport analyze_path(const WalkPath& path, std::int64_t margin) {
    RenewalReport report;
    auto scan = find_renewals(path, margin);
    report.taus = std::move(scan.taus);
    report.censored_candidates = scan.censored_candidates;
    report.horizon = path.horizon();
    report.endpoint = path.endpoint();
    for (std::size_t i = 0; i + 1 < report.taus.size(); ++i)
        report.cycles.push_back(cycle_stats(path, report.taus[i], report.taus[i + 1]));
    return report;
}

BacktrackSurvey survey_backtracking(const EnvironmentLaw& law, std::uint64_t seed,
                                    std::int64_t replicates, std::int64_t horizon,
                                    std::int64_t guard_level, int workers) {
    std::vector<std::int8_t> outcome(static_cast<std::size_t>(replicates), 0);
    parallel_for_index(replicates, workers, [&](std::int64_t i) {
        CoinField field(law, replicate_seed(seed, static_cast<std::uint64_t>(i)));
        std::int64_t x = 0;
        std::int8_t res = 0; // censored
        for (std::int64_t n = 0; n < horizon; ++n) {
            x += field.toss(x);
            if (x < 0) {
                res = 1; // backtracked
                break;
            }
        }
        if (res == 0 && x > guard_level) res = 2; // never, with guard confirmation
        outcome[static_cast<std::size_t>(i)] = res;
    });
    BacktrackSurvey s;
    for (std::int8_t o : outcome) {
        if (o == 1) ++s.backtracked;
        else if (o == 2) ++s.never;
        else ++s.censored;
    }
    return s;
}

SpeedEstimate estimate_speed(std::span<const RenewalReport> reports, double level,
                             std::int64_t min_cycles) {
    SpeedEstimate est;
    double sum_s = 0.0, sum_t = 0.0;
    std::int64_t n = 0;
    for (const auto& r : reports) {
        for (const auto& c : r.cycles) {
            sum_s += static_cast<double>(c.space);
            sum_t += static_cast<double>(c.time);
            ++n;
        }
    }
    if (n < min_cycles) throw std::invalid_argument("too few cycles for a speed estimate");
    est.cycles = n;
    const double nd = static_cast<double>(n);
    est.mean_space = sum_s / nd;
    est.mean_time = sum_t / nd;
    est.v_hat = est.mean_space / est.mean_time;
    // Delta method for the ratio of means.
    double vss = 0.0, vtt = 0.0, vst = 0.0;
    for (const auto& r : reports) {
        for (const auto& c : r.cycles) {
            const double ds = static_cast<double>(c.space) - est.mean_space;
            const double dt = static_cast<double>(c.time) - est.mean_time;
            vss += ds * ds;
            vtt += dt * dt;
            vst += ds * dt;
        }
    }
    const double denom = nd * (nd - 1.0) * est.mean_time * est.mean_time;
    const double var = (vss - 2.0 * est.v_hat * vst + est.v_hat * est.v_hat * vtt) / denom;
    est.se = std::sqrt(std::max(0.0, var));
    const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    est.ci_lo = est.v_hat - z * est.se;
    est.ci_hi = est.v_hat + z * est.se;
    double rate = 0.0;
    for (const auto& r : reports) rate += static_cast<double>(r.endpoint) / static_cast<double>(r.horizon);
    est.direct_endpoint_rate = reports.empty() ? 0.0 : rate / static_cast<double>(reports.size());
    return est;
}

Sigma2Estimate estimate_sigma2_clt(std::span<const Cycle> cycles,
                                   std::span<const std::int64_t> endpoints, std::int64_t horizon,
                                   double v_hat, double v_hat_se) {
    Sigma2Estimate est;
    est.n_cycles = static_cast<std::int64_t>(cycles.size());
    est.n_paths = static_cast<std::int64_t>(endpoints.size());
    if (cycles.empty() || endpoints.size() < 2) throw std::invalid_argument("too few samples for sigma^2");

    const auto sigma2_at = [&](double v) {
        double num = 0.0, den = 0.0;
        for (const auto& c : cycles) {
            const double r = static_cast<double>(c.space) - v * static_cast<double>(c.time);
            num += r * r;
            den += static_cast<double>(c.time);
        }
        return num / den;
    };
    est.sigma2_cycles = sigma2_at(v_hat);
    est.sigma2_cycles_v_lo = sigma2_at(v_hat - v_hat_se);
    est.sigma2_cycles_v_hi = sigma2_at(v_hat + v_hat_se);

    const double h = static_cast<double>(horizon);
    const double nd = static_cast<double>(endpoints.size());
    double mean = 0.0;
    for (std::int64_t e : endpoints) mean += (static_cast<double>(e) - h * v_hat) / std::sqrt(h);
    mean /= nd;
    double ss = 0.0;
    for (std::int64_t e : endpoints) {
        const double b = (static_cast<double>(e) - h * v_hat) / std::sqrt(h);
        ss += (b - mean) * (b - mean);
    }
    est.sigma2_paths = ss / (nd - 1.0);

    est.degenerate = est.sigma2_cycles == 0.0 || est.sigma2_paths == 0.0;
    if (!est.degenerate) {
        const double sd = std::sqrt(est.sigma2_cycles);
        std::vector<double> standardized;
        standardized.reserve(endpoints.size());
        for (std::int64_t e : endpoints)
            standardized.push_back((static_cast<double>(e) - h * v_hat) / (sd * std::sqrt(h)));
        est.ks_stat = ks_one_sample_normal(std::move(standardized));
        est.ks_crit_1pct = ks_critical(static_cast<std::int64_t>(endpoints.size()), 0.01);
    }
    return est;
}

} // namespace erw
