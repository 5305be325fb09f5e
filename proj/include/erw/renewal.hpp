#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "erw/env.hpp"
#include "erw/walk.hpp"

namespace erw {

// Renewal detection on transient paths. Time n >= 1 is a renewal when
// X_m < X_n for every m < n and X_m >= X_n for every m > n within the
// observed path; only candidates with at least `margin` observed future
// steps are confirmed, the rest are censored. The defining property
// quantifies over the infinite future, so the margin trades a small bias
// for correctness.
struct RenewalScan {
    std::vector<std::int64_t> taus;
    std::int64_t censored_candidates = 0;
};
RenewalScan find_renewals(const WalkPath& path, std::int64_t margin);

// One renewal cycle (tau_a, tau_b]: space and time increments plus the
// downcrossing array D_k = #{tau_a < n < tau_b : X_n = X_{tau_b} - k,
// X_{n+1} = X_{tau_b} - k - 1}, reported for k = 0..space (both ends are
// structurally zero). Each step in the cycle is an upcrossing or a
// downcrossing, so time = space + 2 sum D_k holds exactly; identity_ok
// records the check.
struct Cycle {
    std::int64_t space = 0;
    std::int64_t time = 0;
    std::vector<std::int64_t> d;
    bool identity_ok = false;

    std::int64_t sum_d() const noexcept {
        std::int64_t s = 0;
        for (std::int64_t x : d) s += x;
        return s;
    }
};
Cycle cycle_stats(const WalkPath& path, std::int64_t tau_a, std::int64_t tau_b);

// Everything renewal-related extracted from one path. Cycles pair the
// confirmed renewals consecutively; the pre-tau_1 segment has a different
// law and is never part of a cycle.
struct RenewalReport {
    std::vector<std::int64_t> taus;
    std::vector<Cycle> cycles;
    std::int64_t censored_candidates = 0;
    std::int64_t horizon = 0;
    std::int64_t endpoint = 0;
};
RenewalReport analyze_path(const WalkPath& path, std::int64_t margin);

// Annealed estimate of P[D = infinity]: a replicate counts as
// never-backtracking when no step went below the start by the horizon AND
// the endpoint cleared the guard level; walks that merely idled below the
// guard are censored and dropped.
struct BacktrackSurvey {
    std::int64_t backtracked = 0;
    std::int64_t never = 0;
    std::int64_t censored = 0;
    double p_dinf() const noexcept {
        const std::int64_t n = backtracked + never;
        return n > 0 ? static_cast<double>(never) / static_cast<double>(n) : 0.0;
    }
};
BacktrackSurvey survey_backtracking(const EnvironmentLaw& law, std::uint64_t seed,
                                    std::int64_t replicates, std::int64_t horizon,
                                    std::int64_t guard_level, int workers = 1);

// Pooled speed estimate v = E[space] / E[time] over cycles with a
// delta-method CI, plus the direct X_H/H average and the renewal-theorem
// cross-check E[space] vs 1/P[D=inf].
struct SpeedEstimate {
    double v_hat = 0.0;
    double se = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    double mean_space = 0.0, mean_time = 0.0;
    std::int64_t cycles = 0;
    double direct_endpoint_rate = 0.0; // mean X_H/H over the reports
};
SpeedEstimate estimate_speed(std::span<const RenewalReport> reports, double level = 0.95,
                             std::int64_t min_cycles = 100);

// sigma^2 two ways: from cycle statistics with the plug-in v (the paper's
// ratio of second moments), and empirically from path endpoints. The
// plug-in sensitivity reports the spread of the cycle estimate when v
// moves one standard error. ks_stat compares the standardized endpoints
// against the standard normal CDF.
struct Sigma2Estimate {
    double sigma2_cycles = 0.0;
    double sigma2_cycles_v_lo = 0.0, sigma2_cycles_v_hi = 0.0;
    double sigma2_paths = 0.0;
    double ks_stat = 0.0;
    double ks_crit_1pct = 0.0;
    std::int64_t n_cycles = 0, n_paths = 0;
    bool degenerate = false; // constant increments (deterministic drift)
};
Sigma2Estimate estimate_sigma2_clt(std::span<const Cycle> cycles,
                                   std::span<const std::int64_t> endpoints, std::int64_t horizon,
                                   double v_hat, double v_hat_se);

} // namespace erw
