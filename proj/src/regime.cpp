#include "erw/regime.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "erw/branching.hpp"
#include "erw/coins.hpp"
#include "erw/parallel.hpp"
#include "erw/stats.hpp"

namespace erw {

RegimeFacets predict_from_delta(double d) {
    RegimeFacets f;
    f.recurrence = d > 1.0    ? Recurrence::transient_right
                   : d < -1.0 ? Recurrence::transient_left
                              : Recurrence::recurrent;
    f.speed = d > 2.0 ? SpeedSign::positive : d < -2.0 ? SpeedSign::negative : SpeedSign::zero;
    f.clt = std::abs(d) > 4.0 ? CltClaim::expected : CltClaim::not_claimed;
    return f;
}

const char* to_string(Recurrence r) {
    switch (r) {
        case Recurrence::recurrent: return "recurrent";
        case Recurrence::transient_right: return "transient_right";
        case Recurrence::transient_left: return "transient_left";
        default: return "inconclusive";
    }
}
const char* to_string(SpeedSign s) {
    switch (s) {
        case SpeedSign::negative: return "v<0";
        case SpeedSign::zero: return "v=0";
        case SpeedSign::positive: return "v>0";
        default: return "inconclusive";
    }
}
const char* to_string(CltClaim c) {
    switch (c) {
        case CltClaim::expected: return "clt_expected";
        case CltClaim::not_claimed: return "not_claimed";
        case CltClaim::consistent: return "consistent";
        case CltClaim::inconsistent: return "inconsistent";
        default: return "not_tested";
    }
}

namespace {

// Endpoint of a walk from 0, no path storage.
std::int64_t walk_endpoint(const EnvironmentLaw& law, std::uint64_t seed, std::int64_t horizon) {
    CoinField field(law, seed);
    std::int64_t x = 0;
    for (std::int64_t n = 0; n < horizon; ++n) x += field.toss(x);
    return x;
}

// First return to 0, or horizon+1 when censored.
std::int64_t first_return_time(const EnvironmentLaw& law, std::uint64_t seed, std::int64_t horizon) {
    CoinField field(law, seed);
    std::int64_t x = 0;
    for (std::int64_t n = 1; n <= horizon; ++n) {
        x += field.toss(x);
        if (x == 0) return n;
    }
    return horizon + 1;
}

} // namespace

RegimeVerdict verify_regime(const EnvironmentLaw& law, const VerifyBudget& budget) {
    if (!check_ellipticity(law))
        throw std::invalid_argument("ellipticity violated: the classification theorems do not apply");

    RegimeVerdict verdict;
    verdict.delta_value = delta(law);
    verdict.predicted = predict_from_delta(verdict.delta_value);
    const double ad = std::abs(verdict.delta_value);
    verdict.recurrence_inconclusive_by_design = std::abs(ad - 1.0) <= budget.near_threshold_band;
    verdict.speed_inconclusive_by_design = std::abs(ad - 2.0) <= budget.near_threshold_band;

    // Endpoint battery (speed facet, and the transient direction).
    {
        std::vector<double> rates(static_cast<std::size_t>(budget.speed_replicates));
        parallel_for_index(budget.speed_replicates, budget.workers, [&](std::int64_t i) {
            const auto seed = keyed_u64(budget.seed, StreamDomain::replicate, 0xE0D0, static_cast<std::uint64_t>(i));
            rates[static_cast<std::size_t>(i)] =
                static_cast<double>(walk_endpoint(law, seed, budget.speed_horizon)) /
                static_cast<double>(budget.speed_horizon);
        });
        double sum = 0.0;
        for (double r : rates) sum += r;
        verdict.endpoint_rate = sum / static_cast<double>(budget.speed_replicates);
    }

    // Return-frequency ladder (recurrence facet); per-path return times make
    // the ladder nondecreasing by construction.
    {
        std::vector<std::int64_t> t0(static_cast<std::size_t>(budget.return_replicates));
        const std::int64_t h_max = budget.return_horizons.back();
        parallel_for_index(budget.return_replicates, budget.workers, [&](std::int64_t i) {
            const auto seed = keyed_u64(budget.seed, StreamDomain::replicate, 0x4E7, static_cast<std::uint64_t>(i));
            t0[static_cast<std::size_t>(i)] = first_return_time(law, seed, h_max);
        });
        for (std::size_t hi = 0; hi < budget.return_horizons.size(); ++hi) {
            std::int64_t returned = 0;
            for (std::int64_t t : t0)
                if (t <= budget.return_horizons[hi]) ++returned;
            verdict.return_freq[hi] =
                static_cast<double>(returned) / static_cast<double>(budget.return_replicates);
        }
    }

    // Never-backtrack estimates in both directions.
    const EnvironmentLaw mirrored = reflect(law);
    {
        const auto right = survey_backtracking(law, keyed_u64(budget.seed, StreamDomain::replicate, 0xB1),
                                               budget.backtrack_replicates, budget.renewal_horizon / 10,
                                               budget.guard_level, budget.workers);
        const auto left = survey_backtracking(mirrored, keyed_u64(budget.seed, StreamDomain::replicate, 0xB2),
                                              budget.backtrack_replicates, budget.renewal_horizon / 10,
                                              budget.guard_level, budget.workers);
        verdict.never_backtrack_right = right.p_dinf();
        verdict.never_backtrack_left = left.p_dinf();
    }

    // Observed recurrence.
    {
        const auto& freq = verdict.return_freq;
        const bool reaches_one = freq.back() >= budget.return_level;
        const bool plateaued = freq[2] - freq[1] <= budget.plateau_tolerance && freq.back() < budget.return_level;
        if (reaches_one) {
            verdict.observed.recurrence = Recurrence::recurrent;
        } else if (plateaued) {
            const bool right = verdict.endpoint_rate >= 0.0;
            const double escape = right ? verdict.never_backtrack_right : verdict.never_backtrack_left;
            if (escape > 0.0)
                verdict.observed.recurrence = right ? Recurrence::transient_right : Recurrence::transient_left;
        }
    }

    // Observed speed.
    const bool renewal_side_right = verdict.endpoint_rate >= 0.0;
    const EnvironmentLaw& transient_side = renewal_side_right ? law : mirrored;
    if (std::abs(verdict.endpoint_rate) < budget.zero_speed_tolerance) {
        verdict.observed.speed = SpeedSign::zero;
    } else {
        std::vector<RenewalReport> reports(static_cast<std::size_t>(budget.renewal_paths));
        parallel_for_index(budget.renewal_paths, budget.workers, [&](std::int64_t i) {
            const auto seed = keyed_u64(budget.seed, StreamDomain::replicate, 0x5EED, static_cast<std::uint64_t>(i));
            CoinField field(transient_side, seed);
            const WalkPath path = run_walk(field, 0, budget.renewal_horizon);
            reports[static_cast<std::size_t>(i)] = analyze_path(path, budget.margin);
        });
        try {
            const auto est = estimate_speed(reports, budget.confidence);
            verdict.v_hat_valid = true;
            const double sign = renewal_side_right ? 1.0 : -1.0;
            verdict.v_hat = sign * est.v_hat;
            verdict.v_ci_lo = renewal_side_right ? est.ci_lo : -est.ci_hi;
            verdict.v_ci_hi = renewal_side_right ? est.ci_hi : -est.ci_lo;
            if (verdict.v_ci_lo > 0.0)
                verdict.observed.speed = SpeedSign::positive;
            else if (verdict.v_ci_hi < 0.0)
                verdict.observed.speed = SpeedSign::negative;
        } catch (const std::invalid_argument&) {
            // too few cycles: leave inconclusive
        }
    }

    // CLT facet, only when the theorem claims it.
    if (verdict.predicted.clt == CltClaim::expected) {
        std::vector<RenewalReport> reports(static_cast<std::size_t>(budget.renewal_paths));
        parallel_for_index(budget.renewal_paths, budget.workers, [&](std::int64_t i) {
            const auto seed = keyed_u64(budget.seed, StreamDomain::replicate, 0xC17, static_cast<std::uint64_t>(i));
            CoinField field(transient_side, seed);
            const WalkPath path = run_walk(field, 0, budget.renewal_horizon);
            reports[static_cast<std::size_t>(i)] = analyze_path(path, budget.margin);
        });
        try {
            const auto est = estimate_speed(reports, budget.confidence);
            std::vector<Cycle> cycles;
            for (const auto& r : reports)
                cycles.insert(cycles.end(), r.cycles.begin(), r.cycles.end());
            std::vector<std::int64_t> endpoints(static_cast<std::size_t>(budget.clt_paths));
            parallel_for_index(budget.clt_paths, budget.workers, [&](std::int64_t i) {
                const auto seed = keyed_u64(budget.seed, StreamDomain::replicate, 0xC18, static_cast<std::uint64_t>(i));
                endpoints[static_cast<std::size_t>(i)] = walk_endpoint(transient_side, seed, budget.clt_horizon);
            });
            const auto s2 = estimate_sigma2_clt(cycles, endpoints, budget.clt_horizon, est.v_hat, est.se);
            verdict.sigma2_cycles = s2.sigma2_cycles;
            verdict.sigma2_paths = s2.sigma2_paths;
            verdict.clt_ks = s2.ks_stat;
            verdict.clt_ks_crit = s2.ks_crit_1pct;
            const bool scales_agree =
                s2.sigma2_paths > 0.0 && std::abs(s2.sigma2_cycles / s2.sigma2_paths - 1.0) <= 0.15;
            verdict.observed.clt =
                !s2.degenerate && scales_agree && s2.ks_stat < s2.ks_crit_1pct ? CltClaim::consistent
                                                                               : CltClaim::inconsistent;
        } catch (const std::invalid_argument&) {
            verdict.observed.clt = CltClaim::not_tested;
        }
    }

    verdict.recurrence_agree = verdict.recurrence_inconclusive_by_design ||
                               verdict.observed.recurrence == verdict.predicted.recurrence;
    verdict.speed_agree =
        verdict.speed_inconclusive_by_design || verdict.observed.speed == verdict.predicted.speed;
    verdict.clt_agree = verdict.predicted.clt != CltClaim::expected ||
                        verdict.observed.clt == CltClaim::consistent;
    return verdict;
}

std::string format_report(const RegimeVerdict& v) {
    std::ostringstream os;
    os.precision(6);
    os << "delta = " << v.delta_value << "\n";
    os << "predicted: " << to_string(v.predicted.recurrence) << ", " << to_string(v.predicted.speed)
       << ", " << to_string(v.predicted.clt) << "\n";
    os << "observed:  " << to_string(v.observed.recurrence) << ", " << to_string(v.observed.speed)
       << ", " << to_string(v.observed.clt) << "\n";
    os << "return frequencies:";
    for (double f : v.return_freq) os << " " << f;
    os << "\n";
    os << "never-backtrack right/left: " << v.never_backtrack_right << " / " << v.never_backtrack_left
       << "\n";
    os << "endpoint rate X_H/H = " << v.endpoint_rate << "\n";
    if (v.v_hat_valid)
        os << "renewal v_hat = " << v.v_hat << "  CI [" << v.v_ci_lo << ", " << v.v_ci_hi << "]\n";
    if (v.predicted.clt == CltClaim::expected)
        os << "sigma2 cycles/paths = " << v.sigma2_cycles << " / " << v.sigma2_paths
           << "  ks = " << v.clt_ks << " (crit " << v.clt_ks_crit << ")\n";
    if (v.recurrence_inconclusive_by_design)
        os << "recurrence facet: inconclusive by design (delta near a threshold)\n";
    if (v.speed_inconclusive_by_design)
        os << "speed facet: inconclusive by design (delta near a threshold)\n";
    os << "agree: recurrence=" << (v.recurrence_agree ? "yes" : "no")
       << " speed=" << (v.speed_agree ? "yes" : "no") << " clt=" << (v.clt_agree ? "yes" : "no")
       << "\n";
    return os.str();
}

std::string format_machine_summary(const RegimeVerdict& v) {
    std::ostringstream os;
    os.precision(17);
    os << "delta=" << v.delta_value << "\n";
    os << "recurrence_predicted=" << to_string(v.predicted.recurrence) << "\n";
    os << "recurrence_observed=" << to_string(v.observed.recurrence) << "\n";
    os << "recurrence_agree=" << (v.recurrence_agree ? 1 : 0) << "\n";
    os << "speed_predicted=" << to_string(v.predicted.speed) << "\n";
    os << "speed_observed=" << to_string(v.observed.speed) << "\n";
    os << "speed_agree=" << (v.speed_agree ? 1 : 0) << "\n";
    os << "clt_predicted=" << to_string(v.predicted.clt) << "\n";
    os << "clt_observed=" << to_string(v.observed.clt) << "\n";
    os << "clt_agree=" << (v.clt_agree ? 1 : 0) << "\n";
    return os.str();
}

} // namespace erw
