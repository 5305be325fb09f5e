#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "erw/env.hpp"
#include "erw/renewal.hpp"

namespace erw {

// Predicted behavior is a pure function of delta with breakpoints at 1, 2
// and 4: recurrent on [-1,1], zero speed on [-2,2], CLT claimed only for
// |delta| > 4.
enum class Recurrence { recurrent, transient_right, transient_left, inconclusive };
enum class SpeedSign { negative, zero, positive, inconclusive };
enum class CltClaim { expected, not_claimed, consistent, inconsistent, not_tested };

struct RegimeFacets {
    Recurrence recurrence = Recurrence::inconclusive;
    SpeedSign speed = SpeedSign::inconclusive;
    CltClaim clt = CltClaim::not_tested;
};

RegimeFacets predict_from_delta(double delta_value);

const char* to_string(Recurrence r);
const char* to_string(SpeedSign s);
const char* to_string(CltClaim c);

// Every knob of the verdict heuristics, config-exposed. Recurrence is not
// decidable from finite paths; the operationalization is the documented
// return-frequency ladder.
struct VerifyBudget {
    std::uint64_t seed = 1;
    std::array<std::int64_t, 3> return_horizons = {1'000, 10'000, 100'000};
    std::int64_t return_replicates = 400;
    double return_level = 0.99;        // recurrent: final frequency must reach this
    double plateau_tolerance = 0.01;   // transient: last two frequencies within this
    std::int64_t speed_horizon = 1'000'000;
    std::int64_t speed_replicates = 16;
    double zero_speed_tolerance = 0.05; // |X_H/H| below this reads as v = 0
    std::int64_t renewal_horizon = 100'000;
    std::int64_t renewal_paths = 24;
    std::int64_t margin = 1'000;
    std::int64_t guard_level = 50;
    std::int64_t backtrack_replicates = 2'000;
    std::int64_t clt_horizon = 10'000;
    std::int64_t clt_paths = 10'000;
    double near_threshold_band = 0.25; // |delta| this close to 1 or 2: inconclusive by design
    double confidence = 0.95;
    int workers = 1;
};

struct RegimeVerdict {
    double delta_value = 0.0;
    RegimeFacets predicted;
    RegimeFacets observed;
    bool recurrence_agree = false;
    bool speed_agree = false;
    bool clt_agree = false;
    bool recurrence_inconclusive_by_design = false;
    bool speed_inconclusive_by_design = false;

    // Evidence payload for the report.
    std::array<double, 3> return_freq = {0.0, 0.0, 0.0};
    double never_backtrack_right = 0.0; // positive direction
    double never_backtrack_left = 0.0;  // on the reflected law
    double endpoint_rate = 0.0;         // mean X_H/H
    double v_hat = 0.0, v_ci_lo = 0.0, v_ci_hi = 0.0;
    bool v_hat_valid = false;
    double sigma2_cycles = 0.0, sigma2_paths = 0.0;
    double clt_ks = 0.0, clt_ks_crit = 0.0;

    bool all_agree() const noexcept { return recurrence_agree && speed_agree && clt_agree; }
};

// Runs the battery: return-frequency ladder (recurrence facet), endpoint
// rate and renewal speed (speed facet), and for |delta| > 4 the sigma^2
// cross-check plus endpoint normality (CLT facet). Throws
// std::invalid_argument when the law fails ellipticity: the classification
// theorems need it.
RegimeVerdict verify_regime(const EnvironmentLaw& law, const VerifyBudget& budget);

std::string format_report(const RegimeVerdict& v);
std::string format_machine_summary(const RegimeVerdict& v);

} // namespace erw
