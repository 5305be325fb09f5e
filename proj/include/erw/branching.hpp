#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "erw/coins.hpp"
#include "erw/env.hpp"
#include "erw/rng.hpp"

namespace erw {

// Offspring law, fixed to Geom(1/2): pmf(k) = 2^-(k+1) on k >= 0. Its
// generating function f(s) = 1/(2-s) gives f(0) = 1/2 > 0, f'(1) = 1,
// b = f''(1)/2 = 1, and sum k^2 ln k mu(k) < infinity, so the standing
// assumptions on the offspring side hold for every theta.
struct OffspringLaw {
    static double pmf(std::int64_t k) noexcept;
    static std::int64_t sample(CounterRng& rng) noexcept { return geom_half(rng); }
    // Sum of n independent Geom(1/2) draws, i.e. NegBinomial(n, 1/2); 0 for
    // n <= 0. Large n goes through the exact Gamma-Poisson mixture.
    static std::int64_t sample_sum(std::int64_t n, CounterRng& rng);
    static constexpr double b = 1.0;
};

// Migration measure nu as an exact truncated pmf with certified tail
// numbers: tail_mass is the probability left beyond max_value() and
// tail_mean_bound bounds the mean contribution of that tail. Keeping the
// pmf exact makes the 1e-9-level identity checks possible.
class MigrationLaw {
public:
    MigrationLaw(std::int64_t min_value, std::vector<double> pmf,
                 double tail_mass, double tail_mean_bound);

    static MigrationLaw point_mass(std::int64_t k);

    std::int64_t min_value() const noexcept { return min_value_; }
    std::int64_t max_value() const noexcept { return min_value_ + static_cast<std::int64_t>(pmf_.size()) - 1; }
    double pmf(std::int64_t k) const noexcept;
    double mean() const noexcept { return mean_; }
    double tail_mass() const noexcept { return tail_mass_; }
    double tail_mean_bound() const noexcept { return tail_mean_bound_; }

    // Inverse-CDF draw from the truncated pmf (renormalized; the discarded
    // mass is below tail_cut by construction).
    std::int64_t sample(CounterRng& rng) const noexcept;

private:
    std::int64_t min_value_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
    double mean_;
    double tail_mass_;
    double tail_mean_bound_;
};

enum class Direction { forward, backward };

// Exact law of the per-site migration variable:
//   forward   S_M - M     (successes before the M-th failure)
//   backward  F_M - M + 1 (failures before the M-th success)
// computed by a dynamic program over the M biased tosses followed by the
// closed-form negative-binomial continuation on fair coins, truncated once
// the remaining tail mass drops below tail_cut. Well-defined without
// ellipticity.
MigrationLaw nu_exact(const EnvironmentLaw& law, Direction dir, double tail_cut = 1e-12);

// theta = lambda / b; equals delta for the forward law and 1 - delta for
// the backward law.
double theta(const MigrationLaw& nu);

// One trajectory of the (Geom(1/2), nu)-branching process
//   Z_0 = 0,  Z_{k+1} = xi_1 + ... + xi_{Z_k + eta_k}   (empty sum = 0)
// together with its stopped companion, frozen at the first k >= 1 with
// Z_k = 0.
struct BranchTrace {
    std::vector<std::int64_t> values; // Z_0..Z_n (raw process)
    std::int64_t lifetime = -1;       // N; -1 while censored
    bool censored = true;
    std::int64_t stopped_progeny = 0; // sum of the stopped values

    std::int64_t stopped_value(std::int64_t k) const noexcept {
        if (!censored && k >= lifetime) return 0;
        return values[static_cast<std::size_t>(k)];
    }
};
BranchTrace munu_run(const MigrationLaw& nu, std::int64_t horizon, CounterRng& rng);

// Streaming variant for ensembles: lifetime (horizon+1 when censored) and
// the stopped progeny accumulated on a grid of checkpoints.
struct StoppedRun {
    std::int64_t lifetime = 0;
    std::vector<std::int64_t> progeny_at; // parallel to the grid
};
StoppedRun run_stopped(const MigrationLaw& nu, std::int64_t horizon,
                       std::span<const std::int64_t> grid, CounterRng& rng);

// Monte Carlo survival and progeny curves with normal-approximation bands:
// u_n = P[N > n], v_n = E[sum_{m<=n} stopped Z_m].
struct SurvivalCurves {
    std::vector<std::int64_t> grid;
    std::vector<double> u, u_lo, u_hi;
    std::vector<double> v, v_lo, v_hi;
    std::int64_t replicates = 0;
};
SurvivalCurves survival_progeny_curves(const MigrationLaw& nu, std::int64_t n_max,
                                       std::int64_t replicates, std::uint64_t seed,
                                       double level = 0.95, int workers = 1);

// Exact u_n by pmf propagation over population states {0..state_cap} with 0
// absorbing. Mass escaping the cap is tracked in `leak` and kept alive, so
// u[n] over-counts by at most leak[n]. Ground truth for the Monte Carlo
// runs at small n.
struct ExactSurvival {
    std::vector<double> u;    // u[n] = P[N > n], n = 0..n_max (u[0] = 1)
    std::vector<double> leak; // cumulative escaped mass by step n
};
ExactSurvival exact_survival_propagation(const MigrationLaw& nu, std::int64_t n_max,
                                         std::int64_t state_cap = 60);

// Fixed-effort splitting estimator of the deep survival tail: survivors at
// each checkpoint level are resampled back to `target_population` and u_n
// accumulates the product of the per-stage survival fractions. Unbiased up
// to O(1/target) ratio bias; the only way to resolve u_n ~ n^-(1+|theta|)
// at Monte Carlo scale.
struct SplitSurvival {
    std::vector<std::int64_t> levels;
    std::vector<double> u;      // u at each level
    std::vector<double> rel_se; // accumulated relative standard error
    std::int64_t base_replicates = 0;
};
SplitSurvival survival_tail_splitting(const MigrationLaw& nu, std::span<const std::int64_t> levels,
                                      std::int64_t base_replicates, std::int64_t target_population,
                                      std::uint64_t seed, int workers = 1);

// Forward chains of one excursion, all driven by the same coins:
//   V_0 = 1, V_{k+1} = S^(k+1)_{V_k}          (upcrossing-dominating chain)
//   W_0 = 0, W_{k+1} = S^(k)_{W_k v M}
//   Z_k  = W_{k+1} - S^(k)_M                  ((Geom(1/2), nu_fwd)-process)
// U comes from the walk itself; U = V on finite excursions, U <= V always.
struct ForwardChains {
    std::vector<std::int64_t> u; // prefix counts when censored
    bool excursion_finite = false;
    std::vector<std::int64_t> v;
    std::vector<std::int64_t> w;
    std::vector<std::int64_t> z;
};
ForwardChains forward_chains(const CoinField& field, std::int64_t max_generations,
                             std::int64_t walk_step_budget);

// Backward (renewal-side) chains on fresh coins:
//   V_0 = 0, V_{k+1} = F^(k)_{V_k + 1}        (downcrossing chain)
//   W_0 = 0, W_{k+1} = F^(k)_{(W_k+1) v M}
//   Z'_k = W_{k+1} - F^(k)_M                  ((Geom(1/2), nu_bwd)-process)
// plus the stopped chain frozen at N^(V) = inf{k >= 1 : V_k = 0}.
struct BackwardChains {
    std::vector<std::int64_t> v;
    std::vector<std::int64_t> v_stopped;
    std::int64_t v_lifetime = -1; // censored if -1
    std::int64_t v_stopped_sum = 0;
    std::vector<std::int64_t> w;
    std::vector<std::int64_t> zprime;
};
BackwardChains backward_chains(const CoinField& field, std::int64_t max_generations);

// Lifetime and stopped total of the backward V chain alone; the per-cycle
// downcrossing law check pools thousands of these.
struct BackwardVSummary {
    std::int64_t lifetime = -1; // -1 when censored at max_generations
    std::int64_t stopped_sum = 0;
};
BackwardVSummary backward_v_stopped_sum(const CoinField& field, std::int64_t max_generations);

} // namespace erw
