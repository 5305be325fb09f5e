#include "erw/branching.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "erw/parallel.hpp"
#include "erw/stats.hpp"
#include "erw/walk.hpp"

namespace erw {

double OffspringLaw::pmf(std::int64_t k) noexcept {
    return k < 0 ? 0.0 : std::ldexp(1.0, static_cast<int>(-(k + 1)));
}

std::int64_t OffspringLaw::sample_sum(std::int64_t n, CounterRng& rng) {
    if (n <= 0) return 0;
    if (n <= 64) {
        std::int64_t s = 0;
        for (std::int64_t i = 0; i < n; ++i) s += geom_half(rng);
        return s;
    }
    // NegBinomial(n, 1/2) == Poisson(Gamma(n, 1)).
    const double g = std::gamma_distribution<double>(static_cast<double>(n), 1.0)(rng);
    return std::poisson_distribution<std::int64_t>(g)(rng);
}

MigrationLaw::MigrationLaw(std::int64_t min_value, std::vector<double> pmf,
                           double tail_mass, double tail_mean_bound)
    : min_value_(min_value),
      pmf_(std::move(pmf)),
      tail_mass_(tail_mass),
      tail_mean_bound_(tail_mean_bound) {
    if (pmf_.empty()) throw std::invalid_argument("migration pmf must be non-empty");
    double total = 0.0, mean = 0.0;
    cdf_.reserve(pmf_.size());
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        const double p = pmf_[i];
        if (!(p >= 0.0)) throw std::invalid_argument("migration pmf entries must be >= 0");
        total += p;
        mean += p * static_cast<double>(min_value_ + static_cast<std::int64_t>(i));
        cdf_.push_back(total);
    }
    if (total + tail_mass_ < 1.0 - 1e-9 || total + tail_mass_ > 1.0 + 1e-9)
        throw std::invalid_argument("migration pmf mass plus tail must lie within 1e-9 of 1");
    mean_ = mean;
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

MigrationLaw MigrationLaw::point_mass(std::int64_t k) {
    return MigrationLaw(k, {1.0}, 0.0, 0.0);
}

double MigrationLaw::pmf(std::int64_t k) const noexcept {
    const std::int64_t idx = k - min_value_;
    if (idx < 0 || idx >= static_cast<std::int64_t>(pmf_.size())) return 0.0;
    return pmf_[static_cast<std::size_t>(idx)];
}

std::int64_t MigrationLaw::sample(CounterRng& rng) const noexcept {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                              static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
    return min_value_ + static_cast<std::int64_t>(idx);
}

namespace {

// Distribution of the failure count (forward) or success count (backward)
// among the M biased tosses of one pile.
std::vector<double> biased_prefix_counts(const CookiePile& pile, Direction dir) {
    const int m = pile.depth();
    std::vector<double> dist(static_cast<std::size_t>(m) + 1, 0.0);
    dist[0] = 1.0;
    for (int i = 0; i < m; ++i) {
        const double p_count = dir == Direction::forward ? 1.0 - pile.probs[static_cast<std::size_t>(i)]
                                                         : pile.probs[static_cast<std::size_t>(i)];
        for (int f = i + 1; f >= 1; --f)
            dist[static_cast<std::size_t>(f)] =
                dist[static_cast<std::size_t>(f)] * (1.0 - p_count) + dist[static_cast<std::size_t>(f - 1)] * p_count;
        dist[0] *= 1.0 - p_count;
    }
    return dist;
}

} // namespace

MigrationLaw nu_exact(const EnvironmentLaw& law, Direction dir, double tail_cut) {
    if (!(tail_cut > 0.0 && tail_cut <= 1e-6))
        throw std::invalid_argument("tail_cut must lie in (0, 1e-6]");
    const int m = law.common_depth();
    const std::int64_t offset = dir == Direction::forward ? 0 : 1;

    // weight[f] = P[f counted outcomes among the M biased tosses]; the value
    // is then (NB(M-f, 1/2) draw) - f + offset, with NB(0) a point mass at 0.
    std::vector<double> weight(static_cast<std::size_t>(m) + 1, 0.0);
    for (const auto& comp : law.components()) {
        const auto dist = biased_prefix_counts(comp.pile, dir);
        for (int f = 0; f <= m; ++f) weight[static_cast<std::size_t>(f)] += comp.weight * dist[static_cast<std::size_t>(f)];
    }

    const std::int64_t vmin = -static_cast<std::int64_t>(m) + offset;
    // Running NB_{M-f}(j) value per f, advanced as the value v increases.
    std::vector<double> nb(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<double> pmf;
    double cum = 0.0;
    const std::int64_t v_floor = offset + m + 2; // ensures the tail ratio bound is < 1
    const std::int64_t v_hard_cap = vmin + (1 << 20);
    std::int64_t v = vmin;
    for (;; ++v) {
        if (v > v_hard_cap) throw std::runtime_error("nu_exact failed to reach the requested tail cut");
        double mass = 0.0;
        for (int f = 0; f <= m; ++f) {
            const std::int64_t j = v - offset + f;
            const std::int64_t r = m - f;
            if (j < 0) continue;
            if (r == 0) {
                mass += j == 0 ? weight[static_cast<std::size_t>(f)] : 0.0;
                continue;
            }
            if (j == 0)
                nb[static_cast<std::size_t>(f)] = std::ldexp(1.0, static_cast<int>(-r));
            else
                nb[static_cast<std::size_t>(f)] *= static_cast<double>(j - 1 + r) / (2.0 * static_cast<double>(j));
            mass += weight[static_cast<std::size_t>(f)] * nb[static_cast<std::size_t>(f)];
        }
        pmf.push_back(mass);
        cum += mass;
        if (v >= v_floor && 1.0 - cum < tail_cut) break;
    }

    const double tail_mass = std::max(0.0, 1.0 - cum);
    // Geometric domination of the remaining tail: beyond the cut the NB
    // ratio (j+r-1)/(2j) only decreases.
    double tail_mean_bound = 0.0;
    for (int f = 0; f < m; ++f) {
        const std::int64_t j = v - offset + f;
        const std::int64_t r = m - f;
        const double rho = static_cast<double>(j + r) / (2.0 * static_cast<double>(j + 1));
        if (rho >= 1.0) throw std::logic_error("nu_exact tail ratio not contracting");
        const double head = weight[static_cast<std::size_t>(f)] * nb[static_cast<std::size_t>(f)];
        const double vd = static_cast<double>(std::llabs(v));
        tail_mean_bound += head * (vd * rho / (1.0 - rho) + rho / ((1.0 - rho) * (1.0 - rho)));
    }

    // Lift truncation dust so the mass invariant holds exactly enough.
    return MigrationLaw(vmin, std::move(pmf), tail_mass, tail_mean_bound);
}

double theta(const MigrationLaw& nu) {
    return nu.mean() / OffspringLaw::b;
}

BranchTrace munu_run(const MigrationLaw& nu, std::int64_t horizon, CounterRng& rng) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    BranchTrace trace;
    trace.values.reserve(static_cast<std::size_t>(std::min<std::int64_t>(horizon + 1, 1 << 20)));
    std::int64_t z = 0;
    trace.values.push_back(z);
    for (std::int64_t k = 0; k < horizon; ++k) {
        const std::int64_t eta = nu.sample(rng);
        z = OffspringLaw::sample_sum(z + eta, rng);
        trace.values.push_back(z);
        if (trace.censored && z == 0) {
            trace.lifetime = k + 1;
            trace.censored = false;
        }
    }
    const std::int64_t stop = trace.censored ? horizon + 1 : trace.lifetime;
    for (std::int64_t k = 0; k < std::min<std::int64_t>(stop, horizon + 1); ++k)
        trace.stopped_progeny += trace.values[static_cast<std::size_t>(k)];
    return trace;
}

StoppedRun run_stopped(const MigrationLaw& nu, std::int64_t horizon,
                       std::span<const std::int64_t> grid, CounterRng& rng) {
    StoppedRun run;
    run.progeny_at.assign(grid.size(), 0);
    std::int64_t z = 0, cum = 0;
    std::size_t g = 0;
    std::int64_t k = 1;
    for (; k <= horizon; ++k) {
        const std::int64_t eta = nu.sample(rng);
        z = OffspringLaw::sample_sum(z + eta, rng);
        if (z == 0) break;
        cum += z;
        while (g < grid.size() && grid[g] <= k) run.progeny_at[g++] = cum; // grid sorted
    }
    run.lifetime = z == 0 && k <= horizon ? k : horizon + 1; // censored past horizon
    while (g < grid.size()) run.progeny_at[g++] = cum;       // stopped values are 0 from N on
    return run;
}

SurvivalCurves survival_progeny_curves(const MigrationLaw& nu, std::int64_t n_max,
                                       std::int64_t replicates, std::uint64_t seed,
                                       double level, int workers) {
    if (replicates < 2) throw std::invalid_argument("need at least 2 replicates");
    SurvivalCurves curves;
    for (std::int64_t n = 1; n <= n_max; n = n < 64 ? n + 1 : n + std::max<std::int64_t>(1, n / 8))
        curves.grid.push_back(n);
    if (curves.grid.back() != n_max) curves.grid.push_back(n_max);
    curves.replicates = replicates;
    const auto g = static_cast<std::size_t>(curves.grid.size());

    std::vector<std::int32_t> lifetimes(static_cast<std::size_t>(replicates));
    std::vector<std::vector<std::int64_t>> progeny(static_cast<std::size_t>(replicates));
    parallel_for_index(replicates, workers, [&](std::int64_t i) {
        CounterRng rng(replicate_seed(seed, static_cast<std::uint64_t>(i)), StreamDomain::migration);
        auto run = run_stopped(nu, n_max, curves.grid, rng);
        lifetimes[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(std::min<std::int64_t>(run.lifetime, n_max + 1));
        progeny[static_cast<std::size_t>(i)] = std::move(run.progeny_at);
    });

    const double zq = normal_quantile(1.0 - (1.0 - level) / 2.0);

    const double r = static_cast<double>(replicates);
    for (std::size_t gi = 0; gi < g; ++gi) {
        const std::int64_t n = curves.grid[gi];
        std::int64_t alive = 0;
        double vsum = 0.0, vsq = 0.0;
        for (std::int64_t i = 0; i < replicates; ++i) {
            if (lifetimes[static_cast<std::size_t>(i)] > n) ++alive;
            const double p = static_cast<double>(progeny[static_cast<std::size_t>(i)][gi]);
            vsum += p;
            vsq += p * p;
        }
        const double u = static_cast<double>(alive) / r;
        const double use = std::sqrt(std::max(0.0, u * (1.0 - u) / r));
        curves.u.push_back(u);
        curves.u_lo.push_back(std::max(0.0, u - zq * use));
        curves.u_hi.push_back(std::min(1.0, u + zq * use));
        const double vmean = vsum / r;
        const double vvar = std::max(0.0, (vsq - vsum * vsum / r) / (r - 1.0));
        const double vse = std::sqrt(vvar / r);
        curves.v.push_back(vmean);
        curves.v_lo.push_back(vmean - zq * vse);
        curves.v_hi.push_back(vmean + zq * vse);
    }
    return curves;
}

ExactSurvival exact_survival_propagation(const MigrationLaw& nu, std::int64_t n_max,
                                         std::int64_t state_cap) {
    if (state_cap < 1) throw std::invalid_argument("state_cap must be >= 1");
    const auto cap = static_cast<std::size_t>(state_cap);
    const std::int64_t eta_max = nu.max_value();
    const std::int64_t max_parents = state_cap + std::max<std::int64_t>(eta_max, 0);

    ExactSurvival out;
    out.u.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.leak.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.u[0] = 1.0;

    std::vector<double> pi(cap + 1, 0.0); // alive pmf over 0..cap (0 active only at the start)
    pi[0] = 1.0;
    double leak_cum = 0.0;

    std::vector<double> parents(static_cast<std::size_t>(max_parents) + 1, 0.0);
    std::vector<double> nb(cap + 1, 0.0);
    std::vector<double> next(cap + 1, 0.0);

    for (std::int64_t n = 1; n <= n_max; ++n) {
        std::fill(parents.begin(), parents.end(), 0.0);
        for (std::size_t z = 0; z <= cap; ++z) {
            const double pz = pi[z];
            if (pz == 0.0) continue;
            for (std::int64_t eta = nu.min_value(); eta <= eta_max; ++eta) {
                const double pe = nu.pmf(eta);
                if (pe == 0.0) continue;
                const std::int64_t m = static_cast<std::int64_t>(z) + eta;
                if (m > 0) parents[static_cast<std::size_t>(m)] += pz * pe;
            }
        }
        std::fill(next.begin(), next.end(), 0.0);
        double this_leak = 0.0;
        // NB_m rows by the in-place prefix recurrence:
        //   NB_m[j] = (NB_{m-1}[j] + NB_m[j-1]) / 2, NB_1[j] = 2^-(j+1).
        for (std::int64_t m = 1; m <= max_parents; ++m) {
            if (m == 1) {
                double v = 0.5;
                for (std::size_t j = 0; j <= cap; ++j, v *= 0.5) nb[j] = v;
            } else {
                double prev_new = 0.0;
                for (std::size_t j = 0; j <= cap; ++j) {
                    nb[j] = 0.5 * (nb[j] + prev_new);
                    prev_new = nb[j];
                }
            }
            const double pm = parents[static_cast<std::size_t>(m)];
            if (pm == 0.0) continue;
            double row_mass = 0.0;
            for (std::size_t j = 0; j <= cap; ++j) {
                next[j] += pm * nb[j];
                row_mass += nb[j];
            }
            this_leak += pm * std::max(0.0, 1.0 - row_mass);
        }
        next[0] = 0.0; // deaths absorb
        leak_cum += this_leak;
        double alive = 0.0;
        for (std::size_t j = 1; j <= cap; ++j) alive += next[j];
        out.u[static_cast<std::size_t>(n)] = alive + leak_cum;
        out.leak[static_cast<std::size_t>(n)] = leak_cum;
        pi.swap(next);
        pi[0] = 0.0;
    }
    return out;
}

SplitSurvival survival_tail_splitting(const MigrationLaw& nu, std::span<const std::int64_t> levels,
                                      std::int64_t base_replicates, std::int64_t target_population,
                                      std::uint64_t seed, int workers) {
    if (levels.empty()) throw std::invalid_argument("need at least one level");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1]) throw std::invalid_argument("levels must increase");

    SplitSurvival out;
    out.base_replicates = base_replicates;
    out.levels.assign(levels.begin(), levels.end());

    // Base stage: fresh runs to the first level.
    std::vector<std::int64_t> states(static_cast<std::size_t>(base_replicates), -1);
    parallel_for_index(base_replicates, workers, [&](std::int64_t i) {
        CounterRng rng(replicate_seed(seed, static_cast<std::uint64_t>(i)), StreamDomain::migration);
        std::int64_t z = 0;
        for (std::int64_t k = 0; k < levels[0]; ++k) {
            z = OffspringLaw::sample_sum(z + nu.sample(rng), rng);
            if (z == 0) return; // slot stays -1
        }
        states[static_cast<std::size_t>(i)] = z;
    });

    double u = 1.0, relvar = 0.0;
    std::vector<std::int64_t> alive;
    for (std::int64_t s : states)
        if (s > 0) alive.push_back(s);
    u *= static_cast<double>(alive.size()) / static_cast<double>(base_replicates);
    if (!alive.empty())
        relvar += (1.0 - u) / (u * static_cast<double>(base_replicates));
    out.u.push_back(u);
    out.rel_se.push_back(std::sqrt(std::max(0.0, relvar)));

    for (std::size_t stage = 1; stage < levels.size(); ++stage) {
        if (alive.empty()) {
            out.u.push_back(0.0);
            out.rel_se.push_back(0.0);
            continue;
        }
        // Resample with replacement up to the target population.
        std::vector<std::int64_t> pool;
        if (static_cast<std::int64_t>(alive.size()) >= target_population) {
            pool = alive;
        } else {
            pool.resize(static_cast<std::size_t>(target_population));
            for (std::int64_t i = 0; i < target_population; ++i) {
                const std::uint64_t pick =
                    keyed_u64(seed, StreamDomain::resample, static_cast<std::uint64_t>(stage), static_cast<std::uint64_t>(i));
                pool[static_cast<std::size_t>(i)] = alive[static_cast<std::size_t>(pick % alive.size())];
            }
        }
        const std::int64_t steps = levels[stage] - levels[stage - 1];
        std::vector<std::int64_t> next_states(pool.size(), -1);
        parallel_for_index(static_cast<std::int64_t>(pool.size()), workers, [&](std::int64_t i) {
            CounterRng rng(keyed_u64(seed, StreamDomain::resample,
                                     0x100 + static_cast<std::uint64_t>(stage), static_cast<std::uint64_t>(i)),
                           StreamDomain::migration);
            std::int64_t z = pool[static_cast<std::size_t>(i)];
            for (std::int64_t k = 0; k < steps; ++k) {
                z = OffspringLaw::sample_sum(z + nu.sample(rng), rng);
                if (z == 0) {
                    next_states[static_cast<std::size_t>(i)] = -1;
                    return;
                }
            }
            next_states[static_cast<std::size_t>(i)] = z;
        });
        alive.clear();
        for (std::int64_t s : next_states)
            if (s > 0) alive.push_back(s);
        const double p = static_cast<double>(alive.size()) / static_cast<double>(pool.size());
        u *= p;
        if (p > 0.0) relvar += (1.0 - p) / (p * static_cast<double>(pool.size()));
        out.u.push_back(u);
        out.rel_se.push_back(std::sqrt(std::max(0.0, relvar)));
    }
    return out;
}

ForwardChains forward_chains(const CoinField& field, std::int64_t max_generations,
                             std::int64_t walk_step_budget) {
    ForwardChains out;
    const std::int64_t m = field.law() ? field.law()->common_depth() : 1;

    {
        CoinField walk_field = field.fork_fresh();
        Excursion exc = run_right_excursion(walk_field, walk_step_budget);
        out.excursion_finite = exc.finite;
        out.u = exc.finite ? upcrossings(exc.path) : upcrossing_counts_prefix(exc.path);
    }
    {
        CoinField vf = field.fork_fresh();
        out.v.push_back(1);
        for (std::int64_t k = 0; k + 1 <= max_generations && out.v.back() > 0; ++k)
            out.v.push_back(vf.successes_before_mth_failure(k + 1, out.v.back()));
    }
    {
        CoinField wf = field.fork_fresh();
        out.w.push_back(0);
        for (std::int64_t k = 0; k + 1 <= max_generations; ++k) {
            const auto pair = wf.successes_with_prefix(k, std::max<std::int64_t>(out.w.back(), m), m);
            out.w.push_back(pair.full);
            out.z.push_back(pair.full - pair.prefix);
        }
    }
    return out;
}

BackwardVSummary backward_v_stopped_sum(const CoinField& field, std::int64_t max_generations) {
    CoinField vf = field.fork_fresh();
    BackwardVSummary out;
    std::int64_t v = 0;
    for (std::int64_t k = 0; k < max_generations; ++k) {
        v = vf.failures_before_mth_success(k, v + 1);
        if (v == 0) {
            out.lifetime = k + 1;
            return out;
        }
        out.stopped_sum += v;
    }
    out.lifetime = -1; // censored
    return out;
}

BackwardChains backward_chains(const CoinField& field, std::int64_t max_generations) {
    BackwardChains out;
    const std::int64_t m = field.law() ? field.law()->common_depth() : 1;

    {
        CoinField vf = field.fork_fresh();
        out.v.push_back(0);
        for (std::int64_t k = 0; k + 1 <= max_generations; ++k) {
            out.v.push_back(vf.failures_before_mth_success(k, out.v.back() + 1));
            if (out.v_lifetime < 0 && out.v.back() == 0) out.v_lifetime = k + 1;
        }
        const std::int64_t stop = out.v_lifetime < 0 ? static_cast<std::int64_t>(out.v.size()) : out.v_lifetime;
        out.v_stopped.assign(out.v.size(), 0);
        for (std::int64_t k = 0; k < stop && k < static_cast<std::int64_t>(out.v.size()); ++k) {
            out.v_stopped[static_cast<std::size_t>(k)] = out.v[static_cast<std::size_t>(k)];
            out.v_stopped_sum += out.v[static_cast<std::size_t>(k)];
        }
    }
    {
        CoinField wf = field.fork_fresh();
        out.w.push_back(0);
        for (std::int64_t k = 0; k + 1 <= max_generations; ++k) {
            const auto pair = wf.failures_with_prefix(k, std::max<std::int64_t>(out.w.back() + 1, m), m);
            out.w.push_back(pair.full);
            out.zprime.push_back(pair.full - pair.prefix);
        }
    }
    return out;
}

} // namespace erw
