#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "erw/branching.hpp"
#include "erw/stats.hpp"
#include "helpers.hpp"

using namespace erw;
using namespace erw::testing;

TEST_CASE("offspring sampler matches Geom(1/2) (chi-square at 1%)") {
    CounterRng rng(3, StreamDomain::offspring);
    const std::int64_t n = 1000000;
    std::vector<std::int64_t> obs(17, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t k = OffspringLaw::sample(rng);
        ++obs[static_cast<std::size_t>(std::min<std::int64_t>(k, 16))];
    }
    std::vector<double> expected;
    for (int k = 0; k < 16; ++k) expected.push_back(static_cast<double>(n) * OffspringLaw::pmf(k));
    expected.push_back(static_cast<double>(n) * std::ldexp(1.0, -16)); // tail mass 2^-16
    const auto cs = chi_square(obs, expected);
    CHECK(cs.stat < cs.crit_1pct);
}

TEST_CASE("sample_sum has NegBinomial moments on both sides of the cutoff") {
    CounterRng rng(5, StreamDomain::offspring);
    for (const std::int64_t n : {40LL, 64LL, 65LL, 200LL}) {
        const int reps = 20000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < reps; ++i) {
            const double x = static_cast<double>(OffspringLaw::sample_sum(n, rng));
            sum += x;
            sq += x * x;
        }
        const double mean = sum / reps;
        const double var = sq / reps - mean * mean;
        const double nd = static_cast<double>(n);
        CHECK(std::abs(mean - nd) < 4 * std::sqrt(2.0 * nd / reps));
        CHECK(std::abs(var - 2.0 * nd) / (2.0 * nd) < 0.1);
    }
    CHECK(OffspringLaw::sample_sum(0, rng) == 0);
    CHECK(OffspringLaw::sample_sum(-5, rng) == 0); // empty-sum rule
}

TEST_CASE("nu_exact: fair single cookie is the shifted geometric") {
    const auto nu = nu_exact(placebo(1), Direction::forward);
    CHECK(nu.min_value() == -1);
    for (std::int64_t k = -1; k <= 20; ++k)
        CHECK(nu.pmf(k) == doctest::Approx(std::ldexp(1.0, static_cast<int>(-(k + 2)))).epsilon(1e-13));
    CHECK(std::abs(nu.mean()) <= 1e-9 + nu.tail_mean_bound());
}

TEST_CASE("nu_exact: forward table for the 3/4 cookie") {
    const auto nu = nu_exact(law_p075(), Direction::forward);
    CHECK(nu.pmf(-1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(nu.pmf(0) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(nu.pmf(1) == doctest::Approx(0.1875).epsilon(1e-14));
    CHECK(nu.pmf(2) == doctest::Approx(0.09375).epsilon(1e-14));
    CHECK(nu.mean() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(theta(nu) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("nu_exact: backward table for the 3/4 cookie") {
    const auto nu = nu_exact(law_p075(), Direction::backward);
    CHECK(nu.min_value() == 0);
    CHECK(nu.pmf(0) == doctest::Approx(0.75).epsilon(1e-14));
    for (std::int64_t k = 1; k <= 20; ++k)
        CHECK(nu.pmf(k) == doctest::Approx(0.25 * std::ldexp(1.0, static_cast<int>(-k))).epsilon(1e-13));
    CHECK(nu.mean() == doctest::Approx(0.5).epsilon(1e-10)); // 1 - delta
    CHECK(theta(nu) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("theta identities on random mixtures") {
    CounterRng rng(17, StreamDomain::replicate);
    for (int rep = 0; rep < 10; ++rep) {
        const int m = 1 + static_cast<int>(rng() % 5);
        std::vector<EnvironmentLaw::Component> comps;
        const int ncomp = 1 + static_cast<int>(rng() % 3);
        for (int c = 0; c < ncomp; ++c) {
            EnvironmentLaw::Component comp;
            comp.weight = 1.0 / ncomp;
            for (int i = 0; i < m; ++i) comp.pile.probs.push_back(rng.uniform());
            comps.push_back(std::move(comp));
        }
        comps.back().weight = 1.0 - (ncomp - 1) * (1.0 / ncomp);
        const EnvironmentLaw law(comps);
        const double d = delta(law);
        const auto fwd = nu_exact(law, Direction::forward);
        const auto bwd = nu_exact(law, Direction::backward);
        CHECK(std::abs(fwd.mean() - d) <= 1e-9 + fwd.tail_mean_bound());
        CHECK(std::abs(bwd.mean() - (1.0 - d)) <= 1e-9 + bwd.tail_mean_bound());
        CHECK(fwd.min_value() >= -m);
        CHECK(bwd.min_value() >= -m);
    }
}

TEST_CASE("nu_exact is invariant under cookie permutations") {
    CounterRng rng(29, StreamDomain::replicate);
    const auto law = single_pile({0.9, 0.2, 0.7, 0.4});
    const auto base = nu_exact(law, Direction::forward);
    std::vector<int> pi = {3, 1, 4, 2};
    const auto permuted_law = permute(law, pi);
    const auto perm = nu_exact(permuted_law, Direction::forward);
    CHECK(base.min_value() == perm.min_value());
    for (std::int64_t k = base.min_value(); k <= std::max(base.max_value(), perm.max_value()); ++k)
        CHECK(std::abs(base.pmf(k) - perm.pmf(k)) < 1e-13);
    (void)rng;
}

TEST_CASE("munu_run: degenerate migrations") {
    CounterRng rng(7, StreamDomain::migration);
    const auto zero = MigrationLaw::point_mass(0);
    const auto trace = munu_run(zero, 50, rng);
    CHECK(trace.lifetime == 1);
    for (const auto z : trace.values) CHECK(z == 0);
    CHECK(trace.stopped_progeny == 0);

    const auto curves = survival_progeny_curves(zero, 20, 500, 99);
    for (double u : curves.u) CHECK(u == 0.0);
    for (double v : curves.v) CHECK(v == 0.0);
}

TEST_CASE("exact propagation: hand values for point mass immigration") {
    // nu = delta_1: u_1 = 1/2, u_2 = 1/2 - 1/12 = 5/12
    const auto nu = MigrationLaw::point_mass(1);
    const auto exact = exact_survival_propagation(nu, 2, 400);
    CHECK(exact.u[0] == 1.0);
    CHECK(exact.u[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(exact.u[2] == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
    CHECK(exact.leak[2] < 1e-12);
}

TEST_CASE("monte carlo survival matches exact propagation") {
    for (const auto& law : {placebo(1), law_p075()}) {
        const auto nu = nu_exact(law, Direction::forward);
        const auto exact = exact_survival_propagation(nu, 10, 60);
        const auto curves = survival_progeny_curves(nu, 10, 20000, 4242);
        for (std::size_t i = 0; i < curves.grid.size(); ++i) {
            const std::int64_t n = curves.grid[i];
            const double se = std::sqrt(std::max(curves.u[i] * (1 - curves.u[i]), 1e-9) / 20000.0);
            CHECK(std::abs(curves.u[i] - exact.u[static_cast<std::size_t>(n)]) <
                  4 * se + exact.leak[static_cast<std::size_t>(n)] + 1e-9);
        }
    }
}

TEST_CASE("splitting estimator agrees with exact propagation deep in the tail") {
    const auto nu = nu_exact(law_delta3(), Direction::backward); // theta = -2
    const std::vector<std::int64_t> levels = {1, 2, 4, 8, 16, 32, 64};
    const auto split = survival_tail_splitting(nu, levels, 200000, 4000, 31337, 2);
    const auto exact = exact_survival_propagation(nu, 64, 1024);
    REQUIRE(exact.leak[64] < 1e-12);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double rel = split.u[i] / exact.u[static_cast<std::size_t>(levels[i])] - 1.0;
        CHECK(std::abs(rel) < 4 * split.rel_se[i] + 0.05);
    }
}

TEST_CASE("stub coins drive the forward chains") {
    auto field = CoinField::from_stub({{0, {-1}}, {1, {-1}}});
    const auto chains = forward_chains(field, 3, 100);
    CHECK(chains.excursion_finite);
    CHECK(chains.u == std::vector<std::int64_t>{1, 0});
    CHECK(chains.v == std::vector<std::int64_t>{1, 0});
    CHECK(chains.w[0] == 0);
    CHECK(chains.w[1] == 0); // S^(0)_1 = 0 on the stub
    CHECK(chains.z[0] == 0);
}

TEST_CASE("coupling: U = V on finite excursions, U <= V when censored") {
    for (const auto& law : {placebo(2), law_p075()}) {
        int finite = 0, censored = 0;
        for (std::uint64_t rep = 0; rep < 400; ++rep) {
            CoinField field(law, 31000 + rep);
            const auto chains = forward_chains(field, 4000, 20000);
            if (chains.excursion_finite) {
                ++finite;
                REQUIRE(chains.v.size() >= chains.u.size());
                for (std::size_t k = 0; k < chains.u.size(); ++k) CHECK(chains.u[k] == chains.v[k]);
                CHECK(chains.v.size() == chains.u.size()); // V dies exactly with U
            } else {
                ++censored;
                for (std::size_t k = 0; k < chains.u.size() && k < chains.v.size(); ++k)
                    CHECK(chains.u[k] <= chains.v[k]);
            }
        }
        CHECK(finite > 300);
    }
}

TEST_CASE("decomposed Z from the W chain has the (mu,nu)-law (KS on Z_10)") {
    const auto law = law_p075();
    const auto nu = nu_exact(law, Direction::forward);
    const int reps = 20000;
    std::vector<double> from_chains, from_munu;
    from_chains.reserve(reps);
    from_munu.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        CoinField field(law, keyed_u64(555, StreamDomain::replicate, static_cast<std::uint64_t>(i)));
        const auto chains = forward_chains(field, 11, 4);
        from_chains.push_back(static_cast<double>(chains.z[10]));
        CounterRng rng(keyed_u64(556, StreamDomain::replicate, static_cast<std::uint64_t>(i)),
                       StreamDomain::migration);
        const auto trace = munu_run(nu, 10, rng);
        from_munu.push_back(static_cast<double>(trace.values[10]));
    }
    const auto ks = ks_two_sample(from_chains, from_munu);
    CHECK(ks.stat < ks.crit_1pct);
}

TEST_CASE("backward chains: stubbed immediate successes keep V at zero") {
    std::map<std::int64_t, std::vector<int>> streams;
    for (std::int64_t k = 0; k < 10; ++k) streams[k] = {1};
    auto field = CoinField::from_stub(streams);
    const auto chains = backward_chains(field, 10);
    CHECK(chains.v[1] == 0);
    CHECK(chains.v_lifetime == 1);
    for (const auto v : chains.v_stopped) CHECK(v == 0);
    CHECK(chains.v_stopped_sum == 0);
}

TEST_CASE("backward stopped progeny is finite and stable at delta = 3") {
    const auto law = law_delta3();
    double mean_half = 0.0, mean_full = 0.0;
    const int reps = 20000;
    std::int64_t censored = 0;
    for (int i = 0; i < reps; ++i) {
        CoinField field(law, keyed_u64(777, StreamDomain::replicate, static_cast<std::uint64_t>(i)));
        const auto summary = backward_v_stopped_sum(field, 10000);
        if (summary.lifetime < 0) ++censored;
        mean_full += static_cast<double>(summary.stopped_sum);
        if (i < reps / 2) mean_half += static_cast<double>(summary.stopped_sum);
    }
    mean_full /= reps;
    mean_half /= reps / 2;
    CHECK(censored == 0);
    CHECK(mean_full > 0.0);
    CHECK(mean_full < 1.0);
    CHECK(std::abs(mean_half - mean_full) < 0.15);
}

TEST_CASE("survival dichotomy at unit scale") {
    // theta = -2: strongly subcritical migration; everything dies fast.
    const auto sub = nu_exact(law_delta3(), Direction::backward);
    for (int i = 0; i < 2000; ++i) {
        CounterRng rng(keyed_u64(888, StreamDomain::replicate, static_cast<std::uint64_t>(i)),
                       StreamDomain::migration);
        const auto run = run_stopped(sub, 10000, {}, rng);
        CHECK(run.lifetime <= 10000);
    }
    // theta = 1.5: strictly positive survival chance.
    const auto super = nu_exact(law_delta15(), Direction::forward);
    const auto curves = survival_progeny_curves(super, 300, 3000, 1212);
    const std::size_t last = curves.grid.size() - 1;
    CHECK(curves.u_lo[last] > 0.0);
    CHECK(curves.u[last] > 0.05);
}
