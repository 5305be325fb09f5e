#include <doctest.h>

#include <cmath>
#include <vector>

#include "erw/branching.hpp"
#include "erw/parallel.hpp"
#include "erw/renewal.hpp"
#include "erw/stats.hpp"
#include "helpers.hpp"

using namespace erw;
using namespace erw::testing;

TEST_CASE("find_renewals on hand paths") {
    const WalkPath p{0, {0, 1, 2, 1, 2, 3}};
    CHECK(find_renewals(p, 0).taus == std::vector<std::int64_t>{1, 5});
    const auto margin2 = find_renewals(p, 2);
    CHECK(margin2.taus == std::vector<std::int64_t>{1});
    CHECK(margin2.censored_candidates == 1);

    const WalkPath mono{0, {0, 1, 2, 3}};
    CHECK(find_renewals(mono, 0).taus == std::vector<std::int64_t>{1, 2, 3});

    const WalkPath down{0, {0, -1, -2, -3}};
    CHECK(find_renewals(down, 0).taus.empty());
}

TEST_CASE("cycle_stats on the hand path") {
    const WalkPath p{0, {0, 1, 2, 1, 2, 3}};
    const auto c = cycle_stats(p, 1, 5);
    CHECK(c.space == 2);
    CHECK(c.time == 4);
    // single downcrossing, of edge (2,1) = (X_tau2 - 1, X_tau2 - 2)
    CHECK(c.d == std::vector<std::int64_t>{0, 1, 0});
    CHECK(c.sum_d() == 1);
    CHECK(c.identity_ok);
    CHECK_THROWS(cycle_stats(p, 5, 1));
}

TEST_CASE("monotone cycles have no downcrossings") {
    const WalkPath mono{0, {0, 1, 2, 3, 4}};
    const auto c = cycle_stats(mono, 1, 4);
    CHECK(c.space == 3);
    CHECK(c.time == 3);
    CHECK(c.sum_d() == 0);
    CHECK(c.identity_ok);
}

TEST_CASE("deterministic drift: every time is a renewal and v = 1") {
    CoinField field(single_pile({1.0}), 3);
    const auto path = run_walk(field, 0, 200);
    const auto report = analyze_path(path, 10);
    CHECK(static_cast<std::int64_t>(report.taus.size()) == 190);
    std::vector<RenewalReport> reports = {report};
    const auto est = estimate_speed(reports);
    CHECK(est.v_hat == 1.0);
    CHECK(est.se == 0.0);

    std::vector<Cycle> cycles = report.cycles;
    std::vector<std::int64_t> endpoints = {200, 200};
    const auto s2 = estimate_sigma2_clt(cycles, endpoints, 200, 1.0, 0.0);
    CHECK(s2.degenerate);
    CHECK(s2.sigma2_cycles == 0.0);
}

TEST_CASE("simulated transient cycles: identity and moment sandwich hold exactly") {
    const auto law = law_delta3();
    std::int64_t cycles_seen = 0;
    for (std::uint64_t rep = 0; rep < 12; ++rep) {
        CoinField field(law, 51000 + rep);
        const auto path = run_walk(field, 0, 20000);
        const auto report = analyze_path(path, 1000);
        for (const auto& c : report.cycles) {
            ++cycles_seen;
            CHECK(c.identity_ok);
            CHECK(c.d.front() == 0);
            CHECK(c.d.back() == 0);
            CHECK(2 * c.sum_d() <= c.time);
            CHECK(c.time <= 1 + 3 * c.sum_d());
        }
    }
    CHECK(cycles_seen > 200);
}

TEST_CASE("backtrack survey: deterministic and annealed") {
    const auto never = survey_backtracking(single_pile({1.0}), 1, 50, 1000, 50, 1);
    CHECK(never.never == 50);
    CHECK(never.p_dinf() == 1.0);

    const auto mixed = survey_backtracking(law_delta3(), 2, 400, 2000, 20, 2);
    CHECK(mixed.backtracked > 0);
    CHECK(mixed.never > 0);
    CHECK(mixed.p_dinf() > 0.2);
    CHECK(mixed.p_dinf() < 0.9);
}

TEST_CASE("renewal mean vs never-backtrack probability (Monte Carlo cross-check)") {
    const auto law = law_delta3();
    std::vector<RenewalReport> reports(40);
    parallel_for_index(40, 2, [&](std::int64_t i) {
        CoinField field(law, keyed_u64(4096, StreamDomain::replicate, static_cast<std::uint64_t>(i)));
        const auto path = run_walk(field, 0, 20000);
        reports[static_cast<std::size_t>(i)] = analyze_path(path, 1000);
    });
    const auto est = estimate_speed(reports);
    CHECK(est.cycles > 2000);
    const auto survey = survey_backtracking(law, 77, 2000, 20000, 50, 2);
    const double expected_space = 1.0 / survey.p_dinf();
    CHECK(std::abs(est.mean_space - expected_space) / expected_space < 0.1);
    CHECK(est.v_hat > 0.2);
    CHECK(est.ci_lo > 0.0);
    // direct endpoint cross-check: X_H/H should sit near v_hat
    CHECK(std::abs(est.direct_endpoint_rate - est.v_hat) < 0.05);
}

TEST_CASE("downcrossing totals match the backward chain law (Lemma ffs at unit scale)") {
    const auto law = law_delta3();
    std::vector<double> sum_d;
    for (std::uint64_t rep = 0; sum_d.size() < 1500; ++rep) {
        CoinField field(law, 61000 + rep);
        const auto path = run_walk(field, 0, 20000);
        const auto report = analyze_path(path, 1000);
        for (const auto& c : report.cycles) sum_d.push_back(static_cast<double>(c.sum_d()));
    }
    std::vector<double> sum_v;
    for (std::uint64_t i = 0; sum_v.size() < 1500; ++i) {
        CoinField field(law, keyed_u64(888111, StreamDomain::replicate, i));
        sum_v.push_back(static_cast<double>(backward_v_stopped_sum(field, 100000).stopped_sum));
    }
    const auto ks = ks_two_sample(sum_d, sum_v);
    CHECK(ks.stat < ks.crit_1pct);
}

TEST_CASE("consecutive cycle times look independent (shuffle check)") {
    const auto law = law_delta3();
    std::vector<double> times;
    for (std::uint64_t rep = 0; rep < 8; ++rep) {
        CoinField field(law, 71000 + rep);
        const auto path = run_walk(field, 0, 30000);
        const auto report = analyze_path(path, 1000);
        for (const auto& c : report.cycles) times.push_back(static_cast<double>(c.time));
    }
    REQUIRE(times.size() > 1000);
    double m = 0.0;
    for (double t : times) m += t;
    m /= static_cast<double>(times.size());
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        c0 += (times[i] - m) * (times[i] - m);
        c1 += (times[i] - m) * (times[i + 1] - m);
    }
    const double corr = c1 / c0;
    CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(times.size())));
}

TEST_CASE("too few cycles is an error") {
    std::vector<RenewalReport> empty;
    CHECK_THROWS_AS((void)estimate_speed(empty), std::invalid_argument);
}
