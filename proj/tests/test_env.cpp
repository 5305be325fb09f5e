#include <doctest.h>

#include <array>
#include <cmath>

#include "erw/env.hpp"
#include "erw/rng.hpp"
#include "helpers.hpp"

using namespace erw;
using namespace erw::testing;

TEST_CASE("delta: placebo pile is driftless") {
    CHECK(delta(placebo(2)) == 0.0);
}

TEST_CASE("delta: single pile (0.9,0.9,0.9) = 2.4") {
    CHECK(delta(law_delta3()) == doctest::Approx(2.4).epsilon(1e-12));
}

TEST_CASE("delta: opposite mixture cancels to 0") {
    CHECK(delta(law_mixture0()) == 0.0);
}

TEST_CASE("law validation") {
    CHECK_THROWS(EnvironmentLaw({}));
    CHECK_THROWS(EnvironmentLaw({{0.5, CookiePile{{0.5}}}}));                        // weights not 1
    CHECK_THROWS(EnvironmentLaw({{1.0, CookiePile{{1.5}}}}));                        // prob out of range
    CHECK_THROWS(EnvironmentLaw({{0.5, CookiePile{{0.5}}}, {0.5, CookiePile{{}}}})); // empty pile
    // padding to the common depth
    const EnvironmentLaw law({{0.5, CookiePile{{0.9, 0.9, 0.9}}}, {0.5, CookiePile{{0.1}}}});
    CHECK(law.common_depth() == 3);
    CHECK(law.components()[1].pile.probs == std::vector<double>{0.1, 0.5, 0.5});
}

TEST_CASE("ellipticity") {
    CHECK(check_ellipticity(placebo(2)));
    CHECK_FALSE(check_ellipticity(single_pile({1.0, 0.5})));
    CHECK(check_ellipticity(EnvironmentLaw({{0.5, CookiePile{{1.0, 1.0}}}, {0.5, CookiePile{{0.0, 0.0}}}})));
}

TEST_CASE("reflect flips drifts and permutation keeps them") {
    const auto law = single_pile({0.9, 0.1});
    const auto refl = reflect(law);
    CHECK(refl.components()[0].pile.probs == std::vector<double>{0.1, 0.9});
    CHECK(delta(law) == 0.0);
    CHECK(delta(refl) == 0.0);

    const std::array<int, 2> swap = {2, 1};
    const auto perm = permute(law, swap);
    CHECK(perm.components()[0].pile.probs == std::vector<double>{0.1, 0.9});
    CHECK(delta(perm) == delta(law));

    const std::array<int, 2> id = {1, 2};
    CHECK(permute(law, id).components()[0].pile.probs == law.components()[0].pile.probs);

    const std::array<int, 2> bad = {1, 1};
    CHECK_THROWS(permute(law, bad));
    const std::array<int, 1> short_pi = {1};
    CHECK_THROWS(permute(law, short_pi));
}

TEST_CASE("delta invariants on random laws") {
    CounterRng rng(123, StreamDomain::replicate);
    for (int rep = 0; rep < 50; ++rep) {
        const int m = 1 + static_cast<int>(rng() % 5);
        const int ncomp = 1 + static_cast<int>(rng() % 3);
        std::vector<EnvironmentLaw::Component> comps;
        double wsum = 0.0;
        for (int c = 0; c < ncomp; ++c) {
            EnvironmentLaw::Component comp;
            comp.weight = 0.1 + rng.uniform();
            wsum += comp.weight;
            for (int i = 0; i < m; ++i) {
                // dyadic grid keeps reflection exact in floating point
                comp.pile.probs.push_back(static_cast<double>(rng() % 1025) / 1024.0);
            }
            comps.push_back(std::move(comp));
        }
        double acc = 0.0;
        for (std::size_t c = 0; c + 1 < comps.size(); ++c) {
            comps[c].weight /= wsum;
            acc += comps[c].weight;
        }
        comps.back().weight = 1.0 - acc;
        const EnvironmentLaw law(comps);

        CHECK(delta(reflect(law)) == -delta(law));

        std::vector<int> pi(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) pi[static_cast<std::size_t>(i)] = i + 1;
        for (int i = m - 1; i > 0; --i)
            std::swap(pi[static_cast<std::size_t>(i)], pi[rng() % static_cast<std::uint64_t>(i + 1)]);
        const auto permuted = permute(law, pi);
        CHECK(delta(permuted) == delta(law));
        CHECK(check_ellipticity(permuted) == check_ellipticity(law));
    }
}

TEST_CASE("site sampling: degenerate, frequency, determinism") {
    const auto one = law_p075();
    SiteSampler s1(one, 99);
    for (std::int64_t site = -3; site <= 3; ++site) CHECK(s1.component_at(site) == 0);

    const EnvironmentLaw two({{0.5, CookiePile{{0.9}}}, {0.5, CookiePile{{0.1}}}});
    SiteSampler s2(two, 7);
    const std::int64_t n = 100000;
    std::int64_t first = 0;
    for (std::int64_t site = 0; site < n; ++site)
        if (s2.component_at(site) == 0) ++first;
    const double freq = static_cast<double>(first) / static_cast<double>(n);
    const double se = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(freq - 0.5) < 4 * se);

    SiteSampler again(two, 7);
    for (std::int64_t site = -50; site < 50; ++site) CHECK(again.component_at(site) == s2.component_at(site));
    SiteSampler other(two, 8);
    std::int64_t diffs = 0;
    for (std::int64_t site = 0; site < 1000; ++site)
        if (other.component_at(site) != s2.component_at(site)) ++diffs;
    CHECK(diffs > 300); // different seed, different assignment
}
