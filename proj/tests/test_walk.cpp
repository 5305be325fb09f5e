#include <doctest.h>

#include <array>
#include <cmath>

#include "erw/walk.hpp"
#include "helpers.hpp"

using namespace erw;
using namespace erw::testing;

TEST_CASE("deterministic walks") {
    CoinField ones(single_pile({1.0, 1.0}), 1);
    const auto up = run_walk(ones, 0, 5);
    CHECK(up.positions == std::vector<std::int32_t>{0, 1, 2, 3, 4, 5});
    CoinField zeros(single_pile({0.0}), 1);
    const auto down = run_walk(zeros, 0, 3);
    CHECK(down.positions == std::vector<std::int32_t>{0, -1, -2, -3});
}

TEST_CASE("stub walk reproduces the hand-built path") {
    auto field = CoinField::from_stub({{0, {1, 1}}, {1, {-1, -1}}});
    const auto path = run_walk(field, 0, 3);
    CHECK(path.positions == std::vector<std::int32_t>{0, 1, 0, 1});
}

TEST_CASE("first passage and backtrack") {
    WalkPath p1{0, {0, 1, 2}};
    const std::array<std::int64_t, 2> ks = {1, 2};
    auto fp = first_passage(p1, ks);
    CHECK_FALSE(fp.hitting[0].second.censored);
    CHECK(fp.hitting[0].second.time == 1);
    CHECK(fp.hitting[1].second.time == 2);
    CHECK(fp.backtrack.censored);

    WalkPath p2{0, {0, -1}};
    auto fp2 = first_passage(p2, {});
    CHECK_FALSE(fp2.backtrack.censored);
    CHECK(fp2.backtrack.time == 1);

    WalkPath p3{0, {0, 1, 0, 1}};
    const std::array<std::int64_t, 1> zero = {0};
    auto fp3 = first_passage(p3, zero);
    CHECK(fp3.hitting[0].second.time == 2); // first return
    CHECK(fp3.backtrack.censored);
}

TEST_CASE("upcrossing counts of hand excursions") {
    CHECK(upcrossings(WalkPath{0, {0, 1, 0}}) == std::vector<std::int64_t>{1, 0});
    CHECK(upcrossings(WalkPath{0, {0, 1, 2, 1, 2, 1, 0}}) == std::vector<std::int64_t>{1, 2, 0});
    CHECK(upcrossings(WalkPath{0, {0, 1, 2, 3, 2, 1, 0}}) == std::vector<std::int64_t>{1, 1, 1, 0});
    CHECK_THROWS(upcrossings(WalkPath{0, {0, -1, 0}}));   // not a right excursion
    CHECK_THROWS(upcrossings(WalkPath{0, {0, 1, 2, 3}})); // no return
}

TEST_CASE("excursion balance: up equals down per edge, length = 2 sum U") {
    const auto law = placebo(2);
    int finite_seen = 0;
    for (std::uint64_t rep = 0; rep < 300; ++rep) {
        CoinField field(law, 1000 + rep);
        const auto exc = run_right_excursion(field, 100000);
        if (!exc.finite) continue;
        ++finite_seen;
        const auto u = upcrossings(exc.path);
        std::int64_t t0 = static_cast<std::int64_t>(exc.path.positions.size()) - 1;
        // down-crossings per edge
        std::vector<std::int64_t> down(u.size(), 0);
        for (std::int64_t n = 0; n < t0; ++n)
            if (exc.path.at(n + 1) == exc.path.at(n) - 1) ++down[static_cast<std::size_t>(exc.path.at(n + 1))];
        std::int64_t total_u = 0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            CHECK(down[k] == u[k]);
            total_u += u[k];
        }
        CHECK(t0 == 2 * total_u);
    }
    CHECK(finite_seen > 250);
}

TEST_CASE("recurrent walks range widely (both signs exceed 20)") {
    const auto law = placebo(1);
    int both = 0;
    const int reps = 1000;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        CoinField field(law, 77000 + rep);
        std::int64_t x = 0, mx = 0, mn = 0;
        for (int n = 0; n < 100000 && (mx <= 20 || mn >= -20); ++n) {
            x += field.toss(x);
            mx = std::max(mx, x);
            mn = std::min(mn, x);
        }
        if (mx > 20 && mn < -20) ++both;
    }
    CHECK(both >= 990);
}

TEST_CASE("reflection mirrors paths") {
    WalkPath p{0, {0, 1, 2, 1}};
    const auto r = reflect_path(p);
    CHECK(r.positions == std::vector<std::int32_t>{0, -1, -2, -1});
}
