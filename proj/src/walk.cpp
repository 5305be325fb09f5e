#include "erw/walk.hpp"

#include <algorithm>
#include <stdexcept>

namespace erw {

WalkPath run_walk(CoinField& field, std::int64_t start, std::int64_t horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    WalkPath path;
    path.start = start;
    path.positions.reserve(static_cast<std::size_t>(horizon) + 1);
    std::int64_t x = start;
    path.positions.push_back(static_cast<std::int32_t>(x));
    for (std::int64_t n = 0; n < horizon; ++n) {
        x += field.toss(x);
        path.positions.push_back(static_cast<std::int32_t>(x));
    }
    return path;
}

Excursion run_right_excursion(CoinField& field, std::int64_t max_steps) {
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    Excursion exc;
    exc.path.start = 0;
    exc.path.positions.push_back(0);
    exc.path.positions.push_back(1);
    std::int64_t x = 1;
    for (std::int64_t n = 1; n < max_steps && x != 0; ++n) {
        x += field.toss(x);
        exc.path.positions.push_back(static_cast<std::int32_t>(x));
    }
    exc.finite = x == 0;
    return exc;
}

WalkPath reflect_path(const WalkPath& path) {
    WalkPath out;
    out.start = -path.start;
    out.positions.reserve(path.positions.size());
    for (std::int32_t x : path.positions) out.positions.push_back(-x);
    return out;
}

FirstPassage first_passage(const WalkPath& path, std::span<const std::int64_t> levels) {
    FirstPassage fp;
    fp.horizon = path.horizon();
    fp.hitting.reserve(levels.size());
    for (std::int64_t k : levels) fp.hitting.emplace_back(k, Hit{});
    for (std::int64_t n = 1; n <= path.horizon(); ++n) {
        const std::int64_t x = path.at(n);
        for (auto& [k, hit] : fp.hitting)
            if (hit.censored && x == k) hit = Hit{false, n};
        if (fp.backtrack.censored && x < path.start) fp.backtrack = Hit{false, n};
    }
    return fp;
}

std::vector<std::int64_t> upcrossing_counts_prefix(const WalkPath& path) {
    std::vector<std::int64_t> u;
    for (std::int64_t n = 0; n < path.horizon(); ++n) {
        const std::int64_t x = path.at(n);
        if (path.at(n + 1) == x + 1 && x >= 0) {
            if (static_cast<std::size_t>(x) >= u.size()) u.resize(static_cast<std::size_t>(x) + 1, 0);
            ++u[static_cast<std::size_t>(x)];
        }
    }
    return u;
}

std::vector<std::int64_t> upcrossings(const WalkPath& path) {
    if (path.horizon() < 2 || path.at(0) != 0 || path.at(1) != 1)
        throw std::invalid_argument("not a right excursion: must start 0,1");
    std::int64_t t0 = -1;
    for (std::int64_t n = 1; n <= path.horizon(); ++n) {
        if (path.at(n) == 0) {
            t0 = n;
            break;
        }
        if (path.at(n) < 0) throw std::invalid_argument("not a right excursion: went negative");
    }
    if (t0 < 0) throw std::invalid_argument("not a right excursion: no return to 0 within horizon");

    std::int64_t max_level = 0;
    for (std::int64_t n = 0; n <= t0; ++n) max_level = std::max<std::int64_t>(max_level, path.at(n));
    std::vector<std::int64_t> u(static_cast<std::size_t>(max_level) + 1, 0);
    for (std::int64_t n = 0; n < t0; ++n)
        if (path.at(n + 1) == path.at(n) + 1) ++u[static_cast<std::size_t>(path.at(n))];
    // u[max_level] == 0 is the terminator; everything below is positive.
    return u;
}

} // namespace erw
