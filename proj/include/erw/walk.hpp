#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "erw/coins.hpp"

namespace erw {

// A nearest-neighbor trajectory X_0..X_H. Immutable once built.
struct WalkPath {
    std::int64_t start = 0;
    std::vector<std::int32_t> positions; // X_0..X_H

    std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(positions.size()) - 1; }
    std::int64_t at(std::int64_t n) const noexcept { return positions[static_cast<std::size_t>(n)]; }
    std::int64_t endpoint() const noexcept { return positions.back(); }
};

// X_{n+1} = X_n + Y_{#visits}^{(X_n)}, the visit count including time n, so
// the first visit to a site consumes cookie 1. Runs exactly `horizon` steps.
WalkPath run_walk(CoinField& field, std::int64_t start, std::int64_t horizon);

// Right excursion: X_0 = 0 with the first step forced to 1 (no coin spent at
// the origin), then coin-driven until the first return to 0 or the step
// budget runs out. finite == returned to 0.
struct Excursion {
    WalkPath path;
    bool finite = false;
};
Excursion run_right_excursion(CoinField& field, std::int64_t max_steps);

// Mirror image; left excursions are handled by reflecting first.
WalkPath reflect_path(const WalkPath& path);

// First hitting times T_k = inf{n >= 1 : X_n = k} for the requested levels,
// and the backtrack time D = inf{n >= 1 : X_n < X_0}. Events that have not
// happened by the horizon are censored, which is data, not an error.
struct Hit {
    bool censored = true;
    std::int64_t time = -1;
};
struct FirstPassage {
    std::vector<std::pair<std::int64_t, Hit>> hitting; // (k, T_k)
    Hit backtrack;                                     // D
    std::int64_t horizon = 0;
};
FirstPassage first_passage(const WalkPath& path, std::span<const std::int64_t> levels);

// U_k = #{n < T_0 : X_n = k, X_{n+1} = k+1} for a finite right excursion;
// U_0 = 1 and the list ends with its single terminating zero. Throws
// std::invalid_argument if the path is not a finite right excursion.
std::vector<std::int64_t> upcrossings(const WalkPath& path);

// Upcrossing counts of whatever prefix is available; no excursion check.
// Used to compare censored excursions against the dominating chain.
std::vector<std::int64_t> upcrossing_counts_prefix(const WalkPath& path);

} // namespace erw
