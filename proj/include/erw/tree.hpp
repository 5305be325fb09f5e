#pragma once

#include <cstdint>
#include <vector>

#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace erw {

// Rooted ordered tree stored as per-generation child counts, the shape the
// excursion scan produces directly: child_counts[k][j] is the number of
// children of the j-th (preorder) particle of generation k. Memory stays
// linear in the excursion length.
struct ExcursionTree {
    std::vector<std::vector<std::int64_t>> child_counts;

    // g_0 = 1, ..., g_m = 0 with the terminating zero generation included.
    std::vector<std::int64_t> generation_sizes() const;
    std::int64_t total_particles() const;
    bool valid() const noexcept;
};

// The path-wise bijection between finite right excursions and finite rooted
// trees: particle j of generation k is the j-th upcrossing of edge (k, k+1),
// and its children are the upcrossings of (k+1, k+2) nested inside it.
// Extracted by a single left-to-right scan.
ExcursionTree excursion_to_tree(const WalkPath& excursion);

// The ant traversal: preorder, leftmost child first; +1 entering an edge,
// -1 on the final ascent. Inverse of excursion_to_tree.
WalkPath tree_to_excursion(const ExcursionTree& tree);

// Galton-Watson tree with Geom(1/2) offspring, grown generation by
// generation. Regrows from scratch on the (rare) event the particle budget
// is hit, so the result is always finite.
ExcursionTree sample_geometric_tree(std::uint64_t seed, std::int64_t max_particles = 1'000'000);

} // namespace erw
