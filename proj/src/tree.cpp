#include "erw/tree.hpp"

#include <numeric>
#include <stdexcept>

namespace erw {

std::vector<std::int64_t> ExcursionTree::generation_sizes() const {
    std::vector<std::int64_t> g;
    g.reserve(child_counts.size() + 1);
    for (const auto& gen : child_counts) g.push_back(static_cast<std::int64_t>(gen.size()));
    g.push_back(0);
    return g;
}

std::int64_t ExcursionTree::total_particles() const {
    std::int64_t total = 0;
    for (const auto& gen : child_counts) total += static_cast<std::int64_t>(gen.size());
    return total;
}

bool ExcursionTree::valid() const noexcept {
    if (child_counts.empty() || child_counts.front().size() != 1) return false;
    for (std::size_t k = 0; k < child_counts.size(); ++k) {
        std::int64_t children = 0;
        for (std::int64_t c : child_counts[k]) {
            if (c < 0) return false;
            children += c;
        }
        const std::int64_t next =
            k + 1 < child_counts.size() ? static_cast<std::int64_t>(child_counts[k + 1].size()) : 0;
        if (children != next) return false;
    }
    return true;
}

ExcursionTree excursion_to_tree(const WalkPath& excursion) {
    const auto u = upcrossings(excursion); // validates the excursion
    ExcursionTree tree;
    tree.child_counts.resize(u.size() - 1); // generations 0..max_level-1
    std::vector<std::size_t> open(u.size(), 0);
    std::int64_t t0 = 1;
    while (excursion.at(t0) != 0) ++t0;
    for (std::int64_t n = 0; n < t0; ++n) {
        const std::int64_t x = excursion.at(n);
        if (excursion.at(n + 1) != x + 1) continue; // down-moves close particles implicitly
        const auto k = static_cast<std::size_t>(x); // new particle of generation x
        open[k] = tree.child_counts[k].size();
        tree.child_counts[k].push_back(0);
        if (k > 0) ++tree.child_counts[k - 1][open[k - 1]];
    }
    return tree;
}

WalkPath tree_to_excursion(const ExcursionTree& tree) {
    if (!tree.valid()) throw std::invalid_argument("malformed excursion tree");
    WalkPath path;
    path.start = 0;
    path.positions.reserve(static_cast<std::size_t>(2 * tree.total_particles()) + 1);
    path.positions.push_back(0);

    // Explicit preorder stack: (generation, remaining children to emit).
    std::vector<std::size_t> cursor(tree.child_counts.size(), 0);
    std::vector<std::int64_t> remaining;
    remaining.reserve(tree.child_counts.size());

    std::int64_t level = 0;
    path.positions.push_back(1); // descend into the root
    remaining.push_back(tree.child_counts[0][cursor[0]++]);
    ++level;
    while (!remaining.empty()) {
        if (remaining.back() > 0) {
            --remaining.back();
            const auto k = static_cast<std::size_t>(level);
            remaining.push_back(tree.child_counts[k][cursor[k]++]);
            path.positions.push_back(static_cast<std::int32_t>(++level));
        } else {
            remaining.pop_back();
            path.positions.push_back(static_cast<std::int32_t>(--level));
        }
    }
    return path;
}

ExcursionTree sample_geometric_tree(std::uint64_t seed, std::int64_t max_particles) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        CounterRng rng(seed, StreamDomain::tree_growth, attempt);
        ExcursionTree tree;
        tree.child_counts.push_back({geom_half(rng)});
        std::int64_t total = 1;
        bool overflow = false;
        while (true) {
            std::int64_t next_size = 0;
            for (std::int64_t c : tree.child_counts.back()) next_size += c;
            if (next_size == 0) break;
            total += next_size;
            if (total > max_particles) {
                overflow = true;
                break;
            }
            std::vector<std::int64_t> gen(static_cast<std::size_t>(next_size));
            for (auto& c : gen) c = geom_half(rng);
            tree.child_counts.push_back(std::move(gen));
        }
        if (!overflow) return tree;
    }
}

} // namespace erw
