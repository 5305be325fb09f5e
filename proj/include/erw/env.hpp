#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "erw/rng.hpp"

namespace erw {

// A pile of cookies at one site: probs[i-1] is the chance of stepping right
// on the i-th visit. Visits beyond depth() use fair coins.
struct CookiePile {
    std::vector<double> probs;

    int depth() const noexcept { return static_cast<int>(probs.size()); }
    double prob(std::int64_t visit) const noexcept {
        return visit >= 1 && visit <= depth() ? probs[static_cast<std::size_t>(visit - 1)] : 0.5;
    }
};

// Finite mixture of deterministic piles: the i.i.d. law of the environment.
// Shorter piles are padded with fair cookies up to the common depth so every
// exact recursion runs with a single M.
class EnvironmentLaw {
public:
    struct Component {
        double weight = 0.0;
        CookiePile pile;
    };

    explicit EnvironmentLaw(std::vector<Component> components);

    const std::vector<Component>& components() const noexcept { return components_; }
    int common_depth() const noexcept { return common_depth_; }

    static constexpr double kWeightTolerance = 1e-12;

private:
    std::vector<Component> components_;
    int common_depth_ = 0;
};

// Average total drift per site: sum_j w_j sum_i (2 p_i - 1), accumulated
// smallest magnitude first (tie-break on value, so the order is a function
// of the term multiset and permuting piles cannot change the result).
double delta(const EnvironmentLaw& law);

// E[prod p_i] > 0 and E[prod (1-p_i)] > 0, evaluated exactly on the mixture.
bool check_ellipticity(const EnvironmentLaw& law);

// Every cookie p -> 1-p; negates delta.
EnvironmentLaw reflect(const EnvironmentLaw& law);

// Reorders every pile by pi (a permutation of {1..common_depth}, 1-based);
// throws std::invalid_argument if pi is not a bijection.
EnvironmentLaw permute(const EnvironmentLaw& law, std::span<const int> pi);

// Lazy i.i.d. site assignment: every site draws its component independently,
// keyed by (seed, site), so any thread can materialize any site and a
// sub-range always agrees with the full sample.
class SiteSampler {
public:
    SiteSampler(const EnvironmentLaw& law, std::uint64_t seed);

    int component_at(std::int64_t site) const noexcept;
    const CookiePile& pile_at(std::int64_t site) const noexcept {
        return law_->components()[static_cast<std::size_t>(component_at(site))].pile;
    }
    std::uint64_t seed() const noexcept { return seed_; }
    const EnvironmentLaw& law() const noexcept { return *law_; }

private:
    const EnvironmentLaw* law_;
    std::uint64_t seed_;
    std::vector<double> cumw_;
};

} // namespace erw
