#include "erw/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace erw {

EnvironmentLaw::EnvironmentLaw(std::vector<Component> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("environment law needs at least one component");
    double wsum = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0)) throw std::invalid_argument("component weights must be strictly positive");
        if (c.pile.probs.empty()) throw std::invalid_argument("cookie pile must have depth >= 1");
        for (double p : c.pile.probs)
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("cookie probabilities must lie in [0,1]");
        wsum += c.weight;
        common_depth_ = std::max(common_depth_, c.pile.depth());
    }
    if (std::abs(wsum - 1.0) > kWeightTolerance)
        throw std::invalid_argument("component weights must sum to 1 within 1e-12, got " + std::to_string(wsum));
    for (auto& c : components_)
        c.pile.probs.resize(static_cast<std::size_t>(common_depth_), 0.5);
}

namespace {

double sum_smallest_first(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end(), [](double a, double b) {
        const double ma = std::abs(a), mb = std::abs(b);
        return ma != mb ? ma < mb : a < b;
    });
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

} // namespace

double delta(const EnvironmentLaw& law) {
    std::vector<double> outer;
    outer.reserve(law.components().size());
    for (const auto& c : law.components()) {
        std::vector<double> inner;
        inner.reserve(c.pile.probs.size());
        for (double p : c.pile.probs) inner.push_back(2.0 * p - 1.0);
        outer.push_back(c.weight * sum_smallest_first(std::move(inner)));
    }
    return sum_smallest_first(std::move(outer));
}

bool check_ellipticity(const EnvironmentLaw& law) {
    double all_right = 0.0, all_left = 0.0;
    for (const auto& c : law.components()) {
        double pr = 1.0, pl = 1.0;
        for (double p : c.pile.probs) {
            pr *= p;
            pl *= 1.0 - p;
        }
        all_right += c.weight * pr;
        all_left += c.weight * pl;
    }
    return all_right > 0.0 && all_left > 0.0;
}

EnvironmentLaw reflect(const EnvironmentLaw& law) {
    auto comps = law.components();
    for (auto& c : comps)
        for (double& p : c.pile.probs) p = 1.0 - p;
    return EnvironmentLaw(std::move(comps));
}

EnvironmentLaw permute(const EnvironmentLaw& law, std::span<const int> pi) {
    const int m = law.common_depth();
    if (static_cast<int>(pi.size()) != m)
        throw std::invalid_argument("permutation size must equal the common depth");
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    for (int v : pi) {
        if (v < 1 || v > m || seen[static_cast<std::size_t>(v - 1)])
            throw std::invalid_argument("permutation must be a bijection of {1..M}");
        seen[static_cast<std::size_t>(v - 1)] = true;
    }
    auto comps = law.components();
    for (auto& c : comps) {
        std::vector<double> reordered(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            reordered[static_cast<std::size_t>(i)] = c.pile.probs[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)] - 1)];
        c.pile.probs = std::move(reordered);
    }
    return EnvironmentLaw(std::move(comps));
}

SiteSampler::SiteSampler(const EnvironmentLaw& law, std::uint64_t seed)
    : law_(&law), seed_(seed) {
    cumw_.reserve(law.components().size());
    double acc = 0.0;
    for (const auto& c : law.components()) {
        acc += c.weight;
        cumw_.push_back(acc);
    }
    cumw_.back() = 1.0;
}

int SiteSampler::component_at(std::int64_t site) const noexcept {
    if (cumw_.size() == 1) return 0;
    const double u = to_unit(keyed_u64(seed_, StreamDomain::site_component, static_cast<std::uint64_t>(site)));
    const auto it = std::upper_bound(cumw_.begin(), cumw_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cumw_.begin(),
                                                     static_cast<std::ptrdiff_t>(cumw_.size()) - 1));
}

} // namespace erw
