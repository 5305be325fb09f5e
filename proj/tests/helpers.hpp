#pragma once

#include <vector>

#include "erw/env.hpp"

namespace erw::testing {

inline EnvironmentLaw single_pile(std::vector<double> probs) {
    return EnvironmentLaw({{1.0, CookiePile{std::move(probs)}}});
}

inline EnvironmentLaw placebo(int depth = 2) {
    return single_pile(std::vector<double>(static_cast<std::size_t>(depth), 0.5));
}

// delta = 0.5
inline EnvironmentLaw law_p075() { return single_pile({0.75}); }
// delta = 1.5
inline EnvironmentLaw law_delta15() { return single_pile({0.875, 0.875}); }
// delta = 3
inline EnvironmentLaw law_delta3() { return single_pile({0.9, 0.9, 0.9}); }
// delta = 5.4
inline EnvironmentLaw law_delta54() { return single_pile({0.95, 0.95, 0.95, 0.95, 0.95, 0.95}); }
// delta = 0 mixture of opposite piles
inline EnvironmentLaw law_mixture0() {
    return EnvironmentLaw({{0.5, CookiePile{{0.9, 0.9}}}, {0.5, CookiePile{{0.1, 0.1}}}});
}

} // namespace erw::testing
