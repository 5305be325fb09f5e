#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "erw/env.hpp"
#include "erw/rng.hpp"

namespace erw {

// Per-site +/-1 streams Y_i^(k): the i-th toss at site k succeeds with the
// pile probability for i <= M and is fair afterwards. Tosses are keyed by
// (toss_seed, site, index), so two fields built from the same seeds replay
// identical streams; this shared randomness couples the walk with every
// chain built on top of it.
//
// A stub field carries explicit +/-1 lists instead and throws when a list
// runs out; it exists for unit tests.
class CoinField {
public:
    CoinField(const EnvironmentLaw& law, std::uint64_t env_seed, std::uint64_t toss_seed);
    CoinField(const EnvironmentLaw& law, std::uint64_t seed)
        : CoinField(law, seed, seed) {}

    static CoinField from_stub(std::map<std::int64_t, std::vector<int>> streams);

    // Next unconsumed Y at the site; +1 on success, -1 on failure.
    int toss(std::int64_t site);

    // S_m: successes strictly before the m-th failure, consuming the stream
    // from its current position. S_0 = 0.
    std::int64_t successes_before_mth_failure(std::int64_t site, std::int64_t m);

    // F_m: failures strictly before the m-th success. F_0 = 0.
    std::int64_t failures_before_mth_success(std::int64_t site, std::int64_t m);

    // Consumes the stream up to the max(m, cutoff)-th failure and reports
    // both success counts (the prefix count at the cutoff-th failure comes
    // for free on the way). Used by the W/Z decomposition.
    struct SuccessPair {
        std::int64_t full;   // S_{max(m,cutoff)}
        std::int64_t prefix; // S_cutoff
    };
    SuccessPair successes_with_prefix(std::int64_t site, std::int64_t m, std::int64_t cutoff);
    struct FailurePair {
        std::int64_t full;   // F_{max(m,cutoff)}
        std::int64_t prefix; // F_cutoff
    };
    FailurePair failures_with_prefix(std::int64_t site, std::int64_t m, std::int64_t cutoff);

    std::int64_t consumed(std::int64_t site) const noexcept;

    // Same keys (or stub lists), zero consumption: replays the exact streams.
    CoinField fork_fresh() const;

    // Tossing past the cap aborts the call: a.s.-terminating loops fail loud
    // instead of hanging.
    void set_toss_cap(std::int64_t cap) noexcept { toss_cap_ = cap; }
    std::int64_t toss_cap() const noexcept { return toss_cap_; }
    static constexpr std::int64_t kDefaultTossCap = 1'000'000'000;

    bool is_stub() const noexcept { return stub_ != nullptr; }
    const EnvironmentLaw* law() const noexcept { return law_; }
    std::uint64_t env_seed() const noexcept { return env_seed_; }
    std::uint64_t toss_seed() const noexcept { return toss_seed_; }

private:
    CoinField() = default;

    std::int64_t& consumed_slot(std::int64_t site);
    int pile_component(std::int64_t site);

    const EnvironmentLaw* law_ = nullptr;
    std::uint64_t env_seed_ = 0;
    std::uint64_t toss_seed_ = 0;
    std::unique_ptr<SiteSampler> sampler_;
    std::shared_ptr<const std::map<std::int64_t, std::vector<int>>> stub_;

    // Dense per-site state split by sign; walks touch contiguous ranges.
    std::vector<std::int64_t> used_pos_, used_neg_;
    std::vector<int> comp_pos_, comp_neg_;
    std::int64_t toss_cap_ = kDefaultTossCap;
};

} // namespace erw
