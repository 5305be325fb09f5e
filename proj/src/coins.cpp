#include "erw/coins.hpp"

#include <stdexcept>

namespace erw {

CoinField::CoinField(const EnvironmentLaw& law, std::uint64_t env_seed, std::uint64_t toss_seed)
    : law_(&law),
      env_seed_(env_seed),
      toss_seed_(toss_seed),
      sampler_(std::make_unique<SiteSampler>(law, env_seed)) {}

CoinField CoinField::from_stub(std::map<std::int64_t, std::vector<int>> streams) {
    for (const auto& [site, ys] : streams)
        for (int y : ys)
            if (y != 1 && y != -1) throw std::invalid_argument("stub streams must contain only +1/-1");
    CoinField f;
    f.stub_ = std::make_shared<const std::map<std::int64_t, std::vector<int>>>(std::move(streams));
    return f;
}

std::int64_t& CoinField::consumed_slot(std::int64_t site) {
    auto& v = site >= 0 ? used_pos_ : used_neg_;
    const std::size_t idx = site >= 0 ? static_cast<std::size_t>(site) : static_cast<std::size_t>(-site - 1);
    if (idx >= v.size()) v.resize(idx + 1, 0);
    return v[idx];
}

int CoinField::pile_component(std::int64_t site) {
    auto& v = site >= 0 ? comp_pos_ : comp_neg_;
    const std::size_t idx = site >= 0 ? static_cast<std::size_t>(site) : static_cast<std::size_t>(-site - 1);
    if (idx >= v.size()) v.resize(idx + 1, -1);
    if (v[idx] < 0) v[idx] = sampler_->component_at(site);
    return v[idx];
}

int CoinField::toss(std::int64_t site) {
    std::int64_t& used = consumed_slot(site);
    const std::int64_t i = ++used;
    if (stub_) {
        const auto it = stub_->find(site);
        if (it == stub_->end() || i > static_cast<std::int64_t>(it->second.size()))
            throw std::logic_error("stub stream exhausted at site " + std::to_string(site));
        return it->second[static_cast<std::size_t>(i - 1)];
    }
    const CookiePile& pile = law_->components()[static_cast<std::size_t>(pile_component(site))].pile;
    const double p = pile.prob(i);
    const double u = to_unit(keyed_u64(toss_seed_, StreamDomain::coin_toss,
                                       static_cast<std::uint64_t>(site), static_cast<std::uint64_t>(i)));
    return u < p ? 1 : -1;
}

std::int64_t CoinField::successes_before_mth_failure(std::int64_t site, std::int64_t m) {
    return successes_with_prefix(site, m, m).full;
}

std::int64_t CoinField::failures_before_mth_success(std::int64_t site, std::int64_t m) {
    return failures_with_prefix(site, m, m).full;
}

CoinField::SuccessPair CoinField::successes_with_prefix(std::int64_t site, std::int64_t m, std::int64_t cutoff) {
    const std::int64_t target = std::max(m, cutoff);
    SuccessPair out{0, 0};
    if (target <= 0) return out;
    std::int64_t failures = 0, successes = 0, tossed = 0;
    while (failures < target) {
        if (++tossed > toss_cap_)
            throw std::runtime_error("coin cap exceeded in successes_before_mth_failure");
        if (toss(site) == 1) {
            ++successes;
        } else {
            ++failures;
            if (failures == cutoff) out.prefix = successes;
        }
    }
    out.full = successes;
    if (cutoff <= 0) out.prefix = 0;
    return out;
}

CoinField::FailurePair CoinField::failures_with_prefix(std::int64_t site, std::int64_t m, std::int64_t cutoff) {
    const std::int64_t target = std::max(m, cutoff);
    FailurePair out{0, 0};
    if (target <= 0) return out;
    std::int64_t failures = 0, successes = 0, tossed = 0;
    while (successes < target) {
        if (++tossed > toss_cap_)
            throw std::runtime_error("coin cap exceeded in failures_before_mth_success");
        if (toss(site) == 1) {
            ++successes;
            if (successes == cutoff) out.prefix = failures;
        } else {
            ++failures;
        }
    }
    out.full = failures;
    if (cutoff <= 0) out.prefix = 0;
    return out;
}

std::int64_t CoinField::consumed(std::int64_t site) const noexcept {
    const auto& v = site >= 0 ? used_pos_ : used_neg_;
    const std::size_t idx = site >= 0 ? static_cast<std::size_t>(site) : static_cast<std::size_t>(-site - 1);
    return idx < v.size() ? v[idx] : 0;
}

CoinField CoinField::fork_fresh() const {
    if (stub_) {
        CoinField f;
        f.stub_ = stub_;
        f.toss_cap_ = toss_cap_;
        return f;
    }
    CoinField f(*law_, env_seed_, toss_seed_);
    f.toss_cap_ = toss_cap_;
    return f;
}

} // namespace erw
