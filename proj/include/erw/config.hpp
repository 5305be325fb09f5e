#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "erw/env.hpp"

namespace erw {

inline constexpr const char* kToolVersion = "erwlab 0.1.0";

// Flat key = value experiment file. Unknown keys are a hard error.
// Recognized keys:
//   environment  components separated by ';', each "weight : p1 p2 ..."
//   seed         64-bit unsigned
//   horizon, replicates, margin, guard_level   positive integers
//   tail_cut     in (0, 1e-6]
//   confidence   in (0, 1)
//   output_dir   path, created on demand
struct ExperimentConfig {
    std::vector<EnvironmentLaw::Component> environment;
    std::uint64_t seed = 1;
    std::int64_t horizon = 100'000;
    std::int64_t replicates = 10'000;
    std::int64_t margin = 1'000;
    std::int64_t guard_level = 50;
    double tail_cut = 1e-12;
    double confidence = 0.95;
    std::string output_dir = "out";

    EnvironmentLaw law() const { return EnvironmentLaw(environment); }

    // Canonical serialization: fixed key order, shortest round-trip floats.
    std::string canonical() const;
    // FNV-1a of the canonical form; stamped into every output header.
    std::uint64_t hash() const;
    // "# erwlab <ver> config=<hex hash> seed=<seed>"
    std::string header_line() const;

    static ExperimentConfig parse_file(const std::filesystem::path& path);
    static ExperimentConfig parse_string(const std::string& text);
};

} // namespace erw
