#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace abep {

using Engine = std::mt19937_64;

// Deterministic per-task stream seed derived from (seed, task, index).
// Streams for different tasks or indices are decorrelated through splitmix64
// finalisation, so the result of task k never depends on how many other
// tasks run or in which order.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view task,
                          std::uint64_t index);

inline Engine make_engine(std::uint64_t seed, std::string_view task,
                          std::uint64_t index) {
  return Engine(stream_seed(seed, task, index));
}

}  // namespace abep
