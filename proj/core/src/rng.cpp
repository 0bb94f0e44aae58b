#include "abep/rng.hpp"

namespace abep {
namespace {

std::uint64_t splitmix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::string_view task,
                          std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ fnv1a(task));
  return splitmix64(h ^ index);
}

}  // namespace abep
