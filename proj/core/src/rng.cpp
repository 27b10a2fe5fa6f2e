#include "gwf/rng.hpp"

namespace gwf::rng {

std::uint64_t word_key(const Word& word) noexcept {
  std::uint64_t key = kRootKey;
  for (Symbol s : word) key = child_key(key, s);
  return key;
}

}  // namespace gwf::rng
