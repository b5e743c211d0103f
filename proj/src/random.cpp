#include "ddc/random.hpp"

#include <bit>

namespace ddc {

RandomStream derive_stream(std::uint64_t master_seed, double kappa, std::uint64_t trial_index,
                           StreamPurpose purpose) {
  const auto kbits = std::bit_cast<std::uint64_t>(kappa);
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master_seed), hi(master_seed), lo(kbits),       hi(kbits),
                    lo(trial_index), hi(trial_index), static_cast<std::uint32_t>(purpose)};
  return RandomStream(seq);
}

}  // namespace ddc
