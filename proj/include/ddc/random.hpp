#pragma once

#include <cstdint>
#include <random>

namespace ddc {

using RandomStream = std::mt19937_64;

/// What a derived stream is used for; keeps training and fresh test
/// draws of the same (kappa, trial) cell independent.
enum class StreamPurpose : std::uint32_t { Training = 1, TestSample = 2 };

/// Sub-stream for one (kappa, trial) cell of a sweep.
///
/// The engine is seeded through std::seed_seq with the words
///   {seed_lo, seed_hi, kappa_lo, kappa_hi, trial_lo, trial_hi, purpose}
/// where kappa contributes the bit pattern of its IEEE-754 double. The
/// derivation depends on nothing else, so cells can run in any order or
/// concurrently and still reproduce bit-for-bit.
RandomStream derive_stream(std::uint64_t master_seed, double kappa, std::uint64_t trial_index,
                           StreamPurpose purpose = StreamPurpose::Training);

}  // namespace ddc
