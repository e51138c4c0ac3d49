#pragma once

#include <cstdint>

namespace innkeeper {

// SplitMix64 stream (Steele/Lea/Flood mixing constants). Chosen over the std
// engines because the standard pins mt19937_64's bits but not the
// distributions on top of it, and trace files must be bit-identical across
// platforms and library versions. Every random quantity in the toolkit is
// derived from next_u64() through the two helpers below, so the whole mapping
// from (master seed, run index) to a trace is fixed by this file.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53 significant bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

// Derives the stream for one run from the master seed. Two extra mixing
// rounds so that adjacent run indices do not start in adjacent states.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed,
                                     std::uint64_t run_index) {
  SplitMix64 mix(master_seed ^ (run_index * 0xd1342543de82ef95ULL + 1));
  mix.next_u64();
  return mix.next_u64();
}

}  // namespace innkeeper
