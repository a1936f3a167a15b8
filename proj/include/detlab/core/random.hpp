#pragma once

#include <cstdint>
#include <random>

namespace detlab {

/// Deterministic random stream. Sequences depend only on (seed, stream id);
/// variates are built from raw 64-bit draws so no library distribution is in
/// the loop.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }
  double normal();
  double exponential(double rate = 1.0);

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline RandomStream seeded_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RandomStream(seed, stream_id);
}

} // namespace detlab
