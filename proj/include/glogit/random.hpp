#pragma once

#include <array>
#include <cstdint>

namespace glogit {

// Philox4x32-10 counter-based generator. The key is the user seed and the upper
// half of the counter selects an independent substream, so draws for a given
// (seed, stream) never depend on how work is scheduled.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static Block bijection(Block counter, Key key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double normal(double mean, double sd);
  bool bernoulli(double p);
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes several indices into one stream id; used to give each simulation
// replicate and each purpose its own substream.
std::uint64_t stream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace glogit
