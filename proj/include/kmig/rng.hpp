#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace kmig::mc {

/// Philox4x32-10 counter-based generator.
///
/// The 128-bit counter is laid out as [block, substream, stream_lo, stream_hi]
/// and the key is the 64-bit seed, so every (seed, stream_id, substream)
/// triple owns an independent sequence of 2^32 blocks. All variates are built
/// from the raw 32-bit output with explicit algorithms, never std::
/// distributions, which keeps sequences identical across standard libraries.
class RngStream {
 public:
  static constexpr std::string_view kIdentity = "philox4x32-10/kmig-layout-1";

  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t substream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  /// Gamma(shape, scale 1); Marsaglia-Tsang with the shape < 1 boost.
  double gamma(double shape);
  /// Poisson(mean); multiplication method below 12, PTRS above.
  std::uint64_t poisson(double mean);

  /// One Philox4x32-10 block, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kmig::mc
