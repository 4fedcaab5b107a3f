// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_RNG_HPP
#define HPFAS_RNG_HPP

#include <array>
#include <complex>
#include <cstdint>

namespace hpfas {

/// Philox4x64-10 counter-based block cipher (Salmon et al., SC'11).
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter generate(Counter ctr, Key key);
};

/// Reproducible random stream addressed by (seed, stream_id). Block j of the
/// stream is Philox(counter = {j, stream_id, 0, 0}, key = {seed, 0}), so any
/// stream can be regenerated independently of every other stream.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  /// Two independent standard normals by the Box-Muller transform (two uniforms).
  std::complex<double> normal_pair();
  /// Number of 64-bit words consumed so far.
  std::uint64_t draws() const { return consumed_; }

private:
  Philox4x64::Key key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  Philox4x64::Counter buffer_{};
  int buffered_ = 0;
  std::uint64_t consumed_ = 0;
};

} // namespace hpfas

#endif // HPFAS_RNG_HPP
