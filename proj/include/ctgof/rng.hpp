#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace ctgof {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

// Philox4x64-10 block function (Random123 family). Pure: the output depends
// only on (counter, key), which is what makes random access into a stream
// possible.
PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key) noexcept;

// Mixes a purpose tag into a master seed so that different Monte Carlo tasks
// driven by the same user seed never share streams.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose) noexcept;

// Maps 64 random bits to a double strictly inside (0, 1).
inline double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

class UniformSequence;

// An immutable handle on one substream. Gaussian draws are random access:
// gaussian(i) is a fixed number for a given (master_seed, stream_index).
// Sequential uniforms live in separate counter domains (see sequence()).
//
// In zero-noise mode every Gaussian draw is exactly 0; uniform sequences are
// unaffected. Used to check the deterministic skeleton of the simulators.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index, bool zero_noise = false) noexcept;

  static RngStream zero_noise(std::uint64_t master_seed = 0, std::uint64_t stream_index = 0) noexcept {
    return RngStream(master_seed, stream_index, true);
  }

  std::uint64_t master_seed() const noexcept { return key_[0]; }
  std::uint64_t stream_index() const noexcept { return key_[1]; }
  bool is_zero_noise() const noexcept { return zero_noise_; }

  // Four standard Gaussians with indices 4*block .. 4*block+3. Gaussian #i is
  // the ziggurat transform of word i % 4 of Philox block i / 4 (domain 0).
  std::array<double, 4> gaussian_block(std::uint64_t block) const noexcept;

  double gaussian(std::uint64_t index) const noexcept {
    return gaussian_block(index / 4)[index % 4];
  }

  // out[i] = gaussian(first + i).
  void fill_gaussian(std::span<double> out, std::uint64_t first = 0) const noexcept;

  // Raw Philox output for the given block within a counter domain.
  PhiloxCounter raw_block(std::uint64_t block, std::uint64_t domain) const noexcept {
    return philox4x64({block, domain, 0, 0}, key_);
  }

  // Sequential uniform source. Domain 0 is reserved for the Gaussians.
  UniformSequence sequence(std::uint64_t domain = 1) const noexcept;

 private:
  std::array<double, 4> gaussians_from_bits(std::uint64_t block, const PhiloxCounter& bits) const noexcept;

  PhiloxKey key_;
  bool zero_noise_;
};

class UniformSequence {
 public:
  UniformSequence(const RngStream& stream, std::uint64_t domain) noexcept
      : stream_(stream), domain_(domain) {}

  // Uniform on (0, 1).
  double uniform() noexcept {
    if (used_ == 4) {
      buffer_ = stream_.raw_block(block_++, domain_);
      used_ = 0;
    }
    return open_unit(buffer_[used_++]);
  }

  // Unit-rate exponential.
  double exponential() noexcept;

 private:
  RngStream stream_;
  std::uint64_t domain_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
};

inline UniformSequence RngStream::sequence(std::uint64_t domain) const noexcept {
  return UniformSequence(*this, domain);
}

}  // namespace ctgof
