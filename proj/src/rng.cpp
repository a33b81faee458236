#include "ctgof/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/random/normal_distribution.hpp>

namespace ctgof {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

__extension__ using uint128 = unsigned __int128;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) noexcept {
  const uint128 product = static_cast<uint128>(a) * b;
  hi = static_cast<std::uint64_t>(product >> 64);
  lo = static_cast<std::uint64_t>(product);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Engine handed to the ziggurat for Gaussian #index: the first draw is the
// index's own Philox word, rare extra draws (rejections, tail) come from a
// counter space keyed by the index (ctr[3] = 1, unused by the domains).
class IndexEngine {
 public:
  using result_type = std::uint64_t;
  IndexEngine(const PhiloxKey& key, std::uint64_t index, std::uint64_t first) noexcept
      : key_(key), index_(index), first_(first) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept {
    if (draws_ == 0) {
      ++draws_;
      return first_;
    }
    const std::uint64_t k = draws_++ - 1;
    if (k % 4 == 0) extra_ = philox4x64({index_, k / 4, 0, 1}, key_);
    return extra_[k % 4];
  }

 private:
  PhiloxKey key_;
  std::uint64_t index_;
  std::uint64_t first_;
  std::uint64_t draws_ = 0;
  PhiloxCounter extra_{};
};

// Philox on blocks first..first+3 of one domain with the rounds of the four
// lanes interleaved; same output as four philox4x64 calls.
void philox4x64_x4(std::uint64_t first, std::uint64_t domain, PhiloxKey key, PhiloxCounter* out) noexcept {
  std::uint64_t c0[4], c1[4], c2[4], c3[4];
  for (int l = 0; l < 4; ++l) {
    c0[l] = first + static_cast<std::uint64_t>(l);
    c1[l] = domain;
    c2[l] = 0;
    c3[l] = 0;
  }
  for (int round = 0; round < 10; ++round) {
    for (int l = 0; l < 4; ++l) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kPhiloxM0, c0[l], hi0, lo0);
      mulhilo(kPhiloxM1, c2[l], hi1, lo1);
      const std::uint64_t n0 = hi1 ^ c1[l] ^ key[0];
      const std::uint64_t n2 = hi0 ^ c3[l] ^ key[1];
      c0[l] = n0;
      c1[l] = lo1;
      c2[l] = n2;
      c3[l] = lo0;
    }
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  for (int l = 0; l < 4; ++l) out[l] = {c0[l], c1[l], c2[l], c3[l]};
}

}  // namespace

PhiloxCounter philox4x64(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose) noexcept {
  // FNV-1a over the tag, then one splitmix round to decorrelate nearby seeds.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return splitmix64(master_seed ^ h);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index, bool zero_noise) noexcept
    : key_{master_seed, stream_index}, zero_noise_(zero_noise) {}

std::array<double, 4> RngStream::gaussian_block(std::uint64_t block) const noexcept {
  std::array<double, 4> z{};
  if (zero_noise_) return z;
  return gaussians_from_bits(block, raw_block(block, 0));
}

std::array<double, 4> RngStream::gaussians_from_bits(std::uint64_t block, const PhiloxCounter& bits) const noexcept {
  std::array<double, 4> z{};
  boost::random::normal_distribution<double> normal;
  for (std::uint64_t j = 0; j < 4; ++j) {
    IndexEngine engine(key_, 4 * block + j, bits[j]);
    z[j] = normal(engine);
  }
  return z;
}

void RngStream::fill_gaussian(std::span<double> out, std::uint64_t first) const noexcept {
  std::size_t i = 0;
  std::uint64_t index = first;
  if (zero_noise_) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  // Whole runs of four aligned blocks go through the interleaved kernel.
  while (index % 4 == 0 && out.size() - i >= 16) {
    PhiloxCounter bits[4];
    philox4x64_x4(index / 4, 0, key_, bits);
    for (int l = 0; l < 4; ++l) {
      const auto z = gaussians_from_bits(index / 4, bits[l]);
      for (int k = 0; k < 4; ++k) out[i++] = z[k];
      index += 4;
    }
  }
  while (i < out.size()) {
    const auto block = gaussian_block(index / 4);
    for (std::uint64_t k = index % 4; k < 4 && i < out.size(); ++k, ++i, ++index) {
      out[i] = block[k];
    }
  }
}

double UniformSequence::exponential() noexcept {
  return -std::log(uniform());
}

}  // namespace ctgof
