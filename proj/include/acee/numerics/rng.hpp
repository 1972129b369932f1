#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace acee::numerics {

// Seedable, streamable PRNG (xoshiro256++). We avoid std distributions so
// that draw sequences are identical across standard libraries. Distinct
// stream ids give independent-behaving sequences for the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    for (auto& s : state_) s = splitmix64(x);
    // guard against the all-zero state
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Fresh generator on an unrelated stream; derived state does not depend on
  // how much this generator has been consumed.
  Rng substream(std::uint64_t id) const {
    std::uint64_t mixed = stream_;
    mixed = mixed * 0x2545f4914f6cdd1dULL + id + 1;
    return Rng(seed_, mixed);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; the spare value is cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  double normal(double mean, double sd) {
    if (sd < 0.0) throw std::invalid_argument("Rng::normal: negative sd");
    return mean + sd * normal();
  }

  Eigen::VectorXd normal_vector(Eigen::Index n, double mean = 0.0, double sd = 1.0) {
    if (sd < 0.0) throw std::invalid_argument("Rng::normal_vector: negative sd");
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = mean + sd * normal();
    return out;
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, double mean = 0.0,
                                double sd = 1.0) {
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = mean + sd * normal();
    return out;
  }

  // uniform integer on [0, n)
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling over the top 53 bits keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// i.i.d. normal draws, reproducible per (seed, stream)
inline Eigen::VectorXd sample_normal(Rng& rng, double mean, double sd, Eigen::Index n) {
  return rng.normal_vector(n, mean, sd);
}

// Stable 64-bit content hash (FNV-1a over little-endian doubles). Used to key
// per-unit sampling streams to unit identity rather than row position.
inline std::uint64_t hash_bytes(const double* data, std::size_t n,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace acee::numerics
