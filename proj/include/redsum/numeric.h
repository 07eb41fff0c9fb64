#ifndef REDSUM_NUMERIC_H_
#define REDSUM_NUMERIC_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace redsum {

/// Max-shifted softmax. Empty input gives empty output.
std::vector<double> softmax(std::span<const double> x);

/// (v - min) / (max - min); an all-equal input maps to all zeros.
std::vector<double> minmax_normalize(std::span<const double> values);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> x);

/// Seeded generator with portable uniform draws. std::*_distribution output
/// differs between standard libraries, so draws are built from raw bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  /// k distinct values from [0, n), in draw order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace redsum

#endif  // REDSUM_NUMERIC_H_
