#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nbwalk {

/// Seeded pseudo-random stream. The variate transforms are written out here
/// rather than taken from <random> distributions so that a seed yields the
/// same trajectory with every standard library.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n);

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Independent seed for replication `index` of stream `stream`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

/// Walker's alias table for O(1) sampling from a fixed discrete law.
class AliasTable {
public:
  explicit AliasTable(std::span<const double> weights);

  std::size_t sample(RandomSource& rng) const;
  std::size_t size() const noexcept { return prob_.size(); }

private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace nbwalk
