#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qmcabc/random.hpp"

namespace qmcabc {

enum class SequenceKind { MC, QmcSobol, RqmcShift, RqmcOwen };

std::string_view to_string(SequenceKind kind);
/// Accepts "mc", "qmc", "rqmc-shift", "rqmc-owen" (and the upper-case enum spellings).
SequenceKind parse_sequence_kind(std::string_view name);

inline bool is_randomized(SequenceKind kind) { return kind != SequenceKind::QmcSobol; }
inline bool is_low_discrepancy(SequenceKind kind) { return kind != SequenceKind::MC; }

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// An n x d block of points in the unit hypercube together with how it was produced.
struct PointSet {
  RowMatrix points;
  SequenceKind kind = SequenceKind::MC;
  int dim = 0;
  std::optional<std::uint64_t> seed;
  std::uint64_t start_index = 1;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::span<const double> row(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

inline constexpr int kMaxSobolDimension = 52;
inline constexpr double kUnitClampLow = 0x1.0p-32;
inline constexpr double kUnitClampHigh = 1.0 - 0x1.0p-32;

/// Sobol generator with Joe-Kuo (new-joe-kuo-6.21201) direction numbers, 32-bit resolution.
class SobolEngine {
 public:
  explicit SobolEngine(int dim);

  int dim() const { return dim_; }

  /// Writes the 32-bit digit vector of point `index` (gray-code ordering, index 0 is the origin).
  void point_bits(std::uint64_t index, std::span<std::uint32_t> out) const;

 private:
  int dim_;
  std::vector<std::array<std::uint32_t, 32>> directions_;
};

/// Nested uniform (Owen) scrambling of 32 binary digits. Each digit is flipped by a hash of
/// (dimension seed, digit position, original higher digits).
std::uint32_t owen_scramble(std::uint32_t bits, std::uint64_t dimension_seed);

PointSet generate(SequenceKind kind, int dim, std::size_t n, std::optional<std::uint64_t> seed = std::nullopt,
                  std::uint64_t start_index = 1);

}  // namespace qmcabc
