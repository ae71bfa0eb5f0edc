#include "qmcabc/lds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace qmcabc {

namespace {

struct DirectionEntry {
  int degree;
  std::uint32_t coefficients;
  std::array<std::uint32_t, 8> initial;
};

// Joe & Kuo, new-joe-kuo-6.21201, dimensions 2..52: degree s, interior polynomial coefficients a,
// initial direction numbers m_1..m_s.
constexpr std::array<DirectionEntry, kMaxSobolDimension - 1> kJoeKuo = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
    {7, 7, {1, 1, 3, 13, 7, 35, 63}},
    {7, 8, {1, 3, 5, 9, 1, 25, 53}},
    {7, 14, {1, 3, 1, 13, 9, 35, 107}},
    {7, 19, {1, 3, 1, 5, 27, 61, 31}},
    {7, 21, {1, 1, 5, 11, 19, 41, 61}},
    {7, 28, {1, 3, 5, 3, 3, 13, 69}},
    {7, 31, {1, 1, 7, 13, 1, 19, 1}},
    {7, 32, {1, 3, 7, 5, 13, 19, 59}},
    {7, 37, {1, 1, 3, 9, 25, 29, 41}},
    {7, 41, {1, 3, 5, 13, 23, 1, 55}},
    {7, 42, {1, 3, 7, 3, 13, 59, 17}},
    {7, 50, {1, 3, 1, 3, 5, 53, 69}},
    {7, 55, {1, 1, 5, 5, 23, 33, 13}},
    {7, 56, {1, 1, 7, 7, 1, 61, 123}},
    {7, 59, {1, 1, 7, 9, 13, 61, 49}},
    {7, 62, {1, 3, 3, 5, 3, 55, 33}},
    {8, 14, {1, 3, 1, 15, 31, 13, 49, 245}},
    {8, 21, {1, 3, 5, 15, 31, 59, 63, 97}},
    {8, 22, {1, 3, 1, 11, 11, 11, 77, 249}},
    {8, 38, {1, 3, 1, 11, 27, 43, 71, 9}},
    {8, 47, {1, 1, 7, 15, 21, 11, 81, 45}},
    {8, 49, {1, 3, 7, 3, 25, 31, 65, 79}},
    {8, 50, {1, 3, 1, 1, 19, 11, 3, 205}},
    {8, 52, {1, 1, 5, 9, 19, 21, 29, 157}},
    {8, 56, {1, 3, 7, 11, 1, 33, 89, 185}},
    {8, 67, {1, 3, 3, 3, 15, 9, 79, 71}},
    {8, 70, {1, 3, 7, 11, 15, 39, 119, 27}},
    {8, 84, {1, 1, 3, 1, 11, 31, 97, 225}},
    {8, 97, {1, 1, 1, 3, 23, 43, 57, 177}},
    {8, 103, {1, 3, 7, 7, 17, 17, 37, 71}},
    {8, 115, {1, 3, 1, 5, 27, 63, 123, 213}}
}};

constexpr std::uint64_t kOwenTag = 0x4f57454eULL;
constexpr std::uint64_t kShiftTag = 0x53484654ULL;

double clamp_unit(double u) { return std::clamp(u, kUnitClampLow, kUnitClampHigh); }

}  // namespace

std::string_view to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::MC: return "mc";
    case SequenceKind::QmcSobol: return "qmc";
    case SequenceKind::RqmcShift: return "rqmc-shift";
    case SequenceKind::RqmcOwen: return "rqmc-owen";
  }
  return "unknown";
}

SequenceKind parse_sequence_kind(std::string_view name) {
  if (name == "mc" || name == "MC") return SequenceKind::MC;
  if (name == "qmc" || name == "QMC_SOBOL" || name == "sobol") return SequenceKind::QmcSobol;
  if (name == "rqmc-shift" || name == "RQMC_SHIFT") return SequenceKind::RqmcShift;
  if (name == "rqmc-owen" || name == "rqmc" || name == "RQMC_OWEN") return SequenceKind::RqmcOwen;
  throw std::invalid_argument("unknown sequence kind '" + std::string(name) + "'");
}

SobolEngine::SobolEngine(int dim) : dim_(dim), directions_(static_cast<std::size_t>(dim)) {
  if (dim < 1 || dim > kMaxSobolDimension) {
    throw std::out_of_range("Sobol dimension " + std::to_string(dim) + " outside [1, " +
                            std::to_string(kMaxSobolDimension) + "]");
  }
  for (int k = 0; k < 32; ++k) directions_[0][k] = 1u << (31 - k);
  for (int j = 1; j < dim; ++j) {
    const DirectionEntry& e = kJoeKuo[j - 1];
    auto& v = directions_[j];
    const int s = e.degree;
    for (int k = 0; k < s && k < 32; ++k) v[k] = e.initial[k] << (31 - k);
    for (int k = s; k < 32; ++k) {
      std::uint32_t x = v[k - s] ^ (v[k - s] >> s);
      for (int i = 1; i < s; ++i) {
        if ((e.coefficients >> (s - 1 - i)) & 1u) x ^= v[k - i];
      }
      v[k] = x;
    }
  }
}

void SobolEngine::point_bits(std::uint64_t index, std::span<std::uint32_t> out) const {
  if (index >= (std::uint64_t{1} << 32)) throw std::out_of_range("Sobol index exceeds 2^32 - 1");
  const std::uint64_t gray = index ^ (index >> 1);
  for (int j = 0; j < dim_; ++j) {
    std::uint32_t x = 0;
    std::uint64_t g = gray;
    for (int k = 0; g != 0; ++k, g >>= 1) {
      if (g & 1u) x ^= directions_[j][k];
    }
    out[j] = x;
  }
}

std::uint32_t owen_scramble(std::uint32_t bits, std::uint64_t dimension_seed) {
  std::uint32_t flips = 0;
  for (int k = 0; k < 32; ++k) {
    const std::uint64_t prefix = k == 0 ? 0 : (bits >> (32 - k));
    const std::uint64_t node = (static_cast<std::uint64_t>(k) << 32) | prefix;
    if (mix64(dimension_seed ^ mix64(node)) & 1u) flips |= 1u << (31 - k);
  }
  return bits ^ flips;
}

PointSet generate(SequenceKind kind, int dim, std::size_t n, std::optional<std::uint64_t> seed,
                  std::uint64_t start_index) {
  if (dim < 1 || dim > kMaxSobolDimension) {
    throw std::out_of_range("dimension " + std::to_string(dim) + " outside [1, " +
                            std::to_string(kMaxSobolDimension) + "]");
  }
  if (n < 1) throw std::invalid_argument("point count must be at least 1");
  if (is_randomized(kind) && !seed) {
    throw std::invalid_argument(std::string("sequence kind '") + std::string(to_string(kind)) +
                                "' requires a seed");
  }

  PointSet ps;
  ps.kind = kind;
  ps.dim = dim;
  ps.seed = kind == SequenceKind::QmcSobol ? std::nullopt : seed;
  ps.start_index = start_index;
  ps.points.resize(static_cast<Eigen::Index>(n), dim);

  if (kind == SequenceKind::MC) {
    for (std::size_t i = 0; i < n; ++i) {
      UniformStream stream(*seed, start_index + i);
      for (int j = 0; j < dim; ++j) ps.points(static_cast<Eigen::Index>(i), j) = stream.uniform_open();
    }
    return ps;
  }

  SobolEngine engine(dim);
  std::vector<std::uint32_t> bits(static_cast<std::size_t>(dim));
  std::vector<std::uint64_t> owen_seeds;
  std::vector<double> shifts;
  if (kind == SequenceKind::RqmcOwen) {
    for (int j = 0; j < dim; ++j) owen_seeds.push_back(derive_seed(*seed, kOwenTag, static_cast<std::uint64_t>(j)));
  } else if (kind == SequenceKind::RqmcShift) {
    UniformStream stream(derive_seed(*seed, kShiftTag), 0);
    for (int j = 0; j < dim; ++j) shifts.push_back(stream.uniform());
  }

  for (std::size_t i = 0; i < n; ++i) {
    engine.point_bits(start_index + i, bits);
    for (int j = 0; j < dim; ++j) {
      double u = 0.0;
      switch (kind) {
        case SequenceKind::QmcSobol:
          u = clamp_unit(static_cast<double>(bits[j]) * 0x1.0p-32);
          break;
        case SequenceKind::RqmcShift: {
          u = static_cast<double>(bits[j]) * 0x1.0p-32 + shifts[j];
          if (u >= 1.0) u -= 1.0;
          u = clamp_unit(u);
          break;
        }
        case SequenceKind::RqmcOwen:
          u = clamp_unit(static_cast<double>(owen_scramble(bits[j], owen_seeds[j])) * 0x1.0p-32);
          break;
        case SequenceKind::MC:
          break;
      }
      ps.points(static_cast<Eigen::Index>(i), j) = u;
    }
  }
  return ps;
}

}  // namespace qmcabc
