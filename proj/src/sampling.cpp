#include "fman/sampling.hpp"

#include <cmath>
#include <random>

namespace fman {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

// std::uniform_real_distribution is not specified bit-exactly; this is.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<Point> sample_points(const Chart& chart, const SampleOptions& options) {
  const int m = chart.dim();
  if (m > static_cast<int>(std::size(kPrimes))) throw GeometryError("chart dimension too large for sampling");
  std::mt19937_64 rng(options.seed);
  std::vector<double> shift(static_cast<std::size_t>(m));
  for (auto& s : shift) s = unit_double(rng);

  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(options.count));
  for (int i = 0; i < options.count; ++i) {
    Point p(m);
    for (int d = 0; d < m; ++d) {
      double u = radical_inverse(static_cast<std::uint64_t>(i + 1), kPrimes[d]) + shift[static_cast<std::size_t>(d)];
      u -= std::floor(u);
      const auto& iv = chart.domain()[static_cast<std::size_t>(d)];
      p(d) = iv.lo + u * (iv.hi - iv.lo);
    }
    points.push_back(std::move(p));
  }

  if (options.include_corners && m < 31 && (1L << m) <= options.max_corners) {
    for (long mask = 0; mask < (1L << m); ++mask) {
      Point p(m);
      for (int d = 0; d < m; ++d) {
        const auto& iv = chart.domain()[static_cast<std::size_t>(d)];
        p(d) = (mask >> d) & 1 ? iv.hi : iv.lo;
      }
      points.push_back(std::move(p));
    }
  }
  return points;
}

}  // namespace fman
