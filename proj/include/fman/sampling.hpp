#pragma once

#include <cstdint>
#include <vector>

#include "fman/tensor.hpp"

namespace fman {

struct SampleOptions {
  int count = 64;              // quasi-random interior points
  std::uint64_t seed = 0;
  bool include_corners = true; // vertices of the domain box, when there are at most max_corners
  int max_corners = 256;
};

/// Shifted Halton points in the chart's domain box, followed by the box vertices.
/// Deterministic for a given (chart, options).
std::vector<Point> sample_points(const Chart& chart, const SampleOptions& options = {});

}  // namespace fman
