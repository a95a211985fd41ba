#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fman/f_structure.hpp"

namespace fman {

struct GalleryInfo {
  std::string name;       // stable identifier
  std::string signature;  // accepted argument list, e.g. "standard_S(n, s)"
  std::string summary;
};

/// Every built-in manifold, in a fixed order.
const std::vector<GalleryInfo>& gallery_catalog();

/// Looks up "name" or "name(arg, ...)". Throws std::invalid_argument for an
/// unknown name or malformed arguments.
MetricFManifold gallery(std::string_view spec);

/// Splits "name(a, b(c, d))" into {"name", {"a", "b(c, d)"}}.
std::pair<std::string, std::vector<std::string>> split_call(std::string_view spec);

/// Block-diagonal product; the first factor must have s = 0.
MetricFManifold hermitian_product(const MetricFManifold& hermitian, const MetricFManifold& other);

}  // namespace fman
