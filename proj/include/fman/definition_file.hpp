#pragma once

// Plain-text manifold definitions.
//
//   ; comments start a line with ';' or '#'
//   [manifold]
//   name = my_manifold              ; optional
//   note.1 = free text              ; optional, carried into reports
//   [chart]
//   n = 1
//   s = 1
//   coordinates = x, y, z
//   domain.x = -1, 1                ; one closed interval per coordinate
//   [metric]
//   x,x = 1 + y^2                   ; g_xy keyed by two coordinate names;
//   x,y = -y                        ; either (i,j) or (j,i) may be given
//   [f]
//   y,x = 1                         ; f^y_x: component y of f(∂x)
//   [xi.1]
//   z = 1
//   [eta.1]
//   z = 1
//   [declared]                      ; optional, asserted by `verify`
//   alpha.1 = 1
//   beta.1 = 0
//
// Entries that are not listed are zero. Values are expressions in the
// coordinates. Inline comments are not supported.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fman/f_structure.hpp"

namespace fman {

/// Malformed or inconsistent definition (an input error, not a failed check).
class DefinitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MetricFManifold parse_definition(const std::string& text, const std::string& origin = "<input>");
MetricFManifold load_definition(const std::filesystem::path& path);

/// A file path, or "gallery:NAME" for a built-in manifold.
MetricFManifold load_manifold(std::string_view source);

/// Deterministic text that parse_definition reads back into the same fields.
std::string format_definition(const MetricFManifold& M);
void save_definition(const MetricFManifold& M, const std::filesystem::path& path);

}  // namespace fman
