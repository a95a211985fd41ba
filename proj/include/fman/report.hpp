#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fman/tensor.hpp"

namespace fman {

/// One verification entry.
///
/// For Bound::at_most, `value` is the largest residual seen over the sample
/// points and the check passes when value <= tolerance. For Bound::at_least,
/// `value` is the smallest observed quantity and the check passes when
/// value >= tolerance (used for non-degeneracy and for expected failures).
struct CheckResult {
  enum class Bound { at_most, at_least };

  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::at_most;
  bool passed = true;
  bool skipped = false;
  Point witness;  // point attaining `value` (empty if nothing was evaluated)
  std::string note;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> labels;

  bool all_passed() const;
  const CheckResult* find(const std::string& name) const;
  bool has_label(const std::string& label) const;
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void append(const VerificationReport& other);
};

/// Running extremum of a residual over sample points.
class ResidualTracker {
 public:
  ResidualTracker(std::string name, double tolerance, CheckResult::Bound bound = CheckResult::Bound::at_most);

  void observe(double value, const Point& p);
  /// An evaluation failure at p counts as the worst possible value.
  void fail(const Point& p, const std::string& why);
  void note(std::string text) { result_.note = std::move(text); }
  double value() const noexcept { return result_.value; }

  CheckResult finish() const;

 private:
  CheckResult result_;
  bool any_ = false;
};

CheckResult skipped_check(std::string name, double tolerance, std::string why);

}  // namespace fman
