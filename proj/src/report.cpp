#include "fman/report.hpp"

#include <algorithm>
#include <cmath>

namespace fman {

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool VerificationReport::has_label(const std::string& label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

void VerificationReport::append(const VerificationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  for (const auto& l : other.labels) {
    if (!has_label(l)) labels.push_back(l);
  }
}

ResidualTracker::ResidualTracker(std::string name, double tolerance, CheckResult::Bound bound) {
  result_.name = std::move(name);
  result_.tolerance = tolerance;
  result_.bound = bound;
}

void ResidualTracker::observe(double value, const Point& p) {
  const bool upper = result_.bound == CheckResult::Bound::at_most;
  if (std::isnan(value)) value = upper ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  const bool worse = upper ? value > result_.value : value < result_.value;
  if (!any_ || worse) {
    result_.value = value;
    result_.witness = p;
  }
  any_ = true;
}

void ResidualTracker::fail(const Point& p, const std::string& why) {
  observe(std::numeric_limits<double>::quiet_NaN(), p);
  if (result_.note.empty()) result_.note = why;
}

CheckResult ResidualTracker::finish() const {
  CheckResult r = result_;
  r.passed = r.bound == CheckResult::Bound::at_most ? r.value <= r.tolerance : r.value >= r.tolerance;
  return r;
}

CheckResult skipped_check(std::string name, double tolerance, std::string why) {
  CheckResult r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  r.skipped = true;
  r.passed = true;
  r.note = std::move(why);
  return r;
}

}  // namespace fman
