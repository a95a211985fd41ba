#include <algorithm>

#include "fman/f_structure.hpp"
#include "fman/trans_s.hpp"

namespace fman {

VerificationReport classify(const MetricFManifold& M, const std::vector<Point>& points,
                            const ClassifyOptions& options) {
  const double tol = options.tol;
  ResidualTracker contact("F = d eta_i", tol);
  ResidualTracker normal("normality tensor", tol);
  ResidualTracker closed("dF = 0", tol);
  ResidualTracker eta_closed("d eta_i = 0", tol);

  for (const auto& p : points) {
    try {
      const StructureAt st = evaluate_structure(M, p);
      const Matrix frame = orthonormal_frame(st.metric());
      double c = 0.0, e = 0.0;
      for (const auto& eta : st.eta) {
        const Matrix d = exterior_d(eta);
        c = std::max(c, frame_max_abs(st.F.value - d, frame));
        e = std::max(e, frame_max_abs(d, frame));
      }
      contact.observe(c, p);
      eta_closed.observe(e, p);
      normal.observe(normality_defect(st), p);
      closed.observe(frame_max_abs(exterior_d(st.F), frame), p);
    } catch (const std::exception& ex) {
      for (auto* t : {&contact, &normal, &closed, &eta_closed}) t->fail(p, ex.what());
    }
  }

  TransSOptions topt;
  topt.tol = tol;
  topt.relative_tol = options.almost_trans_s_relative;
  const AlmostTransSVerdict verdict = almost_trans_s(M, points, topt);

  VerificationReport report;
  for (const auto* t : {&contact, &normal, &closed, &eta_closed}) report.add(t->finish());
  report.add(verdict.absolute);
  report.add(verdict.normalized);

  // With s = 0 only the Hermitian notions (normal = integrable, K = Kaehler) carry meaning.
  const bool has_structure_fields = M.s() > 0;
  const bool is_contact = has_structure_fields && report.checks[0].passed;
  const bool is_normal = report.checks[1].passed;
  const bool is_k = is_normal && report.checks[2].passed;
  const bool is_almost = has_structure_fields && verdict.holds;
  if (is_contact) report.labels.emplace_back(labels::metric_f_contact);
  if (is_normal) report.labels.emplace_back(labels::normal);
  if (is_k) report.labels.emplace_back(labels::K);
  if (is_k && is_contact) report.labels.emplace_back(labels::S);
  if (is_k && has_structure_fields && report.checks[3].passed) report.labels.emplace_back(labels::C);
  if (is_almost) report.labels.emplace_back(labels::almost_trans_s);
  if (is_almost && is_normal) report.labels.emplace_back(labels::trans_s);
  return report;
}

}  // namespace fman
