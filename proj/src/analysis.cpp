#include "toposym/analysis.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace toposym {

Rational exact_probability(const Model& model, const RandomnessConfiguration& alpha,
                           const OutputComplex& task, int t, int cap) {
  uint64_t solving = 0;
  for_each_consistent(alpha, t, [&](const Realization& rho) {
    if (solves_realization(model, rho, task)) ++solving;
  }, cap);
  return dyadic(solving, static_cast<unsigned>(t) * static_cast<unsigned>(alpha.k()));
}

EventualVerdict decide_blackboard(const RandomnessConfiguration& alpha) {
  auto counts = alpha.source_counts();
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 1)
      return {true, "n_" + std::to_string(i + 1) + "=1"};
  }
  return {false, "min n_i=" + std::to_string(alpha.min_count()) + ">1"};
}

EventualVerdict decide_message_passing_worst_case(const RandomnessConfiguration& alpha) {
  int g = alpha.gcd_counts();
  if (g == 1) return {true, "gcd=1"};
  return {false, "gcd=" + std::to_string(g)};
}

BlackboardBounds blackboard_lower_bound(int k, int t) {
  if (k < 1 || t < 0) throw InvalidConfig("lower bound: need k >= 1, t >= 0");
  BigInt half_num = pow2(static_cast<unsigned>(t)) - 1;
  Rational per_source(half_num, pow2(static_cast<unsigned>(t)));
  Rational sharp = 1;
  for (int i = 1; i < k; ++i) sharp *= per_source;
  Rational crude = Rational(1) - Rational(k - 1, pow2(static_cast<unsigned>(t)));
  return {sharp, crude};
}

SuccessionReport succession_check(const Model& model, const RandomnessConfiguration& alpha,
                                  const OutputComplex& task, int t, int cap) {
  SuccessionReport report;
  for (int s = 0; s < t; ++s) {
    for_each_consistent(alpha, s, [&](const Realization& rho) {
      if (!solves_realization(model, rho, task)) return;
      ++report.solving_checked;
      for (const Realization& ext : one_round_extensions(alpha, rho)) {
        ++report.extensions_checked;
        if (!solves_realization(model, ext, task))
          report.violations.push_back({rho, ext});
      }
    }, cap);
  }
  return report;
}

DivisibilityReport divisibility_audit(const RandomnessConfiguration& alpha, int t, int cap) {
  AdversarialPorts adv = adversarial_ports(alpha);
  // the port table lives on renamed parties; realizations must follow
  std::vector<int> renamed_source(alpha.n());
  for (int i = 0; i < alpha.n(); ++i) renamed_source[i] = alpha.source_of(adv.party_order[i]);
  auto renamed_alpha = RandomnessConfiguration::from_source_of(renamed_source);
  Model model = Model::message_passing(adv.ports);

  DivisibilityReport report;
  report.g = adv.g;
  for_each_consistent(renamed_alpha, t, [&](const Realization& rho) {
    for (const ConsistencyPartition& part : refine_history(model, rho)) {
      for (const auto& cls : part.classes) {
        int size = static_cast<int>(cls.size());
        ++report.size_histogram[part.t][size];
        if (size % report.g != 0) ++report.violations;
      }
    }
  }, cap);
  return report;
}

SolvabilityCurve solvability_curve(const Model& model, const RandomnessConfiguration& alpha,
                                   const OutputComplex& task, const std::string& task_label,
                                   int t_from, int t_to, int cap) {
  SolvabilityCurve curve;
  curve.model = model.kind == ModelKind::Blackboard ? "blackboard" : "mp";
  curve.source_counts = alpha.source_counts();
  curve.task = task_label;
  for (int t = t_from; t <= t_to; ++t) {
    uint64_t solving = 0, total = 0;
    for_each_consistent(alpha, t, [&](const Realization& rho) {
      ++total;
      if (solves_realization(model, rho, task)) ++solving;
    }, cap);
    CurveRow row;
    row.t = t;
    row.probability = dyadic(solving, static_cast<unsigned>(t) * static_cast<unsigned>(alpha.k()));
    row.solving = solving;
    row.total = total;
    curve.rows.push_back(std::move(row));
  }
  return curve;
}

std::string SolvabilityCurve::to_csv() const {
  std::ostringstream os;
  os << "t,numerator,denominator,solving_count,total_count\n";
  for (const CurveRow& r : rows) {
    os << r.t << ',' << numerator(r.probability) << ',' << denominator(r.probability) << ','
       << r.solving << ',' << r.total << '\n';
  }
  return os.str();
}

nlohmann::json SolvabilityCurve::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const CurveRow& r : rows) {
    rows_json.push_back({{"t", r.t},
                         {"numerator", numerator(r.probability).str()},
                         {"denominator", denominator(r.probability).str()},
                         {"solving_count", r.solving},
                         {"total_count", r.total}});
  }
  return {{"model", model},
          {"source_counts", source_counts},
          {"task", task},
          {"rows", std::move(rows_json)}};
}

}  // namespace toposym
