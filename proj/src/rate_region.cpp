#include "rdregion/rate_region.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "rdregion/errors.hpp"

namespace rdregion {

std::string_view to_string(BoundForm form) {
  switch (form) {
    case BoundForm::inner: return "inner";
    case BoundForm::outer: return "outer";
    case BoundForm::corollary4: return "corollary4";
    case BoundForm::corollary5: return "corollary5";
  }
  return "?";
}

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::min_sum_rate: return "min_sum_rate";
    case Objective::min_r1: return "min_r1";
    case Objective::min_r2: return "min_r2";
    case Objective::min_r3: return "min_r3";
  }
  return "?";
}

Objective parse_objective(std::string_view text) {
  for (auto o : {Objective::min_sum_rate, Objective::min_r1, Objective::min_r2, Objective::min_r3})
    if (to_string(o) == text) return o;
  throw ConfigError("unknown objective '" + std::string(text) + "'");
}

bool RateRegionBounds::contains(const RateTriple& r, double slack) const {
  const auto ok = [&](double lhs, const std::optional<double>& rhs) {
    return !rhs || lhs + slack >= *rhs;
  };
  return r.r1 + slack >= r1 && r.r2 + slack >= r2 && r.r3 + slack >= r3 && ok(r.r1 + r.r2, r12) &&
         ok(r.r1 + r.r3, r13) && ok(r.r2 + r.r3, r23) && ok(r.sum(), r123);
}

namespace {

struct Halfspace {
  std::array<double, 3> a;
  double b;  // a . R >= b
};

double objective_value(const std::array<double, 3>& r, Objective objective) {
  switch (objective) {
    case Objective::min_sum_rate: return r[0] + r[1] + r[2];
    case Objective::min_r1: return r[0];
    case Objective::min_r2: return r[1];
    case Objective::min_r3: return r[2];
  }
  return 0.0;
}

}  // namespace

RateTriple min_rate_point(const RateRegionBounds& bounds, Objective objective) {
  std::vector<Halfspace> hs = {
      {{1, 0, 0}, 0.0}, {{0, 1, 0}, 0.0}, {{0, 0, 1}, 0.0},
      {{1, 0, 0}, bounds.r1}, {{0, 1, 0}, bounds.r2}, {{0, 0, 1}, bounds.r3},
  };
  if (bounds.r12) hs.push_back({{1, 1, 0}, *bounds.r12});
  if (bounds.r13) hs.push_back({{1, 0, 1}, *bounds.r13});
  if (bounds.r23) hs.push_back({{0, 1, 1}, *bounds.r23});
  if (bounds.r123) hs.push_back({{1, 1, 1}, *bounds.r123});

  // The region is an up-closed polyhedron in the positive orthant, so a nonnegative linear
  // objective attains its minimum at a vertex: enumerate all triples of tight constraints.
  constexpr double kFeasSlack = 1e-12;
  std::array<double, 3> best{};
  double best_obj = std::numeric_limits<double>::infinity();
  double best_sum = best_obj;
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j)
      for (std::size_t k = j + 1; k < hs.size(); ++k) {
        const auto& A = hs[i].a;
        const auto& B = hs[j].a;
        const auto& C = hs[k].a;
        const double det = A[0] * (B[1] * C[2] - B[2] * C[1]) - A[1] * (B[0] * C[2] - B[2] * C[0]) +
                           A[2] * (B[0] * C[1] - B[1] * C[0]);
        if (std::abs(det) < 0.5) continue;  // integer matrices: singular iff det == 0
        std::array<double, 3> r{};
        for (int col = 0; col < 3; ++col) {
          std::array<std::array<double, 3>, 3> m = {A, B, C};
          m[0][col] = hs[i].b;
          m[1][col] = hs[j].b;
          m[2][col] = hs[k].b;
          r[col] = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                    m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                    m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
                   det;
        }
        bool feasible = true;
        for (const auto& h : hs)
          if (h.a[0] * r[0] + h.a[1] * r[1] + h.a[2] * r[2] < h.b - kFeasSlack) {
            feasible = false;
            break;
          }
        if (!feasible) continue;
        for (auto& v : r) v = clamp_rate(v);
        const double obj = objective_value(r, objective);
        const double sum = r[0] + r[1] + r[2];
        if (obj < best_obj - kFeasSlack ||
            (obj <= best_obj + kFeasSlack &&
             (sum < best_sum - kFeasSlack || (sum <= best_sum + kFeasSlack && r < best)))) {
          best = r;
          best_obj = obj;
          best_sum = sum;
        }
      }
  return {best[0], best[1], best[2]};
}

// ---------------------------------------------------------------------------------------------

namespace {

// The inner-bound expressions; identical algebra is reused for the outer bound's
// difference form.
RateRegionBounds difference_expressions(InfoMeasures& info) {
  const double a1 = info("I(X1;W1)");
  const double a2 = info("I(X2;W2)");
  const double a3 = info("I(X3;W3)");
  const double b1 = info("I(W1;W2,W3,Z,F)");
  const double b2 = info("I(W2;W1,W3,Z,F)");
  const double b3 = info("I(W3;W1,W2,Z,F)");
  const double c12 = info("I(W1;W2|W3,Z,F)");
  const double c13 = info("I(W1;W3|W2,Z,F)");
  const double c23 = info("I(W2;W3|W1,Z,F)");
  const double d123 = info("I(W1,W2;W3|Z,F)");
  RateRegionBounds b;
  b.r1 = clamp_rate(a1 - b1);
  b.r2 = clamp_rate(a2 - b2);
  b.r3 = clamp_rate(a3 - b3);
  b.r12 = clamp_rate(a1 + a2 - b1 - b2 + c12);
  b.r13 = clamp_rate(a1 + a3 - b1 - b3 + c13);
  b.r23 = clamp_rate(a2 + a3 - b2 - b3 + c23);
  b.r123 = clamp_rate(a1 + a2 + a3 - b1 - b2 - b3 + c12 + d123);
  b.form = BoundForm::inner;
  return b;
}

RateRegionBounds conditional_expressions(InfoMeasures& info) {
  RateRegionBounds b;
  b.r1 = info("I(X1,X2,X3;W1|W2,W3,Z,F)");
  b.r2 = info("I(X1,X2,X3;W2|W1,W3,Z,F)");
  b.r3 = info("I(X1,X2,X3;W3|W1,W2,Z,F)");
  b.r12 = info("I(X1,X2,X3;W1,W2|W3,Z,F)");
  b.r13 = info("I(X1,X2,X3;W1,W3|W2,Z,F)");
  b.r23 = info("I(X1,X2,X3;W2,W3|W1,Z,F)");
  b.r123 = info("I(X1,X2,X3;W1,W2,W3|Z,F)");
  b.form = BoundForm::outer;
  return b;
}

void require_markov(const ResidualReport& markov) {
  if (!markov.ok()) {
    const auto& v = markov.violations.front();
    throw ConstraintError("per-channel Markov constraint " + v.name + " = 0 violated", v.residual);
  }
}

RateRegionBounds side_bounds(InfoMeasures& info, BoundForm form) {
  RateRegionBounds b;
  b.r1 = clamp_rate(info("I(X1;W1)") - info("I(W1;Z,F)"));
  b.r2 = clamp_rate(info("I(X2;W2)") - info("I(W2;Z,F)"));
  b.r3 = clamp_rate(info("I(X3;W3)") - info("I(W3;Z,F)"));
  b.form = form;
  return b;
}

}  // namespace

RateRegionBounds inner_bound(const JointPMF& extended) {
  InfoMeasures info(extended);
  return difference_expressions(info);
}

RateRegionBounds inner_bound(const SourceModel& model, const TestChannelTriple& channels) {
  return inner_bound(extend_with_test_channels(model, channels));
}

JointPMF canonical_aux_joint(const SourceModel& model, const JointPMF& joint_aux) {
  const auto labels = joint_aux.labels();
  const std::set<std::string> have(labels.begin(), labels.end());
  const std::set<std::string> want(var::kExtendedOrder.begin(), var::kExtendedOrder.end());
  if (labels.size() != 8 || have != want)
    throw ModelError("auxiliary joint needs exactly the variables X1, X2, X3, Z, F, W1, W2, W3");
  JointPMF canon = joint_aux.reorder(var::kExtendedOrder);
  const auto source = marginal_table(canon, var::kSourceOrder);
  if (source.size() != model.joint().size())
    throw ModelError("auxiliary joint alphabets do not match the source model");
  double worst = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i)
    worst = std::max(worst, std::abs(source[i] - model.joint().probs()[i]));
  if (worst > kIdentityTolerance)
    throw ConstraintError("auxiliary joint does not reproduce the source distribution", worst);
  return canon;
}

ResidualReport per_channel_markov(const JointPMF& joint_aux, double tol) {
  InfoMeasures info(joint_aux);
  ResidualReport r;
  for (const char* term : {"I(W1;X2,X3,Z,F|X1)", "I(W2;X1,X3,Z,F|X2)", "I(W3;X1,X2,Z,F|X3)"})
    r.add(term, info(term), tol);
  return r;
}

OuterBoundReport outer_bound(const SourceModel& model, const JointPMF& joint_aux) {
  const JointPMF joint = canonical_aux_joint(model, joint_aux);
  OuterBoundReport report;
  report.markov = per_channel_markov(joint, kIdentityTolerance);
  require_markov(report.markov);

  InfoMeasures info(joint);
  report.conditional_form = conditional_expressions(info);
  report.difference_form = difference_expressions(info);
  report.product_form = info("I(W1;W2,W3|X1,X2,X3,Z,F)") <= kIdentityTolerance &&
                        info("I(W2;W3|X1,X2,X3,Z,F)") <= kIdentityTolerance;
  if (report.product_form) {
    const auto& c = report.conditional_form;
    const auto& d = report.difference_form;
    report.identities.add("R1", std::abs(c.r1 - d.r1), kIdentityTolerance);
    report.identities.add("R2", std::abs(c.r2 - d.r2), kIdentityTolerance);
    report.identities.add("R3", std::abs(c.r3 - d.r3), kIdentityTolerance);
    report.identities.add("R1+R2", std::abs(*c.r12 - *d.r12), kIdentityTolerance);
    report.identities.add("R1+R3", std::abs(*c.r13 - *d.r13), kIdentityTolerance);
    report.identities.add("R2+R3", std::abs(*c.r23 - *d.r23), kIdentityTolerance);
    report.identities.add("R1+R2+R3", std::abs(*c.r123 - *d.r123), kIdentityTolerance);
  }
  return report;
}

OuterBoundReport outer_bound(const SourceModel& model, const TestChannelTriple& channels) {
  return outer_bound(model, extend_with_test_channels(model, channels));
}

Corollary4Result corollary4_bounds(const SourceModel& model, const TestChannelTriple& channels) {
  const auto bn = check_bn_structure(model, kStructuralTolerance);
  if (!bn.ok())
    throw ConstraintError("source is not the required Bayesian network: " +
                              bn.violations.front().name + " != 0",
                          bn.violations.front().residual);
  const JointPMF extended = extend_with_test_channels(model, channels);
  InfoMeasures info(extended);

  Corollary4Result out;
  out.bounds = side_bounds(info, BoundForm::corollary4);
  for (const char* term : {"I(W1;W2|W3,Z,F)", "I(W1;W3|W2,Z,F)", "I(W2;W3|W1,Z,F)", "I(W1,W2;W3|Z,F)"})
    out.cross_terms.add(term, info(term), kStructuralTolerance);
  for (const char* term : {"I(W2,W3;W1|Z,F)", "I(W1,W3;W2|Z,F)", "I(W1,W2;W3|Z,F)"})
    out.side_terms.add(term, info(term), kStructuralTolerance);
  if (!out.cross_terms.ok())
    throw ConstraintError("sum-rate cross term " + out.cross_terms.violations.front().name +
                              " does not vanish",
                          out.cross_terms.violations.front().residual);

  auto& b = out.bounds;
  b.r12 = b.r1 + b.r2;
  b.r13 = b.r1 + b.r3;
  b.r23 = b.r2 + b.r3;
  b.r123 = b.r1 + b.r2 + b.r3;
  return out;
}

RateRegionBounds corollary5_bounds(const SourceModel& model, const JointPMF& joint_aux) {
  const JointPMF joint = canonical_aux_joint(model, joint_aux);
  require_markov(per_channel_markov(joint, kIdentityTolerance));
  InfoMeasures info(joint);
  return side_bounds(info, BoundForm::corollary5);
}

RateRegionBounds corollary5_bounds(const SourceModel& model, const TestChannelTriple& channels) {
  return corollary5_bounds(model, extend_with_test_channels(model, channels));
}

TestChannelTriple theorem6_wprime(const SourceModel& model, const JointPMF& joint_aux) {
  const JointPMF joint = canonical_aux_joint(model, joint_aux);
  require_markov(per_channel_markov(joint, kIdentityTolerance));

  // q(s1,s2,s3,w1,w2,w3) and p(s1,s2,s3).
  const VarList xw = {var::X1, var::X2, var::X3, var::W1, var::W2, var::W3};
  const auto q = marginal_table(joint, xw);
  const auto px = marginal_table(joint, var::kSources);
  std::array<std::size_t, 3> nx{}, nw{};
  for (std::size_t i = 0; i < 3; ++i) {
    nx[i] = joint.axes()[i].size();
    nw[i] = joint.axes()[5 + i].size();
  }
  const std::size_t w_block = nw[0] * nw[1] * nw[2];

  std::array<std::vector<double>, 3> rows;
  for (std::size_t i = 0; i < 3; ++i) rows[i].assign(nx[i] * nw[i], 0.0);
  std::array<std::vector<double>, 3> p_single;  // p(s_i)
  for (std::size_t i = 0; i < 3; ++i) p_single[i].assign(nx[i], 0.0);
  for (std::size_t s1 = 0; s1 < nx[0]; ++s1)
    for (std::size_t s2 = 0; s2 < nx[1]; ++s2)
      for (std::size_t s3 = 0; s3 < nx[2]; ++s3) {
        const double p = px[(s1 * nx[1] + s2) * nx[2] + s3];
        p_single[0][s1] += p;
        p_single[1][s2] += p;
        p_single[2][s3] += p;
      }

  // p_{W_i'|X_i}(w|s_i) = sum over the other (w, s) of p(w1,w2,w3|s1,s2,s3) p(s_others|s_i).
  for (std::size_t s1 = 0; s1 < nx[0]; ++s1)
    for (std::size_t s2 = 0; s2 < nx[1]; ++s2)
      for (std::size_t s3 = 0; s3 < nx[2]; ++s3) {
        const std::size_t xs = (s1 * nx[1] + s2) * nx[2] + s3;
        const double p = px[xs];
        if (p <= 0.0) continue;
        const std::array<std::size_t, 3> s = {s1, s2, s3};
        std::array<double, 3> p_others{};
        for (std::size_t i = 0; i < 3; ++i) p_others[i] = p / p_single[i][s[i]];
        for (std::size_t w1 = 0; w1 < nw[0]; ++w1)
          for (std::size_t w2 = 0; w2 < nw[1]; ++w2)
            for (std::size_t w3 = 0; w3 < nw[2]; ++w3) {
              const double cond = q[xs * w_block + (w1 * nw[1] + w2) * nw[2] + w3] / p;
              const std::array<std::size_t, 3> w = {w1, w2, w3};
              for (std::size_t i = 0; i < 3; ++i) rows[i][s[i] * nw[i] + w[i]] += cond * p_others[i];
            }
      }

  std::vector<ConditionalPMF> out;
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<bool> defined(nx[i], true);
    for (std::size_t s = 0; s < nx[i]; ++s) {
      auto row = std::span<double>(rows[i]).subspan(s * nw[i], nw[i]);
      const double total = stable_sum(row);
      if (p_single[i][s] <= 0.0 || total <= 0.0) {
        // Unreachable source symbol: any row works; use a point mass on the first symbol.
        std::fill(row.begin(), row.end(), 0.0);
        row[0] = 1.0;
        defined[s] = false;
      } else {
        for (auto& v : row) v /= total;
      }
    }
    out.emplace_back(std::vector<Alphabet>{joint.axes()[i]}, joint.axes()[5 + i], std::move(rows[i]),
                     std::move(defined));
  }
  TestChannelTriple result{out[0], out[1], out[2]};

  // Marginal preservation on (X_i, W_i, Z, F) is the defining property; check it.
  const JointPMF rebuilt = extend_with_test_channels(model, result);
  for (std::size_t i = 0; i < 3; ++i) {
    const VarList keep = {var::kSources[i], var::kAuxiliaries[i], var::Z, var::F};
    const auto a = marginal_table(joint, keep);
    const auto b = marginal_table(rebuilt, keep);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    if (worst > kIdentityTolerance)
      throw ConstraintError("W" + std::to_string(i + 1) +
                                "' does not preserve the (X_i,W_i,Z,F) marginal",
                            worst);
  }
  return result;
}

ResidualReport verify_converse_identities(const SourceModel& model,
                                          const TestChannelTriple& channels, double tol) {
  const JointPMF extended = extend_with_test_channels(model, channels);
  const bool bn = check_bn_structure(model, kStructuralTolerance).ok();
  InfoMeasures I(extended);
  ResidualReport r;
  const auto equal = [&](const std::string& name, double lhs, double rhs) {
    r.add(name, std::abs(lhs - rhs), tol);
  };
  const auto zero = [&](const std::string& term) { r.add(term + " = 0", I(term), tol); };

  const std::array<std::string, 3> X = {"X1", "X2", "X3"};
  const std::array<std::string, 3> W = {"W1", "W2", "W3"};

  // Single-rate identities.
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
    const std::string rest = W[std::min(j, k)] + "," + W[std::max(j, k)] + ",Z,F";
    const std::string lhs = "I(X1,X2,X3;" + W[i] + "|" + rest + ")";
    equal(lhs + " = I(" + W[i] + ";" + X[i] + ") - I(" + W[i] + ";" + rest + ")", I(lhs),
          I("I(" + W[i] + ";" + X[i] + ")") - I("I(" + W[i] + ";" + rest + ")"));
    equal(lhs + " = I(" + X[i] + ";" + W[i] + "|" + rest + ")", I(lhs),
          I("I(" + X[i] + ";" + W[i] + "|" + rest + ")"));
    zero("I(" + X[std::min(j, k)] + "," + X[std::max(j, k)] + ";" + W[i] + "|" + X[i] + "," + rest +
         ")");
    zero("I(" + W[i] + ";" + rest + "|" + X[i] + ")");
  }

  // Pairwise-sum identities.
  for (const auto& [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 2}}) {
    const std::size_t k = 3 - i - j;
    const std::string others_i = "I(" + W[i] + ";" + W[std::min(j, k)] + "," + W[std::max(j, k)] + ",Z,F)";
    const std::string others_j = "I(" + W[j] + ";" + W[std::min(i, k)] + "," + W[std::max(i, k)] + ",Z,F)";
    const std::string cross = "I(" + W[i] + ";" + W[j] + "|" + W[k] + ",Z,F)";
    const std::string lhs = "I(X1,X2,X3;" + W[i] + "," + W[j] + "|" + W[k] + ",Z,F)";
    equal(lhs + " = I(" + X[i] + ";" + W[i] + ") + I(" + X[j] + ";" + W[j] + ") - " + others_i +
              " - " + others_j + " + " + cross,
          I(lhs),
          I("I(" + X[i] + ";" + W[i] + ")") + I("I(" + X[j] + ";" + W[j] + ")") - I(others_i) -
              I(others_j) + I(cross));
    const std::string split = "I(" + X[i] + ";" + W[j] + "|" + W[i] + "," + W[k] + ",Z,F)";
    equal(split + " = I(" + X[i] + ";" + W[j] + "|" + W[k] + ",Z,F) - " + cross, I(split),
          I("I(" + X[i] + ";" + W[j] + "|" + W[k] + ",Z,F)") - I(cross));
    zero("I(" + X[j] + "," + X[k] + ";" + W[i] + "|" + W[k] + ",Z,F," + X[i] + ")");
    zero("I(" + X[i] + ";" + W[j] + "|" + W[i] + "," + W[k] + ",Z,F," + X[j] + "," + X[k] + ")");
    zero("I(" + X[i] + "," + X[k] + ";" + W[j] + "|" + W[i] + "," + W[k] + ",Z,F," + X[j] + ")");
    zero("I(" + W[i] + ";" + W[j] + "|" + X[i] + "," + W[k] + ",Z,F)");
  }

  // Triple-sum identity and its chain-rule decomposition.
  const std::string total = "I(X1,X2,X3;W1,W2,W3|Z,F)";
  equal(total +
            " = sum I(Xi;Wi) - sum I(Wi;others,Z,F) + I(W1;W2|W3,Z,F) + I(W1,W2;W3|Z,F)",
        I(total),
        I("I(X1;W1)") + I("I(X2;W2)") + I("I(X3;W3)") - I("I(W1;W2,W3,Z,F)") -
            I("I(W2;W1,W3,Z,F)") - I("I(W3;W1,W2,Z,F)") + I("I(W1;W2|W3,Z,F)") +
            I("I(W1,W2;W3|Z,F)"));
  equal(total + " = I(X1;W1,W2,W3|Z,F) + I(X2;W1,W2,W3|Z,F,X1) + I(X3;W1,W2,W3|Z,F,X1,X2)",
        I(total),
        I("I(X1;W1,W2,W3|Z,F)") + I("I(X2;W1,W2,W3|Z,F,X1)") + I("I(X3;W1,W2,W3|Z,F,X1,X2)"));
  zero("I(X2;W1|Z,F,X1)");
  zero("I(W1;W2|Z,F,W3,X1)");
  zero("I(X3;W1,W2|Z,F,X1,X2)");
  zero("I(X1,X2;W3|Z,F,W1,W2,X3)");
  zero("I(W1,W2;W3|Z,F,X1,X2)");
  if (bn) {
    // These two need X2 and X3 conditionally independent given (Z, F, X1).
    r.add("I(X2;W3|Z,F,X1,W1) = 0 [bn]", I("I(X2;W3|Z,F,X1,W1)"), tol);
    r.add("I(X2;W3|Z,F,X1) = 0 [bn]", I("I(X2;W3|Z,F,X1)"), tol);
  }
  return r;
}

}  // namespace rdregion
