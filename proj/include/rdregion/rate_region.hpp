#pragma once

// Right-hand sides of the rate-region inequalities for a given choice of auxiliary variables.
//
// Inner bound (product-form auxiliaries p(w1|x1) p(w2|x2) p(w3|x3)), with
//   A_i = I(X_i;W_i),  B_i = I(W_i; W_j,W_k,Z,F):
//   R_i              >= A_i - B_i
//   R_i + R_j        >= A_i + A_j - B_i - B_j + I(W_i;W_j|W_k,Z,F)
//   R_1 + R_2 + R_3  >= A_1 + A_2 + A_3 - B_1 - B_2 - B_3 + I(W1;W2|W3,Z,F) + I(W1,W2;W3|Z,F)
// Outer bound: the same region written as conditional informations
//   I(X1,X2,X3; W_S | W_rest, Z, F), admissible for any joint auxiliary law whose per-channel
//   marginals satisfy W_i - X_i - (other sources, Z, F).

#include <optional>
#include <string_view>

#include "rdregion/prob.hpp"
#include "rdregion/source_model.hpp"

namespace rdregion {

inline constexpr double kStructuralTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-10;

// Rates are nonnegative; also maps -0.0 to +0.0 so printed output is stable.
inline double clamp_rate(double v) { return v > 0.0 ? v : 0.0; }

enum class BoundForm { inner, outer, corollary4, corollary5 };
std::string_view to_string(BoundForm form);

struct RateTriple {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;

  double sum() const noexcept { return r1 + r2 + r3; }
  double operator[](std::size_t i) const { return i == 0 ? r1 : i == 1 ? r2 : r3; }
};

struct RateRegionBounds {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  std::optional<double> r12;
  std::optional<double> r13;
  std::optional<double> r23;
  std::optional<double> r123;
  BoundForm form = BoundForm::inner;

  double single(std::size_t i) const { return i == 0 ? r1 : i == 1 ? r2 : r3; }
  bool contains(const RateTriple& rates, double slack = 0.0) const;
};

enum class Objective { min_sum_rate, min_r1, min_r2, min_r3 };
std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

// Vertex of the region minimizing the objective; ties broken by the smaller sum rate, then
// lexicographically.
RateTriple min_rate_point(const RateRegionBounds& bounds, Objective objective);

RateRegionBounds inner_bound(const SourceModel& model, const TestChannelTriple& channels);
// Same expressions evaluated on an already-extended joint (axes X1..F, W1..W3).
RateRegionBounds inner_bound(const JointPMF& extended);

struct OuterBoundReport {
  RateRegionBounds conditional_form;  // I(X1,X2,X3; W_S | W_rest, Z, F)
  RateRegionBounds difference_form;   // inner-bound expressions on the same joint
  bool product_form = false;          // W1, W2, W3 conditionally independent given the sources
  ResidualReport markov;              // per-channel constraints W_i - X_i - rest
  ResidualReport identities;          // |conditional - difference| when product_form holds
};

OuterBoundReport outer_bound(const SourceModel& model, const TestChannelTriple& channels);
OuterBoundReport outer_bound(const SourceModel& model, const JointPMF& joint_aux);

struct Corollary4Result {
  RateRegionBounds bounds;
  ResidualReport cross_terms;  // sum-rate terms that vanish on the network
  ResidualReport side_terms;   // I(W_j,W_k;W_i|Z,F)
};

Corollary4Result corollary4_bounds(const SourceModel& model, const TestChannelTriple& channels);

RateRegionBounds corollary5_bounds(const SourceModel& model, const TestChannelTriple& channels);
RateRegionBounds corollary5_bounds(const SourceModel& model, const JointPMF& joint_aux);

// Product-form channels p(w_i'|x_i) built from a joint auxiliary law by averaging out the
// other sources; preserves every (X_i, W_i, Z, F) marginal on network sources.
TestChannelTriple theorem6_wprime(const SourceModel& model, const JointPMF& joint_aux);

// Residuals of the converse-side identities and their vanishing Markov terms.
ResidualReport verify_converse_identities(const SourceModel& model,
                                          const TestChannelTriple& channels, double tol);

// Validates an 8-axis auxiliary joint against the model and returns it in canonical axis order.
JointPMF canonical_aux_joint(const SourceModel& model, const JointPMF& joint_aux);

// I(W_i; other sources, Z, F | X_i) for i = 1, 2, 3.
ResidualReport per_channel_markov(const JointPMF& joint_aux, double tol);

}  // namespace rdregion
