#pragma once

// The five-variable source p(x1,x2,x3,z,f): X1, X2, X3 are encoded separately, (Z, F) is
// side information at the decoder.

#include <optional>
#include <string>
#include <vector>

#include "rdregion/prob.hpp"

namespace rdregion {

namespace var {
inline const std::string X1 = "X1";
inline const std::string X2 = "X2";
inline const std::string X3 = "X3";
inline const std::string Z = "Z";
inline const std::string F = "F";
inline const std::string W1 = "W1";
inline const std::string W2 = "W2";
inline const std::string W3 = "W3";

inline const VarList kSources = {X1, X2, X3};
inline const VarList kAuxiliaries = {W1, W2, W3};
inline const VarList kSourceOrder = {X1, X2, X3, Z, F};
inline const VarList kExtendedOrder = {X1, X2, X3, Z, F, W1, W2, W3};
inline const VarList kObserved = {W1, W2, W3, Z, F};
}  // namespace var

// Factors of the Bayesian network p(f) p(z|f) p(x1|z) p(x2|z) p(x3|f).
struct BayesNetSpec {
  JointPMF p_f;
  ConditionalPMF p_z_given_f;
  ConditionalPMF p_x1_given_z;
  ConditionalPMF p_x2_given_z;
  ConditionalPMF p_x3_given_f;
};

class SourceModel {
 public:
  // Joint must have exactly the axes X1, X2, X3, Z, F (any order).
  explicit SourceModel(JointPMF joint, std::optional<BayesNetSpec> bn = std::nullopt);

  const JointPMF& joint() const noexcept { return joint_; }
  const std::optional<BayesNetSpec>& bayes_net() const noexcept { return bn_; }

  // i in {0,1,2} for X1, X2, X3.
  const Alphabet& source_alphabet(std::size_t i) const { return joint_.axes().at(i); }

 private:
  JointPMF joint_;
  std::optional<BayesNetSpec> bn_;
};

// Auxiliary channels p(w1|x1) p(w2|x2) p(w3|x3).
struct TestChannelTriple {
  ConditionalPMF w1;
  ConditionalPMF w2;
  ConditionalPMF w3;

  const ConditionalPMF& operator[](std::size_t i) const;

  static TestChannelTriple identity(const SourceModel& model);
  static TestChannelTriple constant(const SourceModel& model);
  static TestChannelTriple symmetric(const SourceModel& model, double crossover);
};

class DistortionMeasure {
 public:
  DistortionMeasure(Alphabet source, Alphabet recon, std::vector<double> cost);
  static DistortionMeasure hamming(const Alphabet& source);

  const Alphabet& source() const noexcept { return source_; }
  const Alphabet& recon() const noexcept { return recon_; }
  double operator()(std::size_t x, std::size_t xhat) const { return cost_[x * recon_.size() + xhat]; }
  std::span<const double> costs() const noexcept { return cost_; }

  // Distortion of the best constant reconstruction, the zero-rate operating point.
  double max_useful(std::span<const double> p_source) const;
  DistortionMeasure scaled(double factor) const;

 private:
  Alphabet source_;
  Alphabet recon_;
  std::vector<double> cost_;
};

// Deterministic reconstruction table over the observed axes; -1 marks a missing entry.
struct DecoderRule {
  std::vector<Alphabet> observed;
  Alphabet recon;
  std::vector<long> table;
};

struct NamedResidual {
  std::string name;
  double residual;
};

struct ResidualReport {
  std::vector<NamedResidual> residuals;
  std::vector<NamedResidual> violations;

  bool ok() const noexcept { return violations.empty(); }
  void add(std::string name, double residual, double tol);
};

SourceModel assemble_joint(const BayesNetSpec& spec);

ResidualReport check_bn_structure(const SourceModel& model, double tol);

// Joint over X1, X2, X3, Z, F, W1, W2, W3 in that order.
JointPMF extend_with_test_channels(const SourceModel& model, const TestChannelTriple& channels);

double expected_distortion(const JointPMF& extended, const DecoderRule& decoder,
                           const DistortionMeasure& d);

// Bayes-optimal reconstruction of d.source() from the observed axes (default W1,W2,W3,Z,F).
DecoderRule optimal_decoder(const JointPMF& extended, const std::string& source_axis,
                            const DistortionMeasure& d, const VarList& observed = var::kObserved);

// The canonical binary example: F ~ Bern(0.5), Z = BSC(0.1)(F), X1 = BSC(0.1)(Z),
// X2 = BSC(0.2)(Z), X3 = BSC(0.1)(F).
BayesNetSpec reference_model_e1();

}  // namespace rdregion
