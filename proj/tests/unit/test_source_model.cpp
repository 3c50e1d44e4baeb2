#include <gtest/gtest.h>

#include "bridge.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "rdregion/errors.hpp"
#include "rdregion/source_model.hpp"

using namespace rdregion;

namespace {

// Frozen from a direct-summation oracle over the 256-entry extended tensor.
constexpr double kE1Bsc025_B1 = 0.118709100769;  // I(W1; W2,W3,Z,F)
constexpr double kE1Bsc025_B2 = 0.065931944625;  // I(W2; W1,W3,Z,F)

const Alphabet kBit = Alphabet::indexed("b", 2);

ConditionalPMF factor(const std::string& given, const std::string& out, std::vector<double> rows) {
  return ConditionalPMF({kBit.renamed(given)}, kBit.renamed(out), std::move(rows));
}

BayesNetSpec all_identity() {
  return {JointPMF({kBit.renamed(var::F)}, {0.5, 0.5}), factor(var::F, var::Z, {1, 0, 0, 1}),
          factor(var::Z, var::X1, {1, 0, 0, 1}), factor(var::Z, var::X2, {1, 0, 0, 1}),
          factor(var::F, var::X3, {1, 0, 0, 1})};
}

BayesNetSpec all_uniform() {
  const std::vector<double> u = {0.5, 0.5, 0.5, 0.5};
  return {JointPMF({kBit.renamed(var::F)}, {0.5, 0.5}), factor(var::F, var::Z, u), factor(var::Z, var::X1, u),
          factor(var::Z, var::X2, u), factor(var::F, var::X3, u)};
}

// Binary joint with X3 copied from X1 (Z, F independent fair bits, X2 fair).
SourceModel x3_copies_x1() {
  std::vector<double> probs;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        for (int z = 0; z < 2; ++z)
          for (int f = 0; f < 2; ++f) probs.push_back(x3 == x1 ? 1.0 / 16 : 0.0);
  std::vector<Alphabet> axes;
  for (const auto& n : var::kSourceOrder) axes.push_back(kBit.renamed(n));
  return SourceModel(JointPMF(std::move(axes), std::move(probs)));
}

SourceModel e1() { return assemble_joint(reference_model_e1()); }

}  // namespace

TEST(AssembleJoint, IdentityFactorsGiveDiagonal) {
  const auto m = assemble_joint(all_identity());
  EXPECT_NEAR(entropy(m.joint(), var::kSourceOrder), 1.0, 1e-15);
  const std::size_t zeros[5] = {0, 0, 0, 0, 0};
  const std::size_t ones[5] = {1, 1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(m.joint().at(zeros), 0.5);
  EXPECT_DOUBLE_EQ(m.joint().at(ones), 0.5);
}

TEST(AssembleJoint, UniformFactorsGiveProduct) {
  const auto m = assemble_joint(all_uniform());
  for (double v : m.joint().probs()) EXPECT_DOUBLE_EQ(v, 1.0 / 32);
  const auto rep = check_bn_structure(m, 0.0);
  for (const auto& r : rep.residuals) EXPECT_NEAR(r.residual, 0.0, 1e-15);
}

TEST(AssembleJoint, ReferenceModelValues) {
  const auto m = e1();
  EXPECT_NEAR(mutual_information(m.joint(), {var::X3}, {var::F}), 0.53100, 1e-4);
  EXPECT_NEAR(mutual_information(m.joint(), {var::X1}, {var::F}), 0.31992, 1e-4);
  EXPECT_NEAR(mutual_information(m.joint(), {var::X1}, {var::F}), 0.31992295427172, 1e-12);
}

TEST(AssembleJoint, RejectsInconsistentAlphabets) {
  auto spec = reference_model_e1();
  spec.p_x1_given_z = ConditionalPMF({Alphabet::indexed(var::Z, 3)}, kBit.renamed(var::X1), {1, 0, 0, 1, 1, 0});
  EXPECT_THROW(assemble_joint(spec), ModelError);
  auto spec2 = reference_model_e1();
  spec2.p_x3_given_f = factor(var::Z, var::X3, {1, 0, 0, 1});
  EXPECT_THROW(assemble_joint(spec2), ModelError);
}

TEST(AssembleJoint, FactorsRecoveredByConditioning) {
  rdtest::Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const auto spec = rdtest::random_bn_spec(rng, 3, 0.2);
    const auto m = assemble_joint(spec);
    const auto check = [&](const ConditionalPMF& f, const std::string& out, const std::string& given) {
      const auto c = condition(m.joint(), {out}, {given});
      for (std::size_t r = 0; r < f.num_rows(); ++r) {
        if (!c.is_defined(r)) continue;
        for (std::size_t k = 0; k < f.out_size(); ++k) EXPECT_NEAR(c.at(r, k), f.at(r, k), 1e-12);
      }
    };
    check(spec.p_z_given_f, var::Z, var::F);
    check(spec.p_x1_given_z, var::X1, var::Z);
    check(spec.p_x2_given_z, var::X2, var::Z);
    check(spec.p_x3_given_f, var::X3, var::F);
    EXPECT_TRUE(check_bn_structure(m, 1e-10).ok());
  }
}

TEST(CheckBnStructure, ReferenceModelPasses) {
  const auto rep = check_bn_structure(e1(), 1e-10);
  EXPECT_TRUE(rep.ok());
  EXPECT_GE(rep.residuals.size(), 5u);
}

TEST(CheckBnStructure, CopiedSourceFails) {
  const auto rep = check_bn_structure(x3_copies_x1(), 1e-10);
  ASSERT_FALSE(rep.ok());
  bool found = false;
  for (const auto& r : rep.residuals)
    if (r.name == "I(X1,X2;X3|Z,F)") {
      found = true;
      EXPECT_GT(r.residual, 0.1);
      EXPECT_NEAR(r.residual, 1.0, 1e-12);
    }
  EXPECT_TRUE(found);
}

TEST(CheckBnStructure, CatchesFDependenceHiddenFromPairwiseTerms) {
  // F = X1 xor X2 with X1, X2, Z fair and independent: every pairwise statement holds but
  // X1 and X2 are dependent given (Z, F).
  std::vector<double> probs;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        for (int z = 0; z < 2; ++z)
          for (int f = 0; f < 2; ++f) probs.push_back((f == (x1 ^ x2)) ? 1.0 / 16 : 0.0);
  std::vector<Alphabet> axes;
  for (const auto& n : var::kSourceOrder) axes.push_back(kBit.renamed(n));
  const SourceModel m(JointPMF(std::move(axes), std::move(probs)));
  EXPECT_FALSE(check_bn_structure(m, 1e-10).ok());
}

TEST(ExtendWithChannels, ConstantChannelsArePointMasses) {
  const auto m = e1();
  const auto ext = extend_with_test_channels(m, TestChannelTriple::constant(m));
  ASSERT_EQ(ext.rank(), 8u);
  std::size_t s[8];
  for (std::size_t i = 0; i < ext.size(); ++i) {
    ext.unravel(i, s);
    const bool zero_w = s[5] == 0 && s[6] == 0 && s[7] == 0;
    EXPECT_DOUBLE_EQ(ext.probs()[i], zero_w ? m.joint().at(std::span<const std::size_t>(s, 5)) : 0.0);
  }
}

TEST(ExtendWithChannels, IdentityChannelsRelabel) {
  const auto m = e1();
  const auto ext = extend_with_test_channels(m, TestChannelTriple::identity(m));
  EXPECT_NEAR(mutual_information(ext, {var::W1}, {var::W2}, {var::Z}), 0.0, 1e-12);
  EXPECT_NEAR(mutual_information(ext, {var::W1}, {var::W3}, {var::Z, var::F}), 0.0, 1e-12);
}

TEST(ExtendWithChannels, E1Bsc025Fixture) {
  const auto m = e1();
  const auto ch = TestChannelTriple::symmetric(m, 0.25);
  const auto ext = extend_with_test_channels(m, ch);
  EXPECT_NEAR(mutual_information(ext, {var::W1}, {var::W2, var::W3, var::Z, var::F}), kE1Bsc025_B1, 1e-10);
  EXPECT_NEAR(mutual_information(ext, {var::W2}, {var::W1, var::W3, var::Z, var::F}), kE1Bsc025_B2, 1e-10);
  EXPECT_NEAR(mutual_information(ext, {var::W3}, {var::W1, var::W2, var::Z, var::F}), kE1Bsc025_B1, 1e-10);
  const auto o = rdtest::oracle_extended(m, ch);
  EXPECT_NEAR(oracle::mutual_information(o, {5}, {6, 7, 3, 4}), kE1Bsc025_B1, 1e-10);
}

TEST(ExtendWithChannels, LongMarkovChainsHold) {
  rdtest::Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const auto m = rdtest::random_source(rng, 3, 0.2);
    const auto ext = extend_with_test_channels(m, rdtest::random_channels(rng, m));
    EXPECT_NEAR(verify_markov(ext, {var::W1}, {var::X1}, {var::X2, var::X3, var::Z, var::F, var::W2, var::W3}), 0.0, 1e-10);
    EXPECT_NEAR(verify_markov(ext, {var::W2}, {var::X2}, {var::X1, var::X3, var::Z, var::F, var::W1, var::W3}), 0.0, 1e-10);
    EXPECT_NEAR(verify_markov(ext, {var::W3}, {var::X3}, {var::X1, var::X2, var::Z, var::F, var::W1, var::W2}), 0.0, 1e-10);
  }
}

TEST(ExtendWithChannels, WrongConditioningAxis) {
  const auto m = e1();
  auto ch = TestChannelTriple::constant(m);
  ch.w2 = ConditionalPMF::identity(m.source_alphabet(0), var::W2);
  EXPECT_THROW(extend_with_test_channels(m, ch), ModelError);
}

TEST(ExpectedDistortion, IdentityDecoderIsPerfect) {
  const auto m = e1();
  const auto ext = extend_with_test_channels(m, TestChannelTriple::identity(m));
  const auto d = DistortionMeasure::hamming(m.source_alphabet(0));
  const auto g = optimal_decoder(ext, var::X1, d);
  EXPECT_DOUBLE_EQ(expected_distortion(ext, g, d), 0.0);
  // g = w1 written out explicitly.
  DecoderRule direct{g.observed, d.recon(), {}};
  std::size_t s[5];
  std::size_t n = 1;
  for (const auto& a : g.observed) n *= a.size();
  for (std::size_t o = 0; o < n; ++o) {
    std::size_t rest = o;
    for (std::size_t k = 5; k-- > 0;) {
      s[k] = rest % g.observed[k].size();
      rest /= g.observed[k].size();
    }
    direct.table.push_back(static_cast<long>(s[0]));
  }
  EXPECT_DOUBLE_EQ(expected_distortion(ext, direct, d), 0.0);
}

TEST(ExpectedDistortion, ConstantChannelsUniformSource) {
  const auto m = assemble_joint(all_uniform());
  const auto ext = extend_with_test_channels(m, TestChannelTriple::constant(m));
  const auto d = DistortionMeasure::hamming(m.source_alphabet(0));
  EXPECT_DOUBLE_EQ(expected_distortion(ext, optimal_decoder(ext, var::X1, d), d), 0.5);
}

TEST(ExpectedDistortion, E1Bsc025MatchesBruteForce) {
  const auto m = e1();
  auto ch = TestChannelTriple::constant(m);
  ch.w1 = ConditionalPMF::symmetric(m.source_alphabet(0), var::W1, 0.25);
  const auto ext = extend_with_test_channels(m, ch);
  const auto d = DistortionMeasure::hamming(m.source_alphabet(0));
  const double got = expected_distortion(ext, optimal_decoder(ext, var::X1, d), d);
  const double want = oracle::bayes_distortion(rdtest::oracle_extended(m, ch), 0, {5, 6, 7, 3, 4}, rdtest::cost_matrix(d));
  EXPECT_NEAR(got, want, 1e-12);
  // Z alone already beats a BSC(0.25) description of X1.
  EXPECT_NEAR(got, 0.1, 1e-12);
}

TEST(ExpectedDistortion, AllBsc025Fixture) {
  const auto m = e1();
  const auto ext = extend_with_test_channels(m, TestChannelTriple::symmetric(m, 0.25));
  const double want[3] = {0.1, 0.2, 0.1};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto d = DistortionMeasure::hamming(m.source_alphabet(i));
    EXPECT_NEAR(expected_distortion(ext, optimal_decoder(ext, var::kSources[i], d), d), want[i], 1e-12);
  }
}

TEST(ExpectedDistortion, MissingTupleIsAnError) {
  const auto m = e1();
  const auto ext = extend_with_test_channels(m, TestChannelTriple::identity(m));
  const auto d = DistortionMeasure::hamming(m.source_alphabet(0));
  auto g = optimal_decoder(ext, var::X1, d);
  g.table[3] = -1;
  EXPECT_THROW(expected_distortion(ext, g, d), DecoderError);
  g.table.pop_back();
  EXPECT_THROW(expected_distortion(ext, g, d), DecoderError);
}

TEST(OptimalDecoder, HammingIsMap) {
  rdtest::Rng rng(47);
  for (int t = 0; t < 10; ++t) {
    const auto m = rdtest::random_source(rng, 3);
    const auto ext = extend_with_test_channels(m, rdtest::random_channels(rng, m));
    const auto d = DistortionMeasure::hamming(m.source_alphabet(0));
    const auto g = optimal_decoder(ext, var::X1, d);
    const auto post = marginal_table(ext, {var::W1, var::W2, var::W3, var::Z, var::F, var::X1});
    const std::size_t nx = m.source_alphabet(0).size();
    for (std::size_t o = 0; o < g.table.size(); ++o) {
      std::size_t best = 0;
      for (std::size_t x = 1; x < nx; ++x)
        if (post[o * nx + x] > post[o * nx + best] + 1e-15) best = x;
      EXPECT_NEAR(post[o * nx + static_cast<std::size_t>(g.table[o])], post[o * nx + best], 1e-15);
    }
  }
}

TEST(OptimalDecoder, ZeroCostPicksIndexZero) {
  const auto m = e1();
  const auto ext = extend_with_test_channels(m, TestChannelTriple::symmetric(m, 0.25));
  const DistortionMeasure zero(m.source_alphabet(0), m.source_alphabet(0), {0, 0, 0, 0});
  for (long v : optimal_decoder(ext, var::X1, zero).table) EXPECT_EQ(v, 0);
}

TEST(OptimalDecoder, BeatsRandomDecoders) {
  rdtest::Rng rng(53);
  for (int t = 0; t < 20; ++t) {
    const auto m = rdtest::random_source(rng, 3, 0.1);
    const auto ext = extend_with_test_channels(m, rdtest::random_channels(rng, m));
    const std::size_t i = t % 3;
    const Alphabet& src = m.source_alphabet(i);
    const Alphabet recon = Alphabet::indexed("R", 3).renamed(src.name() + "hat");
    std::vector<double> cost;
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (std::size_t k = 0; k < src.size() * recon.size(); ++k) cost.push_back(u(rng));
    const DistortionMeasure d(src, recon, cost);
    const auto g = optimal_decoder(ext, var::kSources[i], d);
    const double best = expected_distortion(ext, g, d);
    const double oracle_best = oracle::bayes_distortion(rdtest::to_table(ext), i, {5, 6, 7, 3, 4}, rdtest::cost_matrix(d));
    EXPECT_NEAR(best, oracle_best, 1e-12);
    std::uniform_int_distribution<long> pick(0, static_cast<long>(recon.size()) - 1);
    for (int k = 0; k < 100; ++k) {
      DecoderRule r = g;
      for (auto& v : r.table) v = pick(rng);
      EXPECT_LE(best, expected_distortion(ext, r, d) + 1e-12);
    }
  }
}

TEST(ExpectedDistortion, LinearInCost) {
  rdtest::Rng rng(59);
  for (int t = 0; t < 20; ++t) {
    const auto m = rdtest::random_source(rng, 3);
    const auto ext = extend_with_test_channels(m, rdtest::random_channels(rng, m));
    const Alphabet& src = m.source_alphabet(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> c1, c2, mix;
    for (std::size_t k = 0; k < src.size() * src.size(); ++k) {
      c1.push_back(u(rng));
      c2.push_back(u(rng));
      mix.push_back(2.0 * c1.back() + 3.0 * c2.back());
    }
    const DistortionMeasure d1(src, src, c1), d2(src, src, c2), dm(src, src, mix);
    DecoderRule g = optimal_decoder(ext, var::X2, d1);
    std::uniform_int_distribution<long> pick(0, static_cast<long>(src.size()) - 1);
    for (auto& v : g.table) v = pick(rng);
    EXPECT_NEAR(expected_distortion(ext, g, dm), 2.0 * expected_distortion(ext, g, d1) + 3.0 * expected_distortion(ext, g, d2), 1e-12);
    EXPECT_NEAR(expected_distortion(ext, g, d1.scaled(4.0)), 4.0 * expected_distortion(ext, g, d1), 1e-12);
  }
}

TEST(DistortionMeasure, RejectsNegativeOrNonFinite) {
  EXPECT_THROW(DistortionMeasure(kBit, kBit, {0, -1, 1, 0}), ModelError);
  EXPECT_THROW(DistortionMeasure(kBit, kBit, {0, INFINITY, 1, 0}), ModelError);
  EXPECT_THROW(DistortionMeasure(kBit, kBit, {0, 1, 1}), ModelError);
}

TEST(SourceModel, RequiresFiveNamedAxes) {
  std::vector<Alphabet> axes;
  for (const auto& n : {"X1", "X2", "X3", "Z", "G"}) axes.push_back(kBit.renamed(n));
  EXPECT_THROW(SourceModel(JointPMF::uniform(axes)), ModelError);
}
