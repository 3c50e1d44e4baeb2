#include "rdregion/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rdregion/errors.hpp"

namespace rdregion {

namespace {

void require_factor(const ConditionalPMF& f, const std::string& out, const Alphabet& given,
                    const char* factor) {
  if (f.out_axis().name() != out)
    throw ModelError(std::string(factor) + " must produce '" + out + "', not '" +
                     f.out_axis().name() + "'");
  if (f.given_axes().size() != 1 || f.given_axes()[0] != given)
    throw ModelError(std::string(factor) + " must condition on exactly '" + given.name() +
                     "' with " + std::to_string(given.size()) + " symbols");
}

}  // namespace

SourceModel::SourceModel(JointPMF joint, std::optional<BayesNetSpec> bn)
    : joint_([&] {
        const auto labels = joint.labels();
        const std::set<std::string> have(labels.begin(), labels.end());
        const std::set<std::string> want(var::kSourceOrder.begin(), var::kSourceOrder.end());
        if (labels.size() != 5 || have != want)
          throw ModelError("source model needs exactly the variables X1, X2, X3, Z, F");
        return joint.reorder(var::kSourceOrder);
      }()),
      bn_(std::move(bn)) {}

const ConditionalPMF& TestChannelTriple::operator[](std::size_t i) const {
  switch (i) {
    case 0: return w1;
    case 1: return w2;
    case 2: return w3;
  }
  throw InputError("encoder index must be 0, 1 or 2");
}

TestChannelTriple TestChannelTriple::identity(const SourceModel& model) {
  return {ConditionalPMF::identity(model.source_alphabet(0), var::W1),
          ConditionalPMF::identity(model.source_alphabet(1), var::W2),
          ConditionalPMF::identity(model.source_alphabet(2), var::W3)};
}

TestChannelTriple TestChannelTriple::constant(const SourceModel& model) {
  return {ConditionalPMF::constant(model.source_alphabet(0), Alphabet::indexed(var::W1, 1)),
          ConditionalPMF::constant(model.source_alphabet(1), Alphabet::indexed(var::W2, 1)),
          ConditionalPMF::constant(model.source_alphabet(2), Alphabet::indexed(var::W3, 1))};
}

TestChannelTriple TestChannelTriple::symmetric(const SourceModel& model, double crossover) {
  return {ConditionalPMF::symmetric(model.source_alphabet(0), var::W1, crossover),
          ConditionalPMF::symmetric(model.source_alphabet(1), var::W2, crossover),
          ConditionalPMF::symmetric(model.source_alphabet(2), var::W3, crossover)};
}

// ---------------------------------------------------------------------------------------------

DistortionMeasure::DistortionMeasure(Alphabet source, Alphabet recon, std::vector<double> cost)
    : source_(std::move(source)), recon_(std::move(recon)), cost_(std::move(cost)) {
  if (cost_.size() != source_.size() * recon_.size())
    throw ModelError("distortion matrix for '" + source_.name() + "' must be " +
                     std::to_string(source_.size()) + "x" + std::to_string(recon_.size()));
  for (double c : cost_)
    if (!(c >= 0.0) || !std::isfinite(c))
      throw ModelError("distortion costs for '" + source_.name() + "' must be finite and >= 0");
}

DistortionMeasure DistortionMeasure::hamming(const Alphabet& source) {
  const std::size_t k = source.size();
  std::vector<double> cost(k * k, 1.0);
  for (std::size_t i = 0; i < k; ++i) cost[i * k + i] = 0.0;
  return DistortionMeasure(source, source.renamed(source.name() + "_hat"), std::move(cost));
}

double DistortionMeasure::max_useful(std::span<const double> p_source) const {
  double best = INFINITY;
  for (std::size_t xh = 0; xh < recon_.size(); ++xh) {
    double e = 0.0;
    for (std::size_t x = 0; x < source_.size(); ++x) e += p_source[x] * (*this)(x, xh);
    best = std::min(best, e);
  }
  return best;
}

DistortionMeasure DistortionMeasure::scaled(double factor) const {
  auto c = cost_;
  for (auto& v : c) v *= factor;
  return DistortionMeasure(source_, recon_, std::move(c));
}

// ---------------------------------------------------------------------------------------------

SourceModel assemble_joint(const BayesNetSpec& spec) {
  if (spec.p_f.rank() != 1 || spec.p_f.axes()[0].name() != var::F)
    throw ModelError("p(f) must be a distribution over 'F'");
  const Alphabet& f_alpha = spec.p_f.axes()[0];
  require_factor(spec.p_z_given_f, var::Z, f_alpha, "p(z|f)");
  const Alphabet& z_alpha = spec.p_z_given_f.out_axis();
  require_factor(spec.p_x1_given_z, var::X1, z_alpha, "p(x1|z)");
  require_factor(spec.p_x2_given_z, var::X2, z_alpha, "p(x2|z)");
  require_factor(spec.p_x3_given_f, var::X3, f_alpha, "p(x3|f)");

  const Alphabet& a1 = spec.p_x1_given_z.out_axis();
  const Alphabet& a2 = spec.p_x2_given_z.out_axis();
  const Alphabet& a3 = spec.p_x3_given_f.out_axis();
  std::vector<double> probs;
  probs.reserve(a1.size() * a2.size() * a3.size() * z_alpha.size() * f_alpha.size());
  for (std::size_t x1 = 0; x1 < a1.size(); ++x1)
    for (std::size_t x2 = 0; x2 < a2.size(); ++x2)
      for (std::size_t x3 = 0; x3 < a3.size(); ++x3)
        for (std::size_t z = 0; z < z_alpha.size(); ++z)
          for (std::size_t f = 0; f < f_alpha.size(); ++f)
            probs.push_back(spec.p_f.probs()[f] * spec.p_z_given_f.at(f, z) *
                            spec.p_x1_given_z.at(z, x1) * spec.p_x2_given_z.at(z, x2) *
                            spec.p_x3_given_f.at(f, x3));
  JointPMF joint({a1, a2, a3, z_alpha, f_alpha}, std::move(probs));
  return SourceModel(std::move(joint), spec);
}

void ResidualReport::add(std::string name, double residual, double tol) {
  residuals.push_back({std::move(name), residual});
  if (!(std::abs(residual) <= tol)) violations.push_back(residuals.back());
}

ResidualReport check_bn_structure(const SourceModel& model, double tol) {
  InfoMeasures info(model.joint());
  ResidualReport report;
  for (const char* term : {"I(X1;X2|Z)", "I(X1;F|Z)", "I(X2;F|Z)", "I(X3;Z|F)", "I(X1,X2;X3|Z,F)",
                           "I(X1;X2|Z,F)"})
    report.add(term, info(term), tol);
  return report;
}

JointPMF extend_with_test_channels(const SourceModel& model, const TestChannelTriple& channels) {
  const JointPMF& src = model.joint();
  std::vector<Alphabet> axes = src.axes();
  std::size_t w_size[3];
  for (std::size_t i = 0; i < 3; ++i) {
    const ConditionalPMF& ch = channels[i];
    const Alphabet& xi = model.source_alphabet(i);
    if (ch.given_axes().size() != 1 || ch.given_axes()[0].name() != xi.name() ||
        ch.given_axes()[0].size() != xi.size())
      throw ModelError("test channel " + var::kAuxiliaries[i] + " must condition on " + xi.name() +
                       " alone");
    axes.push_back(ch.out_axis().renamed(var::kAuxiliaries[i]));
    w_size[i] = ch.out_size();
  }
  const std::size_t block = w_size[0] * w_size[1] * w_size[2];
  std::vector<double> probs(src.size() * block);
  std::size_t sym[5];
  for (std::size_t s = 0; s < src.size(); ++s) {
    src.unravel(s, sym);
    const double ps = src.probs()[s];
    const auto r1 = channels.w1.row(sym[0]);
    const auto r2 = channels.w2.row(sym[1]);
    const auto r3 = channels.w3.row(sym[2]);
    double* out = probs.data() + s * block;
    for (std::size_t a = 0; a < w_size[0]; ++a)
      for (std::size_t b = 0; b < w_size[1]; ++b)
        for (std::size_t c = 0; c < w_size[2]; ++c) *out++ = ps * r1[a] * r2[b] * r3[c];
  }
  return JointPMF(std::move(axes), std::move(probs));
}

namespace {

struct DecoderTable {
  std::vector<Alphabet> observed;
  std::size_t n_obs = 1;
  std::vector<double> p_obs_x;  // [obs][x]
};

DecoderTable decoder_table(const JointPMF& extended, const std::string& source_axis,
                           const DistortionMeasure& d, const VarList& observed) {
  if (extended.axis(source_axis).size() != d.source().size())
    throw ModelError("distortion measure alphabet does not match '" + source_axis + "'");
  DecoderTable t;
  for (const auto& o : observed) {
    t.observed.push_back(extended.axis(o));
    t.n_obs *= t.observed.back().size();
  }
  VarList order(observed);
  order.push_back(source_axis);
  t.p_obs_x = marginal_table(extended, order);
  return t;
}

}  // namespace

double expected_distortion(const JointPMF& extended, const DecoderRule& decoder,
                           const DistortionMeasure& d) {
  VarList observed;
  for (const auto& a : decoder.observed) observed.push_back(a.name());
  const auto t = decoder_table(extended, d.source().name(), d, observed);
  if (decoder.table.size() != t.n_obs)
    throw DecoderError("decoder covers " + std::to_string(decoder.table.size()) + " of " +
                       std::to_string(t.n_obs) + " observation tuples");
  if (decoder.recon.size() != d.recon().size())
    throw DecoderError("decoder reconstruction alphabet does not match the distortion measure");
  const std::size_t nx = d.source().size();
  double total = 0.0;
  for (std::size_t o = 0; o < t.n_obs; ++o) {
    const long g = decoder.table[o];
    if (g < 0 || static_cast<std::size_t>(g) >= d.recon().size())
      throw DecoderError("decoder has no reconstruction for observation tuple " + std::to_string(o));
    for (std::size_t x = 0; x < nx; ++x) total += t.p_obs_x[o * nx + x] * d(x, static_cast<std::size_t>(g));
  }
  return total;
}

DecoderRule optimal_decoder(const JointPMF& extended, const std::string& source_axis,
                            const DistortionMeasure& d, const VarList& observed) {
  const auto t = decoder_table(extended, source_axis, d, observed);
  const std::size_t nx = d.source().size();
  const std::size_t nr = d.recon().size();
  DecoderRule rule{t.observed, d.recon(), std::vector<long>(t.n_obs, 0)};
  std::vector<double> cost(nr);
  for (std::size_t o = 0; o < t.n_obs; ++o) {
    for (std::size_t xh = 0; xh < nr; ++xh) {
      double c = 0.0;
      for (std::size_t x = 0; x < nx; ++x) c += t.p_obs_x[o * nx + x] * d(x, xh);
      cost[xh] = c;
    }
    const double best = *std::min_element(cost.begin(), cost.end());
    // Lowest index among the (numerically) tied minimizers.
    const double slack = 1e-14 * std::max(1.0, std::abs(best));
    for (std::size_t xh = 0; xh < nr; ++xh)
      if (cost[xh] <= best + slack) {
        rule.table[o] = static_cast<long>(xh);
        break;
      }
  }
  return rule;
}

BayesNetSpec reference_model_e1() {
  const Alphabet f = Alphabet::indexed(var::F, 2);
  const Alphabet z = Alphabet::indexed(var::Z, 2);
  const auto bsc = [](const Alphabet& in, const std::string& out, double e) {
    return ConditionalPMF::symmetric(in, out, e);
  };
  return BayesNetSpec{
      JointPMF({f}, {0.5, 0.5}),
      ConditionalPMF({f}, z, {0.9, 0.1, 0.1, 0.9}),
      bsc(z, var::X1, 0.1),
      bsc(z, var::X2, 0.2),
      bsc(f, var::X3, 0.1),
  };
}

}  // namespace rdregion
