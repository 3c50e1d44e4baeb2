#pragma once

// Finite-alphabet probability tables and the information measures built on them.
// All quantities are in bits; 0 log 0 is taken as 0 throughout.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rdregion {

using VarList = std::vector<std::string>;

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kNegativeInfoTolerance = 1e-12;
inline constexpr std::size_t kMaxStateSpace = 10'000'000;

class Alphabet {
 public:
  Alphabet(std::string name, std::vector<std::string> symbols);

  // Symbols "0", "1", ..., "size-1".
  static Alphabet indexed(std::string name, std::size_t size);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
  std::size_t index_of(std::string_view symbol) const;

  Alphabet renamed(std::string name) const { return Alphabet(std::move(name), symbols_); }

  bool operator==(const Alphabet&) const = default;

 private:
  std::string name_;
  std::vector<std::string> symbols_;
};

// Alphabet of tuples over several axes; symbol labels are comma-joined, name is comma-joined.
Alphabet product_alphabet(std::span<const Alphabet> axes);

// Dense probability tensor. Row-major: the last axis varies fastest.
class JointPMF {
 public:
  JointPMF(std::vector<Alphabet> axes, std::vector<double> probs);

  static JointPMF uniform(std::vector<Alphabet> axes);
  static JointPMF point_mass(std::vector<Alphabet> axes, std::span<const std::size_t> symbols);

  const std::vector<Alphabet>& axes() const noexcept { return axes_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t rank() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return probs_.size(); }
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

  VarList labels() const;
  bool has_axis(std::string_view label) const noexcept;
  std::size_t axis_index(std::string_view label) const;
  const Alphabet& axis(std::string_view label) const { return axes_[axis_index(label)]; }

  std::size_t flat_index(std::span<const std::size_t> symbols) const;
  void unravel(std::size_t flat, std::span<std::size_t> symbols) const;
  double at(std::span<const std::size_t> symbols) const { return probs_[flat_index(symbols)]; }

  // Same distribution with the axes permuted into `order` (must name every axis once).
  JointPMF reorder(const VarList& order) const;

 private:
  std::vector<Alphabet> axes_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

// p(out | given). Row r corresponds to the row-major index of the given symbols.
// Rows whose conditioning event had zero probability are flagged undefined and hold a
// uniform placeholder; they carry zero weight in every expectation.
class ConditionalPMF {
 public:
  ConditionalPMF(std::vector<Alphabet> given_axes, Alphabet out_axis, std::vector<double> rows,
                 std::vector<bool> defined = {});

  static ConditionalPMF identity(const Alphabet& in, std::string out_name);
  static ConditionalPMF constant(const Alphabet& in, Alphabet out, std::size_t symbol = 0);
  // Symmetric channel with |out| = |in|: keeps the input w.p. 1-crossover, otherwise uniform
  // over the other symbols. For binary alphabets this is BSC(crossover).
  static ConditionalPMF symmetric(const Alphabet& in, std::string out_name, double crossover);

  const std::vector<Alphabet>& given_axes() const noexcept { return given_; }
  const Alphabet& out_axis() const noexcept { return out_; }
  std::size_t num_rows() const noexcept { return defined_.size(); }
  std::size_t out_size() const noexcept { return out_.size(); }

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(rows_).subspan(r * out_.size(), out_.size());
  }
  double at(std::size_t r, std::size_t out) const { return rows_[r * out_.size() + out]; }
  bool is_defined(std::size_t r) const { return defined_.at(r); }
  std::span<const double> table() const noexcept { return rows_; }

  std::size_t row_index(std::span<const std::size_t> given_symbols) const;
  ConditionalPMF with_out_name(std::string name) const;

 private:
  std::vector<Alphabet> given_;
  Alphabet out_;
  std::vector<double> rows_;
  std::vector<bool> defined_;
};

// Marginal probabilities laid out row-major in the order given by `ordered`.
std::vector<double> marginal_table(const JointPMF& p, const VarList& ordered);

// Axes of `p` kept in their original order.
JointPMF marginalize(const JointPMF& p, const VarList& keep);

// p(target | given). Several targets are fused into one product-alphabet axis.
ConditionalPMF condition(const JointPMF& p, const VarList& target, const VarList& given);

double entropy(const JointPMF& p, const VarList& vars);

// I(A;B|C). Values in [-1e-12, 0) are clamped to 0.
double mutual_information(const JointPMF& p, const VarList& a, const VarList& b,
                          const VarList& c = {});
double mutual_information_unclamped(const JointPMF& p, const VarList& a, const VarList& b,
                                    const VarList& c = {});

// p(x) * channel(out | given(x)); the new axis is appended last.
JointPMF attach_channel(const JointPMF& p, const ConditionalPMF& channel);

// I(A;C|B): zero iff A - B - C is a Markov chain.
double verify_markov(const JointPMF& p, const VarList& a, const VarList& b, const VarList& c);

// Entropy evaluator that memoizes H over axis subsets of one fixed joint.
// Not thread-safe; create one per evaluation.
class InfoMeasures {
 public:
  explicit InfoMeasures(const JointPMF& p) : p_(p) {}

  double entropy(const VarList& vars);
  double mutual_information(const VarList& a, const VarList& b, const VarList& c = {});
  double mutual_information_unclamped(const VarList& a, const VarList& b, const VarList& c = {});

  // Evaluates "H(A,B|C)" or "I(A,B;C|D,E)" written with axis labels; clamped like
  // mutual_information.
  double operator()(std::string_view expression);

  const JointPMF& joint() const noexcept { return p_; }

 private:
  const JointPMF& p_;
  std::map<std::vector<std::size_t>, double> cache_;
};

// Sums of probability-like values with Neumaier compensation.
double stable_sum(std::span<const double> values);

// -sum p log2 p over a probability vector.
double entropy_bits(std::span<const double> probs);

}  // namespace rdregion
