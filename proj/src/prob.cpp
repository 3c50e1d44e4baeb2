#include "rdregion/prob.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rdregion/errors.hpp"

namespace rdregion {

namespace {

std::vector<std::size_t> row_major_strides(const std::vector<Alphabet>& axes) {
  std::vector<std::size_t> strides(axes.size(), 1);
  for (std::size_t k = axes.size(); k-- > 1;) strides[k - 1] = strides[k] * axes[k].size();
  return strides;
}

std::size_t state_space(std::span<const Alphabet> axes) {
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (total > kMaxStateSpace / a.size())
      throw ConfigError("state space exceeds " + std::to_string(kMaxStateSpace) + " entries");
    total *= a.size();
  }
  return total;
}

// Sum of p over all axes not in `keep`, laid out row-major in the order of `keep`.
std::vector<double> project(const JointPMF& p, std::span<const std::size_t> keep) {
  const std::size_t rank = p.rank();
  std::vector<std::size_t> out_stride(rank, 0);
  std::size_t out_size = 1;
  for (std::size_t k = keep.size(); k-- > 0;) {
    out_stride[keep[k]] = out_size;
    out_size *= p.axes()[keep[k]].size();
  }
  std::vector<double> out(out_size, 0.0);
  const auto probs = p.probs();
  if (rank == 0) {
    out[0] = probs[0];
    return out;
  }
  std::vector<std::size_t> sym(rank, 0);
  std::size_t target = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out[target] += probs[i];
    for (std::size_t k = rank; k-- > 0;) {
      const std::size_t size = p.axes()[k].size();
      if (++sym[k] < size) {
        target += out_stride[k];
        break;
      }
      sym[k] = 0;
      target -= (size - 1) * out_stride[k];
    }
  }
  return out;
}

std::vector<std::size_t> resolve(const JointPMF& p, const VarList& vars) {
  std::vector<std::size_t> idx;
  idx.reserve(vars.size());
  for (const auto& v : vars) idx.push_back(p.axis_index(v));
  return idx;
}

void require_disjoint(const VarList& a, const VarList& b, const char* what) {
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      throw InvalidQuery(std::string("variable '") + x + "' appears twice in " + what);
}

void require_unique(const VarList& a) {
  std::set<std::string> seen;
  for (const auto& x : a)
    if (!seen.insert(x).second) throw InvalidQuery("variable '" + x + "' listed twice");
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::string name, std::vector<std::string> symbols)
    : name_(std::move(name)), symbols_(std::move(symbols)) {
  if (name_.empty()) throw DistributionError("alphabet needs a name");
  if (symbols_.empty()) throw DistributionError("alphabet '" + name_ + "' is empty");
  std::set<std::string> seen;
  for (const auto& s : symbols_)
    if (!seen.insert(s).second)
      throw DistributionError("alphabet '" + name_ + "' repeats symbol '" + s + "'");
}

Alphabet Alphabet::indexed(std::string name, std::size_t size) {
  std::vector<std::string> symbols;
  symbols.reserve(size);
  for (std::size_t i = 0; i < size; ++i) symbols.push_back(std::to_string(i));
  return Alphabet(std::move(name), std::move(symbols));
}

std::size_t Alphabet::index_of(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return i;
  throw InputError("symbol '" + std::string(symbol) + "' not in alphabet '" + name_ + "'");
}

Alphabet product_alphabet(std::span<const Alphabet> axes) {
  if (axes.size() == 1) return axes[0];
  if (axes.empty()) return Alphabet("()", {"()"});
  std::string name;
  std::vector<std::string> symbols{""};
  for (const auto& a : axes) {
    name += (name.empty() ? "" : ",") + a.name();
    std::vector<std::string> next;
    next.reserve(symbols.size() * a.size());
    for (const auto& prefix : symbols)
      for (const auto& s : a.symbols()) next.push_back(prefix.empty() ? s : prefix + "," + s);
    symbols = std::move(next);
  }
  return Alphabet(std::move(name), std::move(symbols));
}

// ---------------------------------------------------------------------------------------------
// JointPMF

JointPMF::JointPMF(std::vector<Alphabet> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
  std::set<std::string> names;
  for (const auto& a : axes_)
    if (!names.insert(a.name()).second) throw DuplicateVariable(a.name());
  const std::size_t expected = state_space(axes_);
  if (probs_.size() != expected)
    throw DistributionError("joint over " + std::to_string(axes_.size()) + " axes needs " +
                            std::to_string(expected) + " entries, got " +
                            std::to_string(probs_.size()));
  for (double v : probs_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DistributionError("joint has a negative or non-finite entry");
  const double total = stable_sum(probs_);
  if (std::abs(total - 1.0) > kSumTolerance)
    throw DistributionError("joint sums to " + std::to_string(total) + ", not 1");
  strides_ = row_major_strides(axes_);
}

JointPMF JointPMF::uniform(std::vector<Alphabet> axes) {
  const std::size_t n = state_space(axes);
  return JointPMF(std::move(axes), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointPMF JointPMF::point_mass(std::vector<Alphabet> axes, std::span<const std::size_t> symbols) {
  const std::size_t n = state_space(axes);
  if (symbols.size() != axes.size()) throw InputError("symbol tuple has wrong rank");
  const auto strides = row_major_strides(axes);
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (symbols[k] >= axes[k].size()) throw InputError("symbol index out of range");
    flat += symbols[k] * strides[k];
  }
  std::vector<double> probs(n, 0.0);
  probs[flat] = 1.0;
  return JointPMF(std::move(axes), std::move(probs));
}

VarList JointPMF::labels() const {
  VarList out;
  for (const auto& a : axes_) out.push_back(a.name());
  return out;
}

bool JointPMF::has_axis(std::string_view label) const noexcept {
  return std::any_of(axes_.begin(), axes_.end(), [&](const Alphabet& a) { return a.name() == label; });
}

std::size_t JointPMF::axis_index(std::string_view label) const {
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (axes_[k].name() == label) return k;
  throw UnknownVariable(std::string(label));
}

std::size_t JointPMF::flat_index(std::span<const std::size_t> symbols) const {
  if (symbols.size() != axes_.size()) throw InputError("symbol tuple has wrong rank");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    if (symbols[k] >= axes_[k].size()) throw InputError("symbol index out of range");
    flat += symbols[k] * strides_[k];
  }
  return flat;
}

void JointPMF::unravel(std::size_t flat, std::span<std::size_t> symbols) const {
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    symbols[k] = flat / strides_[k];
    flat %= strides_[k];
  }
}

JointPMF JointPMF::reorder(const VarList& order) const {
  if (order.size() != axes_.size()) throw InvalidQuery("reorder must name every axis once");
  require_unique(order);
  const auto idx = resolve(*this, order);
  std::vector<Alphabet> axes;
  for (auto k : idx) axes.push_back(axes_[k]);
  return JointPMF(std::move(axes), project(*this, idx));
}

// ---------------------------------------------------------------------------------------------
// ConditionalPMF

ConditionalPMF::ConditionalPMF(std::vector<Alphabet> given_axes, Alphabet out_axis,
                               std::vector<double> rows, std::vector<bool> defined)
    : given_(std::move(given_axes)), out_(std::move(out_axis)), rows_(std::move(rows)),
      defined_(std::move(defined)) {
  const std::size_t n_rows = state_space(given_);
  if (rows_.size() != n_rows * out_.size())
    throw DistributionError("channel '" + out_.name() + "' table has wrong size");
  if (defined_.empty()) defined_.assign(n_rows, true);
  if (defined_.size() != n_rows) throw DistributionError("definedness mask has wrong size");
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto rr = row(r);
    for (double v : rr)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw DistributionError("channel '" + out_.name() + "' row " + std::to_string(r) +
                                " has a negative or non-finite entry");
    const double total = stable_sum(rr);
    if (std::abs(total - 1.0) > kSumTolerance)
      throw DistributionError("channel '" + out_.name() + "' row " + std::to_string(r) +
                              " sums to " + std::to_string(total));
  }
}

ConditionalPMF ConditionalPMF::identity(const Alphabet& in, std::string out_name) {
  const std::size_t k = in.size();
  std::vector<double> rows(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) rows[i * k + i] = 1.0;
  return ConditionalPMF({in}, in.renamed(std::move(out_name)), std::move(rows));
}

ConditionalPMF ConditionalPMF::constant(const Alphabet& in, Alphabet out, std::size_t symbol) {
  if (symbol >= out.size()) throw InputError("constant symbol out of range");
  std::vector<double> rows(in.size() * out.size(), 0.0);
  for (std::size_t i = 0; i < in.size(); ++i) rows[i * out.size() + symbol] = 1.0;
  return ConditionalPMF({in}, std::move(out), std::move(rows));
}

ConditionalPMF ConditionalPMF::symmetric(const Alphabet& in, std::string out_name,
                                         double crossover) {
  const std::size_t k = in.size();
  if (crossover < 0.0 || crossover > 1.0) throw InputError("crossover must lie in [0,1]");
  if (k == 1) return identity(in, std::move(out_name));
  std::vector<double> rows(k * k, crossover / static_cast<double>(k - 1));
  for (std::size_t i = 0; i < k; ++i) rows[i * k + i] = 1.0 - crossover;
  return ConditionalPMF({in}, in.renamed(std::move(out_name)), std::move(rows));
}

std::size_t ConditionalPMF::row_index(std::span<const std::size_t> given_symbols) const {
  if (given_symbols.size() != given_.size()) throw InputError("given tuple has wrong rank");
  std::size_t r = 0;
  for (std::size_t k = 0; k < given_.size(); ++k) {
    if (given_symbols[k] >= given_[k].size()) throw InputError("given symbol out of range");
    r = r * given_[k].size() + given_symbols[k];
  }
  return r;
}

ConditionalPMF ConditionalPMF::with_out_name(std::string name) const {
  return ConditionalPMF(given_, out_.renamed(std::move(name)), rows_, defined_);
}

// ---------------------------------------------------------------------------------------------
// Operations

std::vector<double> marginal_table(const JointPMF& p, const VarList& ordered) {
  require_unique(ordered);
  return project(p, resolve(p, ordered));
}

JointPMF marginalize(const JointPMF& p, const VarList& keep) {
  if (keep.empty()) throw InvalidQuery("marginalize needs at least one variable to keep");
  require_unique(keep);
  auto idx = resolve(p, keep);
  std::sort(idx.begin(), idx.end());
  std::vector<Alphabet> axes;
  for (auto k : idx) axes.push_back(p.axes()[k]);
  return JointPMF(std::move(axes), project(p, idx));
}

ConditionalPMF condition(const JointPMF& p, const VarList& target, const VarList& given) {
  if (target.empty()) throw InvalidQuery("condition needs a target variable");
  require_unique(target);
  require_unique(given);
  require_disjoint(target, given, "condition(target, given)");
  const auto t_idx = resolve(p, target);
  const auto g_idx = resolve(p, given);

  std::vector<std::size_t> both(g_idx);
  both.insert(both.end(), t_idx.begin(), t_idx.end());
  const auto joint = project(p, both);

  std::vector<Alphabet> given_axes, target_axes;
  for (auto k : g_idx) given_axes.push_back(p.axes()[k]);
  for (auto k : t_idx) target_axes.push_back(p.axes()[k]);
  Alphabet out = product_alphabet(target_axes);

  const std::size_t width = out.size();
  const std::size_t n_rows = joint.size() / width;
  std::vector<double> rows(joint.size());
  std::vector<bool> defined(n_rows, true);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const std::span<const double> slice(joint.data() + r * width, width);
    const double mass = stable_sum(slice);
    if (mass > 0.0) {
      for (std::size_t o = 0; o < width; ++o) rows[r * width + o] = slice[o] / mass;
      // Renormalize against rounding so the row invariant holds exactly enough.
      const double s = stable_sum(std::span<const double>(rows.data() + r * width, width));
      for (std::size_t o = 0; o < width; ++o) rows[r * width + o] /= s;
    } else {
      defined[r] = false;
      for (std::size_t o = 0; o < width; ++o) rows[r * width + o] = 1.0 / static_cast<double>(width);
    }
  }
  return ConditionalPMF(std::move(given_axes), std::move(out), std::move(rows), std::move(defined));
}

double entropy(const JointPMF& p, const VarList& vars) {
  InfoMeasures info(p);
  return info.entropy(vars);
}

double mutual_information(const JointPMF& p, const VarList& a, const VarList& b, const VarList& c) {
  InfoMeasures info(p);
  return info.mutual_information(a, b, c);
}

double mutual_information_unclamped(const JointPMF& p, const VarList& a, const VarList& b,
                                    const VarList& c) {
  InfoMeasures info(p);
  return info.mutual_information_unclamped(a, b, c);
}

JointPMF attach_channel(const JointPMF& p, const ConditionalPMF& channel) {
  if (p.has_axis(channel.out_axis().name())) throw DuplicateVariable(channel.out_axis().name());
  std::vector<std::size_t> g_idx;
  for (const auto& g : channel.given_axes()) {
    const auto k = p.axis_index(g.name());
    if (p.axes()[k].size() != g.size())
      throw ModelError("channel '" + channel.out_axis().name() + "' expects |" + g.name() +
                       "| = " + std::to_string(g.size()));
    g_idx.push_back(k);
  }
  const std::size_t width = channel.out_size();
  std::vector<double> probs(p.size() * width);
  std::vector<std::size_t> sym(p.rank()), given(g_idx.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p.unravel(i, sym);
    for (std::size_t k = 0; k < g_idx.size(); ++k) given[k] = sym[g_idx[k]];
    const auto row = channel.row(channel.row_index(given));
    const double px = p.probs()[i];
    for (std::size_t o = 0; o < width; ++o) probs[i * width + o] = px * row[o];
  }
  auto axes = p.axes();
  axes.push_back(channel.out_axis());
  return JointPMF(std::move(axes), std::move(probs));
}

double verify_markov(const JointPMF& p, const VarList& a, const VarList& b, const VarList& c) {
  if (a.empty() || b.empty() || c.empty()) throw InvalidQuery("Markov check needs three nonempty sets");
  return mutual_information(p, a, c, b);
}

// ---------------------------------------------------------------------------------------------
// InfoMeasures

double InfoMeasures::entropy(const VarList& vars) {
  if (vars.empty()) return 0.0;
  require_unique(vars);
  auto idx = resolve(p_, vars);
  std::sort(idx.begin(), idx.end());
  if (auto it = cache_.find(idx); it != cache_.end()) return it->second;
  const double h = idx.size() == p_.rank() ? entropy_bits(p_.probs()) : entropy_bits(project(p_, idx));
  cache_.emplace(std::move(idx), h);
  return h;
}

double InfoMeasures::mutual_information_unclamped(const VarList& a, const VarList& b,
                                                  const VarList& c) {
  if (a.empty() || b.empty()) throw InvalidQuery("I(A;B|C) needs nonempty A and B");
  require_disjoint(a, b, "I(A;B|C)");
  require_disjoint(a, c, "I(A;B|C)");
  require_disjoint(b, c, "I(A;B|C)");
  VarList ac(a), bc(b), abc(a);
  ac.insert(ac.end(), c.begin(), c.end());
  bc.insert(bc.end(), c.begin(), c.end());
  abc.insert(abc.end(), b.begin(), b.end());
  abc.insert(abc.end(), c.begin(), c.end());
  return entropy(ac) + entropy(bc) - entropy(abc) - entropy(c);
}

double InfoMeasures::mutual_information(const VarList& a, const VarList& b, const VarList& c) {
  const double v = mutual_information_unclamped(a, b, c);
  if (v < 0.0 && v >= -kNegativeInfoTolerance) return 0.0;
  return v;
}

namespace {

VarList split_vars(std::string_view text) {
  VarList out;
  std::string current;
  for (char ch : text) {
    if (ch == ',') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else if (ch != ' ') {
      current += ch;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

}  // namespace

double InfoMeasures::operator()(std::string_view expr) {
  const auto open = expr.find('(');
  if (open == std::string_view::npos || expr.back() != ')' || open != 1)
    throw InvalidQuery("cannot parse information term '" + std::string(expr) + "'");
  const char kind = expr[0];
  std::string_view body = expr.substr(2, expr.size() - 3);
  VarList given;
  if (const auto bar = body.find('|'); bar != std::string_view::npos) {
    given = split_vars(body.substr(bar + 1));
    body = body.substr(0, bar);
  }
  if (kind == 'H') {
    const VarList vars = split_vars(body);
    VarList all(vars);
    all.insert(all.end(), given.begin(), given.end());
    return entropy(all) - entropy(given);
  }
  const auto semi = body.find(';');
  if (kind != 'I' || semi == std::string_view::npos)
    throw InvalidQuery("cannot parse information term '" + std::string(expr) + "'");
  return mutual_information(split_vars(body.substr(0, semi)), split_vars(body.substr(semi + 1)),
                            given);
}

// ---------------------------------------------------------------------------------------------

double stable_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double v : probs)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

}  // namespace rdregion
