#include "rdregion/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <omp.h>

#include "rdregion/errors.hpp"

namespace rdregion {

void set_thread_count(int threads) {
  if (threads < 1) throw ConfigError("thread count must be at least 1");
  omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

// ---------------------------------------------------------------------------------------------

std::size_t grid_steps(double grid_step) {
  if (!(grid_step > 0.0) || grid_step > 1.0)
    throw ConfigError("grid step must lie in (0, 1]");
  const double k = std::round(1.0 / grid_step);
  if (std::abs(k * grid_step - 1.0) > 1e-9)
    throw ConfigError("grid step must divide 1 into an integer number of steps");
  return static_cast<std::size_t>(k);
}

namespace {

void compositions(std::size_t parts, std::size_t total, std::vector<std::size_t>& prefix,
                  std::vector<std::size_t>& out) {
  if (parts == 1) {
    out.insert(out.end(), prefix.begin(), prefix.end());
    out.push_back(total);
    return;
  }
  for (std::size_t k = 0; k <= total; ++k) {
    prefix.push_back(k);
    compositions(parts - 1, total - k, prefix, out);
    prefix.pop_back();
  }
}

// Multiplies with saturation at kMaxGridChannels + 1.
std::size_t capped_product(std::size_t a, std::size_t b) {
  constexpr std::size_t cap = kMaxGridChannels + 1;
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap;
  return std::min(a * b, cap);
}

}  // namespace

ChannelGrid::ChannelGrid(Alphabet input, std::size_t w_size, double grid_step, std::string out_name)
    : input_(std::move(input)),
      output_(Alphabet::indexed(std::move(out_name), w_size == 0 ? 1 : w_size)),
      w_size_(w_size),
      steps_(grid_steps(grid_step)) {
  if (w_size_ == 0) throw ConfigError("auxiliary alphabet size must be at least 1");
  // C(steps + w - 1, w - 1) compositions per row.
  std::size_t per_row = 1;
  for (std::size_t j = 1; j < w_size_; ++j) {
    per_row = capped_product(per_row, steps_ + j) / j;
    if (per_row > kMaxGridChannels) break;
  }
  std::size_t total = 1;
  for (std::size_t r = 0; r < input_.size(); ++r) total = capped_product(total, per_row);
  if (per_row > kMaxGridChannels || total > kMaxGridChannels)
    throw ConfigError("channel grid for '" + input_.name() + "' exceeds " +
                      std::to_string(kMaxGridChannels) + " channels; use a coarser step");
  size_ = total;

  std::vector<std::size_t> prefix, counts;
  compositions(w_size_, steps_, prefix, counts);
  compositions_.reserve(counts.size());
  for (std::size_t c : counts)
    compositions_.push_back(static_cast<double>(c) / static_cast<double>(steps_));
}

void ChannelGrid::fill(std::size_t index, std::span<double> table) const {
  const std::size_t per_row = rows_per_input();
  for (std::size_t r = input_.size(); r-- > 0;) {
    const std::size_t digit = index % per_row;
    index /= per_row;
    std::copy_n(compositions_.begin() + static_cast<std::ptrdiff_t>(digit * w_size_), w_size_,
                table.begin() + static_cast<std::ptrdiff_t>(r * w_size_));
  }
}

ConditionalPMF ChannelGrid::channel(std::size_t index) const {
  if (index >= size_) throw InputError("channel grid index out of range");
  std::vector<double> table(input_.size() * w_size_);
  fill(index, table);
  return ConditionalPMF({input_}, output_, std::move(table));
}

ChannelGrid enumerate_channels(const Alphabet& alphabet, std::size_t w_size, double grid_step,
                               std::string out_name) {
  return ChannelGrid(alphabet, w_size, grid_step, std::move(out_name));
}

std::array<std::size_t, 3> default_w_sizes(const SourceModel& model) {
  return {model.source_alphabet(0).size() + 1, model.source_alphabet(1).size() + 1,
          model.source_alphabet(2).size() + 1};
}

// ---------------------------------------------------------------------------------------------

namespace {

std::vector<DistortionMeasure> resolve_distortions(const SourceModel& model, const SearchConfig& cfg) {
  if (cfg.distortions.empty())
    return {DistortionMeasure::hamming(model.source_alphabet(0)),
            DistortionMeasure::hamming(model.source_alphabet(1)),
            DistortionMeasure::hamming(model.source_alphabet(2))};
  if (cfg.distortions.size() != 3) throw ConfigError("need one distortion measure per source");
  for (std::size_t i = 0; i < 3; ++i)
    if (cfg.distortions[i].source().size() != model.source_alphabet(i).size())
      throw ConfigError("distortion measure " + std::to_string(i + 1) +
                        " does not match the source alphabet");
  return cfg.distortions;
}

void validate(const SearchConfig& cfg) {
  for (std::size_t w : cfg.w_sizes)
    if (w == 0) throw ConfigError("auxiliary alphabet sizes must be at least 1");
  for (double d : cfg.targets)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("distortion targets must be >= 0");
  if (cfg.refine_iters < 0) throw ConfigError("refine iterations must be >= 0");
  grid_steps(cfg.grid_step);
}

double primary(const RateTriple& r, Objective objective) {
  switch (objective) {
    case Objective::min_sum_rate: return r.sum();
    case Objective::min_r1: return r.r1;
    case Objective::min_r2: return r.r2;
    case Objective::min_r3: return r.r3;
  }
  return r.sum();
}

long long tie_key(double v) { return std::llround(v * 1e9); }

struct Candidate {
  RateTriple rates;
  std::size_t index;
};

// Keeps triples within kTieTolerance of the best primary objective, then within kTieTolerance
// of the best sum among those; one representative (lowest grid index) per distinct rate triple.
std::vector<Candidate> select(std::vector<Candidate> cands, Objective objective) {
  if (cands.empty()) return cands;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) best = std::min(best, primary(c.rates, objective));
  std::erase_if(cands, [&](const Candidate& c) { return primary(c.rates, objective) > best + kTieTolerance; });
  double best_sum = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) best_sum = std::min(best_sum, c.rates.sum());
  std::erase_if(cands, [&](const Candidate& c) { return c.rates.sum() > best_sum + kTieTolerance; });

  std::map<std::tuple<long long, long long, long long>, Candidate> distinct;
  for (const auto& c : cands) {
    const auto key = std::make_tuple(tie_key(c.rates.r1), tie_key(c.rates.r2), tie_key(c.rates.r3));
    auto [it, inserted] = distinct.try_emplace(key, c);
    if (!inserted && c.index < it->second.index) it->second = c;
  }
  std::vector<Candidate> out;
  for (auto& [key, c] : distinct) out.push_back(c);
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return std::pair(tie_key(a.rates.sum()), a.index) < std::pair(tie_key(b.rates.sum()), b.index);
  });
  return out;
}

struct Grids {
  std::array<ChannelGrid, 3> g;
  std::size_t total_capped;  // saturates above kMaxGenericTriples
  std::array<std::size_t, 3> decode(std::size_t index) const {
    const std::size_t i3 = index % g[2].size();
    index /= g[2].size();
    return {index / g[1].size(), index % g[1].size(), i3};
  }
  std::size_t encode(std::array<std::size_t, 3> i) const {
    return (i[0] * g[1].size() + i[1]) * g[2].size() + i[2];
  }
  TestChannelTriple channels(std::size_t index) const {
    const auto i = decode(index);
    return {g[0].channel(i[0]), g[1].channel(i[1]), g[2].channel(i[2])};
  }
};

Grids make_grids(const SourceModel& model, const SearchConfig& cfg) {
  Grids grids{{ChannelGrid(model.source_alphabet(0), cfg.w_sizes[0], cfg.grid_step, var::W1),
               ChannelGrid(model.source_alphabet(1), cfg.w_sizes[1], cfg.grid_step, var::W2),
               ChannelGrid(model.source_alphabet(2), cfg.w_sizes[2], cfg.grid_step, var::W3)},
              0};
  std::size_t total = 1;
  for (const auto& g : grids.g) {
    if (total > kMaxGenericTriples / g.size()) {
      total = kMaxGenericTriples + 1;
      break;
    }
    total *= g.size();
  }
  grids.total_capped = total;
  return grids;
}

FrontierPoint make_point(const SourceModel& model, const SearchConfig& cfg, const Grids& grids,
                         std::size_t index, bool bayes_net) {
  FrontierPoint p{{}, {}, grids.channels(index), BoundForm::inner, {}, index, false};
  const auto ev = evaluate_triple(model, cfg, p.channels, bayes_net);
  p.rates = ev.rates;
  p.distortions = ev.distortions;
  p.bounds = ev.bounds;
  p.bound_form = ev.bounds.form;
  return p;
}

std::vector<Candidate> generic_candidates(const SourceModel& model, const SearchConfig& cfg,
                                          const Grids& grids, bool bayes_net, Execution exec) {
  if (grids.total_capped > kMaxGenericTriples)
    throw ConfigError("generic search over more than " + std::to_string(kMaxGenericTriples) +
                      " channel triples; use a coarser step or smaller auxiliary alphabets");
  const std::size_t total = grids.total_capped;
  std::vector<std::vector<Candidate>> per_thread(exec == Execution::parallel ? omp_get_max_threads() : 1);
  const auto body = [&](std::size_t index, std::vector<Candidate>& out) {
    const auto ev = evaluate_triple(model, cfg, grids.channels(index), bayes_net);
    if (ev.feasible) out.push_back({ev.rates, index});
  };
  if (exec == Execution::parallel) {
    std::exception_ptr error;
#pragma omp parallel
    {
      auto& out = per_thread[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 64)
      for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(total); ++k) {
        try {
          body(static_cast<std::size_t>(k), out);
        } catch (...) {
#pragma omp critical
          if (!error) error = std::current_exception();
        }
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::size_t k = 0; k < total; ++k) body(k, per_thread[0]);
  }
  std::vector<Candidate> all;
  for (auto& v : per_thread) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
  return all;
}

// On network sources every encoder's distortion and separable rate depend on its own channel
// only, so the search splits into three independent sweeps; only near-optimal channels of each
// encoder can appear in a selected triple.
std::vector<Candidate> separable_candidates(const SourceModel& model, const SearchConfig& cfg,
                                            const std::vector<DistortionMeasure>& dists,
                                            const Grids& grids, Execution exec) {
  constexpr double kPerEncoderSlack = 3 * kTieTolerance;
  std::array<std::vector<std::pair<double, std::size_t>>, 3> keep;
  for (std::size_t i = 0; i < 3; ++i) {
    const EncoderKernel kernel(model, i, dists[i]);
    const auto values = kernel.sweep(grids.g[i], exec);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : values)
      if (v.distortion <= cfg.targets[i] + kFeasibilitySlack) best = std::min(best, v.rate);
    if (!std::isfinite(best)) return {};
    std::map<long long, std::size_t> lowest;  // one channel per distinct rate
    for (std::size_t k = 0; k < values.size(); ++k)
      if (values[k].distortion <= cfg.targets[i] + kFeasibilitySlack &&
          values[k].rate <= best + kPerEncoderSlack)
        lowest.try_emplace(tie_key(values[k].rate), k);
    for (const auto& [key, k] : lowest) keep[i].emplace_back(values[k].rate, k);
  }
  std::vector<Candidate> cands;
  for (const auto& [r1, i1] : keep[0])
    for (const auto& [r2, i2] : keep[1])
      for (const auto& [r3, i3] : keep[2]) cands.push_back({{r1, r2, r3}, grids.encode({i1, i2, i3})});
  return cands;
}

RateTriple rates_for(const RateRegionBounds& b, Objective objective) {
  return min_rate_point(b, objective);
}

bool better(const RateTriple& a, const RateTriple& b, Objective objective) {
  const double pa = primary(a, objective), pb = primary(b, objective);
  if (pa < pb - 1e-12) return true;
  if (pa > pb + 1e-12) return false;
  return a.sum() < b.sum() - 1e-12;
}

}  // namespace

TripleEvaluation evaluate_triple(const SourceModel& model, const SearchConfig& cfg,
                                 const TestChannelTriple& channels, bool bayes_net) {
  const auto dists = resolve_distortions(model, cfg);
  const JointPMF extended = extend_with_test_channels(model, channels);
  TripleEvaluation ev;
  ev.feasible = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& axis = var::kSources[i];
    const auto rule = optimal_decoder(extended, axis, dists[i]);
    ev.distortions[i] = expected_distortion(extended, rule, dists[i]);
    if (ev.distortions[i] > cfg.targets[i] + kFeasibilitySlack) ev.feasible = false;
  }
  if (bayes_net) {
    InfoMeasures info(extended);
    auto& b = ev.bounds;
    b.r1 = clamp_rate(info("I(X1;W1)") - info("I(W1;Z,F)"));
    b.r2 = clamp_rate(info("I(X2;W2)") - info("I(W2;Z,F)"));
    b.r3 = clamp_rate(info("I(X3;W3)") - info("I(W3;Z,F)"));
    b.r12 = b.r1 + b.r2;
    b.r13 = b.r1 + b.r3;
    b.r23 = b.r2 + b.r3;
    b.r123 = b.r1 + b.r2 + b.r3;
    b.form = BoundForm::corollary4;
  } else {
    ev.bounds = inner_bound(extended);
  }
  ev.rates = rates_for(ev.bounds, cfg.objective);
  return ev;
}

RefineResult refine_point(const SourceModel& model, const SearchConfig& cfg,
                          const FrontierPoint& start, bool bayes_net) {
  RefineResult res{start, {}};
  std::array<std::vector<double>, 3> tables;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto t = start.channels[i].table();
    tables[i].assign(t.begin(), t.end());
  }
  const auto build = [&](std::size_t i, const std::vector<double>& t) {
    const auto& ch = start.channels[i];
    return ConditionalPMF(ch.given_axes(), ch.out_axis(), t);
  };
  for (int k = 1; k <= cfg.refine_iters; ++k) {
    const double delta = cfg.grid_step / std::ldexp(1.0, k);
    for (std::size_t i = 0; i < 3; ++i) {
      const std::size_t w = res.point.channels[i].out_size();
      const std::size_t rows = res.point.channels[i].num_rows();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t a = 0; a < w; ++a)
          for (std::size_t b = 0; b < w; ++b) {
            if (a == b || tables[i][r * w + a] < delta) continue;
            auto trial = tables[i];
            trial[r * w + a] -= delta;
            trial[r * w + b] += delta;
            TestChannelTriple channels = res.point.channels;
            (i == 0 ? channels.w1 : i == 1 ? channels.w2 : channels.w3) = build(i, trial);
            const auto ev = evaluate_triple(model, cfg, channels, bayes_net);
            if (ev.feasible && better(ev.rates, res.point.rates, cfg.objective)) {
              tables[i] = std::move(trial);
              res.point.channels = std::move(channels);
              res.point.rates = ev.rates;
              res.point.distortions = ev.distortions;
              res.point.bounds = ev.bounds;
              res.point.refined = true;
            }
          }
    }
    res.trace.push_back(primary(res.point.rates, cfg.objective));
  }
  return res;
}

std::vector<FrontierPoint> trace_frontier(const SourceModel& model, const SearchConfig& cfg,
                                          Execution exec) {
  validate(cfg);
  const auto dists = resolve_distortions(model, cfg);
  const Grids grids = make_grids(model, cfg);
  const bool bayes_net = check_bn_structure(model, kStructuralTolerance).ok();

  std::vector<Candidate> cands;
  if (exec == Execution::parallel && bayes_net)
    cands = separable_candidates(model, cfg, dists, grids, exec);
  else
    cands = generic_candidates(model, cfg, grids, bayes_net, exec);

  std::vector<FrontierPoint> out;
  for (const auto& c : select(std::move(cands), cfg.objective))
    out.push_back(make_point(model, cfg, grids, c.index, bayes_net));

  if (cfg.refine_iters > 0 && !out.empty()) {
    auto refined = refine_point(model, cfg, out.front(), bayes_net);
    const auto& best = out.front().rates;
    const double gain = primary(best, cfg.objective) - primary(refined.point.rates, cfg.objective);
    const double sum_gain = best.sum() - refined.point.rates.sum();
    if (gain > kTieTolerance || (gain >= -kTieTolerance && sum_gain > kTieTolerance))
      out = {std::move(refined.point)};
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

EncoderKernel::EncoderKernel(const SourceModel& model, std::size_t encoder, const DistortionMeasure& d)
    : nx_(model.source_alphabet(encoder).size()),
      ns_(model.joint().axis(var::Z).size() * model.joint().axis(var::F).size()),
      nr_(d.recon().size()),
      p_xs_(marginal_table(model.joint(), {var::kSources.at(encoder), var::Z, var::F})),
      cost_(d.costs().begin(), d.costs().end()) {
  if (d.source().size() != nx_) throw ConfigError("distortion measure does not match the source");
  p_x_.assign(nx_, 0.0);
  std::vector<double> p_s(ns_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t s = 0; s < ns_; ++s) {
      p_x_[x] += p_xs_[x * ns_ + s];
      p_s[s] += p_xs_[x * ns_ + s];
    }
  h_x_ = entropy_bits(p_x_);
  h_s_ = entropy_bits(p_s);
}

namespace {

inline double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

EncoderKernel::Value EncoderKernel::evaluate(std::span<const double> c, std::size_t w) const {
  double h_xw = 0.0;
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t k = 0; k < w; ++k) h_xw += plogp(p_x_[x] * c[x * w + k]);
  double h_ws = 0.0;
  double distortion = 0.0;
  for (std::size_t k = 0; k < w; ++k) {
    for (std::size_t s = 0; s < ns_; ++s) {
      double q = 0.0;
      for (std::size_t x = 0; x < nx_; ++x) q += p_xs_[x * ns_ + s] * c[x * w + k];
      h_ws += plogp(q);
      if (q <= 0.0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < nr_; ++r) {
        double e = 0.0;
        for (std::size_t x = 0; x < nx_; ++x) e += p_xs_[x * ns_ + s] * c[x * w + k] * cost_[x * nr_ + r];
        best = std::min(best, e);
      }
      distortion += best;
    }
  }
  // I(X;W) - I(W;S) = H(X) - H(X,W) + H(W,S) - H(S).
  return {distortion, clamp_rate(h_x_ - h_xw + h_ws - h_s_)};
}

std::vector<EncoderKernel::Value> EncoderKernel::sweep(const ChannelGrid& grid, Execution exec) const {
  const std::size_t w = grid.w_size();
  std::vector<Value> out(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel if (exec == Execution::parallel)
  {
    std::vector<double> table(nx_ * w);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      grid.fill(static_cast<std::size_t>(k), table);
      out[static_cast<std::size_t>(k)] = evaluate(table, w);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

SourceModel wyner_ziv_embedding(const JointPMF& p_xy) {
  if (p_xy.rank() != 2) throw ModelError("Wyner-Ziv model needs exactly two variables (X, Y)");
  const Alphabet x = p_xy.axes()[0].renamed(var::X1);
  const Alphabet y = p_xy.axes()[1].renamed(var::Z);
  const Alphabet c2 = Alphabet::indexed(var::X2, 1);
  const Alphabet c3 = Alphabet::indexed(var::X3, 1);
  const Alphabet f = Alphabet::indexed(var::F, 1);
  std::vector<double> probs(p_xy.probs().begin(), p_xy.probs().end());
  return SourceModel(JointPMF({x, c2, c3, y, f}, std::move(probs)));
}

std::vector<WynerZivPoint> wyner_ziv_reduction(const JointPMF& p_xy, const DistortionMeasure& d,
                                               const WynerZivConfig& cfg, Execution exec) {
  const SourceModel model = wyner_ziv_embedding(p_xy);
  if (d.source().size() != model.source_alphabet(0).size())
    throw ConfigError("distortion measure does not match the source alphabet");
  const ChannelGrid grid(model.source_alphabet(0), cfg.w_size, cfg.grid_step, var::W1);
  std::vector<double> levels = cfg.distortion_levels;
  std::sort(levels.begin(), levels.end());
  const std::size_t nl = levels.size();
  const std::size_t w = cfg.w_size;

  const EncoderKernel kernel(model, 0, d);
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  const int threads = exec == Execution::parallel ? omp_get_max_threads() : 1;
  std::vector<std::vector<double>> best_rate(static_cast<std::size_t>(threads), std::vector<double>(nl, inf));
  std::vector<std::vector<std::size_t>> best_index(static_cast<std::size_t>(threads), std::vector<std::size_t>(nl, none));
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel num_threads(threads)
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    auto& rate = best_rate[t];
    auto& index = best_index[t];
    std::vector<double> table(model.source_alphabet(0).size() * w);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      grid.fill(static_cast<std::size_t>(k), table);
      const auto v = kernel.evaluate(table, w);
      const auto first = std::lower_bound(levels.begin(), levels.end(), v.distortion - kFeasibilitySlack);
      for (auto it = first; it != levels.end(); ++it) {
        const auto l = static_cast<std::size_t>(it - levels.begin());
        if (v.rate < rate[l]) {  // static schedule: indices increase within a thread
          rate[l] = v.rate;
          index[l] = static_cast<std::size_t>(k);
        }
      }
    }
  }
  std::vector<WynerZivPoint> out;
  for (std::size_t l = 0; l < nl; ++l) {
    WynerZivPoint p{levels[l], inf, none};
    for (std::size_t t = 0; t < best_rate.size(); ++t)
      if (best_rate[t][l] < p.rate || (best_rate[t][l] == p.rate && best_index[t][l] < p.channel_index)) {
        p.rate = best_rate[t][l];
        p.channel_index = best_index[t][l];
      }
    out.push_back(p);
  }
  return out;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

std::optional<double> binary_symmetric_crossover(const JointPMF& p_xy, const DistortionMeasure& d) {
  if (p_xy.rank() != 2 || p_xy.axes()[0].size() != 2 || p_xy.axes()[1].size() != 2) return std::nullopt;
  if (d.recon().size() != 2 || d(0, 0) != 0.0 || d(1, 1) != 0.0 || d(0, 1) != 1.0 || d(1, 0) != 1.0)
    return std::nullopt;
  const auto p = p_xy.probs();  // p(x, y), y fastest
  constexpr double tol = 1e-12;
  if (std::abs(p[0] + p[1] - 0.5) > tol) return std::nullopt;
  if (std::abs(p[1] - p[2]) > tol || std::abs(p[0] - p[3]) > tol) return std::nullopt;
  const double crossover = 2.0 * p[1];
  // Label the side information so that the crossover is at most one half.
  return std::min(crossover, 1.0 - crossover);
}

double wyner_ziv_binary(double p, double D) {
  if (D >= p) return 0.0;
  const auto g = [p](double d) { return binary_entropy(p * (1 - d) + (1 - p) * d) - binary_entropy(d); };
  // Time sharing between (dc, g(dc)) and (p, 0) reaching distortion D.
  const auto shared = [&](double dc) { return (p - D) / (p - dc) * g(dc); };
  constexpr int kCoarse = 20000;
  double best_dc = 0.0, best = shared(0.0);
  for (int k = 1; k <= kCoarse; ++k) {
    const double dc = D * k / kCoarse;
    const double v = shared(dc);
    if (v < best) {
      best = v;
      best_dc = dc;
    }
  }
  double lo = std::max(0.0, best_dc - D / kCoarse), hi = std::min(D, best_dc + D / kCoarse);
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (shared(m1) < shared(m2)) hi = m2; else lo = m1;
  }
  return std::min(best, shared(0.5 * (lo + hi)));
}

std::vector<std::pair<double, double>> lower_convex_envelope(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    if (!hull.empty() && hull.back().first == p.first) continue;  // sorted: keeps the lower y
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross <= 0.0) hull.pop_back(); else break;
    }
    hull.push_back(p);
  }
  return hull;
}

double envelope_at(const std::vector<std::pair<double, double>>& hull, double x) {
  if (hull.empty()) throw InputError("empty envelope");
  if (x <= hull.front().first) return hull.front().second;
  if (x >= hull.back().first) return hull.back().second;
  const auto it = std::upper_bound(hull.begin(), hull.end(), x,
                                   [](double v, const std::pair<double, double>& p) { return v < p.first; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
}

}  // namespace rdregion
