#include "rdregion/coding_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <omp.h>

#include "rdregion/errors.hpp"
#include "rdregion/rng.hpp"

namespace rdregion {

void validate(const TypicalityParams& params) {
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0))
    throw ConfigError("typicality epsilon must lie in (0, 1)");
  if (params.n < 1 || params.n > kMaxBlocklength)
    throw ConfigError("blocklength n must lie in [1, " + std::to_string(kMaxBlocklength) + "]");
}

TypicalityTest::TypicalityTest(std::span<const double> probs, const TypicalityParams& params) {
  const double n = static_cast<double>(params.n);
  lo_.reserve(probs.size());
  hi_.reserve(probs.size());
  for (double p : probs) {
    const double band = params.epsilon * p + kTypicalitySlack;
    lo_.push_back(p > 0.0 ? n * (p - band) : 0.0);
    hi_.push_back(p > 0.0 ? n * (p + band) : 0.0);
  }
}

bool TypicalityTest::operator()(std::span<const std::uint32_t> cells_of_letters,
                                std::span<std::uint32_t> counts) const {
  std::fill(counts.begin(), counts.end(), 0u);
  for (std::uint32_t c : cells_of_letters)
    if (static_cast<double>(++counts[c]) > hi_[c]) return false;
  for (std::size_t c = 0; c < lo_.size(); ++c)
    if (static_cast<double>(counts[c]) < lo_[c]) return false;
  return true;
}

bool is_typical(std::span<const std::vector<std::size_t>> sequences, const JointPMF& p,
                const TypicalityParams& params) {
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0) || params.n < 1)
    throw ConfigError("typicality needs epsilon in (0, 1) and n >= 1");
  if (sequences.size() != p.rank())
    throw InputError("expected " + std::to_string(p.rank()) + " sequences, got " +
                     std::to_string(sequences.size()));
  for (std::size_t k = 0; k < sequences.size(); ++k) {
    if (sequences[k].size() != params.n)
      throw InputError("sequence for '" + p.axes()[k].name() + "' has length " +
                       std::to_string(sequences[k].size()) + ", expected " + std::to_string(params.n));
    for (std::size_t s : sequences[k])
      if (s >= p.axes()[k].size())
        throw InputError("symbol " + std::to_string(s) + " out of range for '" + p.axes()[k].name() + "'");
  }
  std::vector<std::uint32_t> cells(params.n, 0);
  for (std::size_t j = 0; j < params.n; ++j) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < sequences.size(); ++k) flat += sequences[k][j] * p.stride(k);
    cells[j] = static_cast<std::uint32_t>(flat);
  }
  std::vector<std::uint32_t> counts(p.size());
  return TypicalityTest(p.probs(), params)(cells, counts);
}

// ---------------------------------------------------------------------------------------------

namespace {

struct Sampler {
  std::vector<double> cdf;
  std::size_t last = 0;

  explicit Sampler(std::span<const double> probs) {
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      cdf.push_back(acc);
      if (probs[k] > 0.0) last = k;
    }
  }
  std::size_t operator()(SplitMix64& rng) const { return rng.categorical(cdf, last); }
};

// Everything a trial needs, derived once from (model, channels).
struct SimContext {
  std::size_t n;
  std::array<std::size_t, 3> nx{}, nw{};
  std::size_t nz, nf;
  Sampler source;
  std::vector<std::array<std::uint32_t, 5>> source_symbols;  // per source cell
  std::array<std::vector<Sampler>, 3> channel_rows;           // per x
  std::array<std::vector<double>, 3> word_law;                // p(w_m)
  std::array<std::vector<double>, 3> pair_law;                // p(x_m, w_m)
  std::vector<double> decode_law;                             // p(w1,w2,w3,z,f)
  std::vector<double> full_law;                               // canonical 8-axis order
  std::vector<double> source_law;

  SimContext(const SourceModel& model, const TestChannelTriple& channels, std::size_t n_)
      : n(n_),
        nz(model.joint().axis(var::Z).size()),
        nf(model.joint().axis(var::F).size()),
        source(model.joint().probs()) {
    const JointPMF extended = extend_with_test_channels(model, channels);
    for (std::size_t m = 0; m < 3; ++m) {
      nx[m] = model.source_alphabet(m).size();
      nw[m] = channels[m].out_size();
      for (std::size_t x = 0; x < nx[m]; ++x) channel_rows[m].emplace_back(channels[m].row(x));
      word_law[m] = marginal_table(extended, {var::kAuxiliaries[m]});
      pair_law[m] = marginal_table(extended, {var::kSources[m], var::kAuxiliaries[m]});
    }
    decode_law = marginal_table(extended, var::kObserved);
    full_law.assign(extended.probs().begin(), extended.probs().end());
    source_law.assign(model.joint().probs().begin(), model.joint().probs().end());
    std::array<std::size_t, 5> sym{};
    for (std::size_t c = 0; c < model.joint().size(); ++c) {
      model.joint().unravel(c, sym);
      source_symbols.push_back({static_cast<std::uint32_t>(sym[0]), static_cast<std::uint32_t>(sym[1]),
                                static_cast<std::uint32_t>(sym[2]), static_cast<std::uint32_t>(sym[3]),
                                static_cast<std::uint32_t>(sym[4])});
    }
  }

  // Source letters as cells of the 5-axis joint.
  void sample_source(SplitMix64& rng, std::vector<std::uint32_t>& cells) const {
    cells.resize(n);
    for (auto& c : cells) c = static_cast<std::uint32_t>(source(rng));
  }

  std::uint32_t sym(std::uint32_t source_cell, std::size_t axis) const {
    return source_symbols[source_cell][axis];
  }

  std::size_t side_cell(std::uint32_t source_cell) const {
    return sym(source_cell, 3) * nf + sym(source_cell, 4);
  }
};

template <class Body>
void for_trials(std::size_t trials, Execution exec, Body&& body) {
  std::exception_ptr error;
  const auto count = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::parallel)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    try {
      body(static_cast<std::size_t>(t));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

MarkovLemmaResult markov_lemma_trial(const SourceModel& model, const TestChannelTriple& channels,
                                     const TypicalityParams& params, std::size_t trials,
                                     std::uint64_t seed, Execution exec) {
  validate(params);
  if (trials == 0) throw ConfigError("need at least one trial");
  const SimContext ctx(model, channels, params.n);
  const TypicalityTest source_test(ctx.source_law, params);
  const TypicalityTest full_test(ctx.full_law, params);
  const std::size_t w_block = ctx.nw[0] * ctx.nw[1] * ctx.nw[2];

  struct Outcome {
    bool accepted = false;
    bool typical = false;
  };
  std::vector<Outcome> outcomes(trials);
  for_trials(trials, exec, [&](std::size_t t) {
    std::vector<std::uint32_t> cells, full(params.n), counts(ctx.full_law.size());
    SplitMix64 src(derive_key(seed, t, 0));
    ctx.sample_source(src, cells);
    if (!source_test(cells, counts)) return;
    outcomes[t].accepted = true;
    SplitMix64 ch(derive_key(seed, t, 7));
    for (std::size_t j = 0; j < params.n; ++j) {
      std::size_t w = 0;
      for (std::size_t m = 0; m < 3; ++m)
        w = w * ctx.nw[m] + ctx.channel_rows[m][ctx.sym(cells[j], m)](ch);
      full[j] = static_cast<std::uint32_t>(cells[j] * w_block + w);
    }
    outcomes[t].typical = full_test(full, counts);
  });

  MarkovLemmaResult r;
  r.trials = trials;
  for (const auto& o : outcomes) {
    r.accepted += o.accepted;
    r.typical += o.typical;
  }
  if (r.accepted == 0)
    throw InsufficientSamples("no typical source tuple in " + std::to_string(trials) +
                                  " trials at n = " + std::to_string(params.n),
                              0.0);
  r.fraction = static_cast<double>(r.typical) / static_cast<double>(r.accepted);
  return r;
}

// ---------------------------------------------------------------------------------------------

CodebookShape codebook_shape(const BinningRates& rates, const TypicalityParams& params) {
  validate(params);
  CodebookShape shape;
  std::size_t candidate_bits = 0;
  const double n = static_cast<double>(params.n);
  for (std::size_t m = 0; m < 3; ++m) {
    const double r = rates.rate[m], rp = rates.rate_prime[m];
    const std::string enc = "encoder " + std::to_string(m + 1);
    if (!(r >= 0.0) || !(rp >= 0.0) || !std::isfinite(r) || !std::isfinite(rp))
      throw ConfigError(enc + ": rates must be finite and >= 0");
    if (r > rp + 1e-12) throw ConfigError(enc + ": bin rate R exceeds codebook rate R'");
    const double word_bits = std::ceil(n * rp - 1e-9);
    const double bin_bits = std::min(std::ceil(n * r - 1e-9), word_bits);
    if (word_bits > 20.0)
      throw ConfigError(enc + ": codebook cap of 2^20 words exceeded (ceil(n R') = " +
                        std::to_string(static_cast<long long>(word_bits)) + ")");
    shape.word_bits[m] = static_cast<std::size_t>(std::max(0.0, word_bits));
    shape.bin_bits[m] = static_cast<std::size_t>(std::max(0.0, bin_bits));
    candidate_bits += shape.word_bits[m] - shape.bin_bits[m];
  }
  if (candidate_bits > 24)
    throw ConfigError("decoder candidate cap of 2^24 triples per received bin triple exceeded (" +
                      std::to_string(candidate_bits) + " bits of bin occupancy)");
  return shape;
}

SimReport run_binning_trials(const SourceModel& model, const TestChannelTriple& channels,
                             const BinningRates& rates, const TypicalityParams& params,
                             std::size_t trials, std::uint64_t seed,
                             const std::vector<DistortionMeasure>& distortions, Execution exec) {
  const CodebookShape shape = codebook_shape(rates, params);
  if (trials == 0) throw ConfigError("need at least one trial");
  const SimContext ctx(model, channels, params.n);
  const std::size_t n = params.n;

  std::vector<DistortionMeasure> dists = distortions;
  if (dists.empty())
    for (std::size_t m = 0; m < 3; ++m) dists.push_back(DistortionMeasure::hamming(model.source_alphabet(m)));
  if (dists.size() != 3) throw ConfigError("need one distortion measure per source");
  const JointPMF extended = extend_with_test_channels(model, channels);
  std::array<std::vector<long>, 3> decoder;
  for (std::size_t m = 0; m < 3; ++m)
    decoder[m] = optimal_decoder(extended, var::kSources[m], dists[m]).table;

  std::array<TypicalityTest, 3> pair_test = {TypicalityTest(ctx.pair_law[0], params),
                                             TypicalityTest(ctx.pair_law[1], params),
                                             TypicalityTest(ctx.pair_law[2], params)};
  const TypicalityTest decode_test(ctx.decode_law, params);
  std::array<Sampler, 3> word = {Sampler(ctx.word_law[0]), Sampler(ctx.word_law[1]), Sampler(ctx.word_law[2])};
  const std::size_t side = ctx.nz * ctx.nf;

  enum class Kind { event1, event2, event3, success };
  struct Outcome {
    Kind kind = Kind::event1;
    std::array<double, 3> distortion{};
  };
  std::vector<Outcome> outcomes(trials);

  for_trials(trials, exec, [&](std::size_t t) {
    std::vector<std::uint32_t> cells, letters(n), counts(ctx.decode_law.size());
    SplitMix64 src(derive_key(seed, t, 0));
    ctx.sample_source(src, cells);

    const auto make_word = [&](std::size_t m, std::size_t s, std::vector<std::uint32_t>& w) {
      SplitMix64 rng(derive_key(seed, t, 1 + m, s));
      w.resize(n);
      for (auto& v : w) v = static_cast<std::uint32_t>(word[m](rng));
    };
    // R = R' means no binning compression: every codeword is its own bin.
    const auto bin_of = [&](std::size_t m, std::size_t s) -> std::uint64_t {
      if (shape.bin_bits[m] == shape.word_bits[m]) return s;
      const std::uint64_t mask = (std::uint64_t{1} << shape.bin_bits[m]) - 1;
      return derive_key(seed, t, 4 + m, s) & mask;
    };

    // Encoders: lowest-index codeword jointly typical with the source block.
    std::array<std::size_t, 3> chosen{};
    std::array<std::vector<std::uint32_t>, 3> words;
    for (std::size_t m = 0; m < 3; ++m) {
      const std::size_t size = std::size_t{1} << shape.word_bits[m];
      bool found = false;
      for (std::size_t s = 0; s < size && !found; ++s) {
        make_word(m, s, words[m]);
        for (std::size_t j = 0; j < n; ++j)
          letters[j] = static_cast<std::uint32_t>(ctx.sym(cells[j], m) * ctx.nw[m] + words[m][j]);
        if (pair_test[m](letters, counts)) {
          chosen[m] = s;
          found = true;
        }
      }
      if (!found) {
        outcomes[t].kind = Kind::event1;
        return;
      }
    }

    const auto decode_cells = [&](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                                  const std::vector<std::uint32_t>& c) {
      for (std::size_t j = 0; j < n; ++j)
        letters[j] = static_cast<std::uint32_t>(((a[j] * ctx.nw[1] + b[j]) * ctx.nw[2] + c[j]) * side +
                                                ctx.side_cell(cells[j]));
      return decode_test(letters, counts);
    };
    if (!decode_cells(words[0], words[1], words[2])) {
      outcomes[t].kind = Kind::event2;
      return;
    }

    // Decoder: scan the received bins in lexicographic (s1, s2, s3) order.
    std::array<std::vector<std::vector<std::uint32_t>>, 3> members;
    for (std::size_t m = 0; m < 3; ++m) {
      const std::uint64_t target = bin_of(m, chosen[m]);
      const std::size_t size = std::size_t{1} << shape.word_bits[m];
      for (std::size_t s = 0; s < size; ++s)
        if (bin_of(m, s) == target) {
          members[m].emplace_back();
          make_word(m, s, members[m].back());
        }
    }
    std::size_t typical_triples = 0;
    for (const auto& a : members[0])
      for (const auto& b : members[1])
        for (const auto& c : members[2])
          if (decode_cells(a, b, c) && ++typical_triples == 2) {
            outcomes[t].kind = Kind::event3;
            return;
          }

    // Unique success: the decoded triple is the encoders' triple.
    outcomes[t].kind = Kind::success;
    for (std::size_t m = 0; m < 3; ++m) {
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t obs = ((words[0][j] * ctx.nw[1] + words[1][j]) * ctx.nw[2] + words[2][j]) * side +
                                ctx.side_cell(cells[j]);
        total += dists[m](ctx.sym(cells[j], m), static_cast<std::size_t>(decoder[m][obs]));
      }
      outcomes[t].distortion[m] = total / static_cast<double>(n);
    }
  });

  SimReport r;
  r.trials = trials;
  std::array<double, 3> sum{}, sum_sq{};
  for (const auto& o : outcomes) {
    switch (o.kind) {
      case Kind::event1: ++r.event1_count; break;
      case Kind::event2: ++r.event2_count; break;
      case Kind::event3: ++r.event3_count; break;
      case Kind::success:
        ++r.successes;
        for (std::size_t m = 0; m < 3; ++m) {
          sum[m] += o.distortion[m];
          sum_sq[m] += o.distortion[m] * o.distortion[m];
        }
        break;
    }
  }
  r.decode_failures = r.event1_count + r.event2_count + r.event3_count;
  const double tr = static_cast<double>(trials);
  r.event_rates = {r.event1_count / tr, r.event2_count / tr, r.event3_count / tr};
  r.error_rate = static_cast<double>(r.decode_failures) / tr;
  if (r.successes > 0) {
    const double k = static_cast<double>(r.successes);
    std::array<double, 3> mean{}, se{};
    for (std::size_t m = 0; m < 3; ++m) {
      mean[m] = sum[m] / k;
      const double var = r.successes > 1 ? std::max(0.0, (sum_sq[m] - k * mean[m] * mean[m]) / (k - 1)) : 0.0;
      se[m] = std::sqrt(var / k);
    }
    r.empirical_distortions = mean;
    r.distortion_std_errors = se;
  }
  return r;
}

}  // namespace rdregion
