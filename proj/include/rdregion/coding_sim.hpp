#pragma once

// Finite-blocklength Monte Carlo of the random-binning scheme and the three-channel Markov
// lemma experiment.
//
// RNG streams per trial: 0 source letters, 1..3 codeword of encoder m (indexed by word),
// 4..6 bin hash of encoder m (indexed by word; unused when R = R'), 7 componentwise channel
// draws.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rdregion/execution.hpp"
#include "rdregion/prob.hpp"
#include "rdregion/rate_region.hpp"
#include "rdregion/source_model.hpp"

namespace rdregion {

inline constexpr std::size_t kMaxCodebookWords = std::size_t{1} << 20;
inline constexpr std::size_t kMaxBlocklength = 2000;
inline constexpr std::size_t kMaxDecoderCandidates = std::size_t{1} << 24;
inline constexpr double kTypicalitySlack = 1e-12;

struct TypicalityParams {
  double epsilon = 0.1;
  std::size_t n = 100;
};

void validate(const TypicalityParams& params);

// Robust typicality: |count(a)/n - p(a)| <= epsilon p(a) for every joint symbol a, and no
// occurrences of zero-probability symbols. One sequence per axis of p, in axis order.
bool is_typical(std::span<const std::vector<std::size_t>> sequences, const JointPMF& p,
                const TypicalityParams& params);

// Precomputed count bounds for repeated checks against one law at fixed n.
class TypicalityTest {
 public:
  TypicalityTest(std::span<const double> probs, const TypicalityParams& params);

  std::size_t cells() const noexcept { return lo_.size(); }
  // `cells_of_letters` holds the flat joint-symbol index of each of the n letters.
  bool operator()(std::span<const std::uint32_t> cells_of_letters, std::span<std::uint32_t> counts) const;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

struct MarkovLemmaResult {
  std::size_t trials = 0;
  std::size_t accepted = 0;  // source tuples that were typical
  std::size_t typical = 0;   // accepted trials whose full 8-tuple was typical
  double fraction = 0.0;     // typical / accepted
};

MarkovLemmaResult markov_lemma_trial(const SourceModel& model, const TestChannelTriple& channels,
                                     const TypicalityParams& params, std::size_t trials,
                                     std::uint64_t seed, Execution exec = Execution::parallel);

struct BinningRates {
  std::array<double, 3> rate{};        // R_m: bin index rate
  std::array<double, 3> rate_prime{};  // R'_m: codebook rate
};

struct SimReport {
  std::size_t trials = 0;
  std::size_t event1_count = 0;  // some encoder found no typical codeword
  std::size_t event2_count = 0;  // chosen codewords not jointly typical with (Z, F)
  std::size_t event3_count = 0;  // another triple in the received bins is also typical
  std::size_t decode_failures = 0;
  std::size_t successes = 0;
  // Mean per-letter distortion over unique-success trials; absent with no successes.
  std::optional<std::array<double, 3>> empirical_distortions;
  std::optional<std::array<double, 3>> distortion_std_errors;
  std::array<double, 3> event_rates{};  // event counts / trials
  double error_rate = 0.0;              // decode_failures / trials

  bool operator==(const SimReport&) const = default;
};

struct CodebookShape {
  std::array<std::size_t, 3> word_bits{};  // ceil(n R'_m)
  std::array<std::size_t, 3> bin_bits{};   // ceil(n R_m)
};

// Validates the resource caps; throws ConfigError naming the cap that is exceeded.
CodebookShape codebook_shape(const BinningRates& rates, const TypicalityParams& params);

SimReport run_binning_trials(const SourceModel& model, const TestChannelTriple& channels,
                             const BinningRates& rates, const TypicalityParams& params,
                             std::size_t trials, std::uint64_t seed,
                             const std::vector<DistortionMeasure>& distortions = {},
                             Execution exec = Execution::parallel);

}  // namespace rdregion
