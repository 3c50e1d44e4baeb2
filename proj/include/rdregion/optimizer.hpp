#pragma once

// Grid search over test channels for rate-distortion frontiers.

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rdregion/execution.hpp"
#include "rdregion/rate_region.hpp"
#include "rdregion/source_model.hpp"

namespace rdregion {

inline constexpr std::size_t kMaxGridChannels = 100'000'000;
inline constexpr std::size_t kMaxGenericTriples = 10'000'000;
inline constexpr double kFeasibilitySlack = 1e-9;
inline constexpr double kTieTolerance = 1e-9;

// Every row-stochastic |X| x w_size matrix with entries in {0, step, 2 step, ..., 1}.
// Index order: row 0 is the most significant digit; within a row, compositions are in
// lexicographic order of their entries.
class ChannelGrid {
 public:
  ChannelGrid(Alphabet input, std::size_t w_size, double grid_step, std::string out_name);

  std::size_t size() const noexcept { return size_; }
  std::size_t rows_per_input() const noexcept { return compositions_.size() / w_size_; }
  std::size_t w_size() const noexcept { return w_size_; }
  std::size_t steps() const noexcept { return steps_; }

  // Row-major |X| x w_size table.
  void fill(std::size_t index, std::span<double> table) const;
  ConditionalPMF channel(std::size_t index) const;

 private:
  Alphabet input_;
  Alphabet output_;
  std::size_t w_size_;
  std::size_t steps_;
  std::vector<double> compositions_;  // rows_per_input x w_size
  std::size_t size_;
};

// Grid step must split [0, 1] into an integer number of steps.
std::size_t grid_steps(double grid_step);

ChannelGrid enumerate_channels(const Alphabet& alphabet, std::size_t w_size, double grid_step,
                               std::string out_name = "W");

struct SearchConfig {
  std::array<std::size_t, 3> w_sizes{2, 2, 2};
  double grid_step = 0.25;
  int refine_iters = 0;
  std::array<double, 3> targets{0.0, 0.0, 0.0};
  Objective objective = Objective::min_sum_rate;
  // One measure per source; empty means Hamming on each source alphabet.
  std::vector<DistortionMeasure> distortions;
};

// Default auxiliary sizes |X_i| + 1.
std::array<std::size_t, 3> default_w_sizes(const SourceModel& model);

struct FrontierPoint {
  RateTriple rates;
  std::array<double, 3> distortions{};
  TestChannelTriple channels;
  BoundForm bound_form = BoundForm::inner;
  RateRegionBounds bounds;
  std::size_t grid_index = 0;  // row-major over the three encoder grids
  bool refined = false;
};

struct TripleEvaluation {
  std::array<double, 3> distortions{};
  RateRegionBounds bounds;
  RateTriple rates;
  bool feasible = false;
};

// Generic evaluation of one triple on the full 8-axis joint: Bayes-optimal decoders,
// expected distortions, then the separable inner bound on network models, the general inner bound otherwise.
TripleEvaluation evaluate_triple(const SourceModel& model, const SearchConfig& cfg,
                                 const TestChannelTriple& channels, bool bayes_net);

// Channels attaining the objective on the grid (one per distinct rate triple, ties within
// 1e-9), sorted by sum rate then grid index. Empty when no triple meets the targets.
std::vector<FrontierPoint> trace_frontier(const SourceModel& model, const SearchConfig& cfg,
                                          Execution exec = Execution::parallel);

// Dyadic local search from `start`; trace holds the objective after each round.
struct RefineResult {
  FrontierPoint point;
  std::vector<double> trace;
};
RefineResult refine_point(const SourceModel& model, const SearchConfig& cfg,
                          const FrontierPoint& start, bool bayes_net);

// Per-encoder view of a network source: p(x_i, s) with s = (z, f) flattened.
class EncoderKernel {
 public:
  EncoderKernel(const SourceModel& model, std::size_t encoder, const DistortionMeasure& d);

  struct Value {
    double distortion;
    double rate;  // max(0, I(X_i;W_i) - I(W_i;Z,F))
  };

  // `channel` is row-major |X_i| x w. Allocation-free.
  Value evaluate(std::span<const double> channel, std::size_t w) const;

  // Evaluates every channel of the grid; OpenMP over grid indices.
  std::vector<Value> sweep(const ChannelGrid& grid, Execution exec) const;

 private:
  std::size_t nx_;
  std::size_t ns_;
  std::size_t nr_;
  std::vector<double> p_xs_;
  std::vector<double> p_x_;
  std::vector<double> cost_;
  double h_x_;
  double h_s_;
};

struct WynerZivConfig {
  std::size_t w_size = 3;
  double grid_step = 0.01;
  std::vector<double> distortion_levels;
};

struct WynerZivPoint {
  double distortion;
  double rate;                // grid minimum of I(X;W) - I(W;Y) among channels meeting D
  std::size_t channel_index;  // lowest grid index attaining it
};

// X is embedded as X1, Y as Z; X2, X3, F are single-symbol constants.
SourceModel wyner_ziv_embedding(const JointPMF& p_xy);

std::vector<WynerZivPoint> wyner_ziv_reduction(const JointPMF& p_xy, const DistortionMeasure& d,
                                               const WynerZivConfig& cfg,
                                               Execution exec = Execution::parallel);

// Crossover of the binary symmetric side-information channel when p_xy is a uniform bit
// observed through a BSC and d is Hamming; nullopt otherwise.
std::optional<double> binary_symmetric_crossover(const JointPMF& p_xy, const DistortionMeasure& d);

// Lower convex envelope of h(p*D) - h(D) together with the point (p, 0).
double wyner_ziv_binary(double crossover, double distortion);

// Lower convex hull of (x, y) points, returned sorted by x.
std::vector<std::pair<double, double>> lower_convex_envelope(
    std::vector<std::pair<double, double>> points);
double envelope_at(const std::vector<std::pair<double, double>>& hull, double x);

double binary_entropy(double p);

}  // namespace rdregion
