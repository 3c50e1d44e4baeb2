#pragma once

// Converts library tables into oracle tables so tests can cross-check values.

#include <algorithm>
#include <vector>

#include "oracle.hpp"
#include "rdregion/prob.hpp"
#include "rdregion/source_model.hpp"

namespace rdtest {

inline oracle::Table to_table(const rdregion::JointPMF& p) {
  oracle::Table t;
  for (const auto& a : p.axes()) t.sizes.push_back(a.size());
  t.p.assign(p.probs().begin(), p.probs().end());
  return t;
}

// Axis positions of `labels` within `p`, for oracle queries.
inline oracle::Index axes_of(const rdregion::JointPMF& p, const rdregion::VarList& labels) {
  oracle::Index out;
  for (const auto& l : labels) out.push_back(p.axis_index(l));
  return out;
}

inline std::vector<double> channel_table(const rdregion::ConditionalPMF& c) {
  return {c.table().begin(), c.table().end()};
}

// Oracle extension of a source model by its three channels (axes X1..F then W1..W3).
inline oracle::Table oracle_extended(const rdregion::SourceModel& m, const rdregion::TestChannelTriple& ch) {
  return oracle::extend(to_table(m.joint()), {channel_table(ch.w1), channel_table(ch.w2), channel_table(ch.w3)},
                        {ch.w1.out_size(), ch.w2.out_size(), ch.w3.out_size()});
}

inline std::vector<std::vector<double>> cost_matrix(const rdregion::DistortionMeasure& d) {
  std::vector<std::vector<double>> c(d.source().size(), std::vector<double>(d.recon().size()));
  for (std::size_t x = 0; x < c.size(); ++x)
    for (std::size_t y = 0; y < c[x].size(); ++y) c[x][y] = d(x, y);
  return c;
}

}  // namespace rdtest
