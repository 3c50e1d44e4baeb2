#pragma once

// JSON model files (schema_version 1).
//
//   {"schema_version": 1,
//    "bayes_net": {"p_f": [...], "p_z_given_f": [[...], ...], "p_x1_given_z": ..., "p_x2_given_z": ...,
//                  "p_x3_given_f": ...},
//    -- or --
//    "variables": [{"name": "X1", "symbols": ["0", "1"]}, ...], "joint": [...],
//    "symbols": {"X1": ["a", "b"]},                      (optional, bayes_net only)
//    "distortions": {"X1": [[0, 1], [1, 0]], ...},      (optional)
//    "channels": {"W1": [[...], ...], "W2": ..., "W3": ...}}  (optional)
//
// Probabilities are decimal strings (plain JSON numbers are also accepted). Rows and joints
// within 1e-9 of summing to 1 are renormalized; anything further off is rejected.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rdregion/prob.hpp"
#include "rdregion/source_model.hpp"

namespace rdregion {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kLoadSlack = 1e-9;

struct ModelFile {
  JointPMF joint;                             // as declared (any variable names)
  std::optional<SourceModel> source;          // when the variables are X1, X2, X3, Z, F
  std::optional<TestChannelTriple> channels;
  std::vector<DistortionMeasure> distortions;  // one per declared variable with a matrix
};

ModelFile parse_model(const nlohmann::json& doc);
ModelFile load_model(const std::filesystem::path& path);

// Channel triple from {"channels": {...}} (or a bare {"W1": ..., ...} object).
TestChannelTriple parse_channels(const nlohmann::json& doc, const SourceModel& model);
TestChannelTriple load_channels(const std::filesystem::path& path, const SourceModel& model);

// Distortion measure for `source`, or Hamming when the file declares none.
DistortionMeasure distortion_for(const ModelFile& model, const Alphabet& source);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace rdregion
