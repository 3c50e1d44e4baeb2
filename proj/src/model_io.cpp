#include "rdregion/model_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rdregion/errors.hpp"

namespace rdregion {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double parse_number(const json& v, const std::string& where) {
  double x = 0.0;
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    errno = 0;
    char* end = nullptr;
    x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
      throw InputError(where + ": '" + s + "' is not a decimal number");
  } else if (v.is_number()) {
    x = v.get<double>();
  } else {
    throw InputError(where + ": expected a decimal string");
  }
  if (!std::isfinite(x) || x < 0.0) throw InputError(where + ": value must be finite and >= 0");
  return x;
}

std::vector<double> parse_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw InputError(where + ": expected a nonempty array");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(parse_number(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::vector<double>> parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw InputError(where + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < v.size(); ++r) {
    rows.push_back(parse_vector(v[r], where + " row " + std::to_string(r)));
    if (rows.back().size() != rows.front().size())
      throw InputError(where + " row " + std::to_string(r) + " has " + std::to_string(rows.back().size()) +
                       " entries, expected " + std::to_string(rows.front().size()));
  }
  return rows;
}

void normalize(std::vector<double>& p, const std::string& where) {
  double total = stable_sum(p);
  if (std::abs(total - 1.0) > kLoadSlack)
    throw InputError(where + " sums to " + fmt(total) + " (expected 1 within 1e-9)");
  for (auto& v : p) v /= total;
}

ConditionalPMF parse_conditional(const json& v, const std::string& where, const Alphabet& given,
                                 const Alphabet& out) {
  auto rows = parse_matrix(v, where);
  if (rows.size() != given.size())
    throw InputError(where + ": expected " + std::to_string(given.size()) + " rows (one per symbol of " +
                     given.name() + "), got " + std::to_string(rows.size()));
  if (rows.front().size() != out.size())
    throw InputError(where + ": expected " + std::to_string(out.size()) + " columns, got " +
                     std::to_string(rows.front().size()));
  std::vector<double> flat;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    normalize(rows[r], where + " row " + std::to_string(r));
    flat.insert(flat.end(), rows[r].begin(), rows[r].end());
  }
  return ConditionalPMF({given}, out, std::move(flat));
}

Alphabet declared_alphabet(const json& symbols, const std::string& name, std::size_t size) {
  if (!symbols.is_object() || !symbols.contains(name)) return Alphabet::indexed(name, size);
  const json& s = symbols.at(name);
  if (!s.is_array() || s.size() != size)
    throw InputError("symbols." + name + ": expected " + std::to_string(size) + " symbol labels");
  std::vector<std::string> labels;
  for (const auto& e : s) {
    if (!e.is_string()) throw InputError("symbols." + name + ": labels must be strings");
    labels.push_back(e.get<std::string>());
  }
  try {
    return Alphabet(name, std::move(labels));
  } catch (const Error& e) {
    throw InputError("symbols." + name + ": " + e.what());
  }
}

std::size_t row_width(const json& m, const std::string& where) {
  if (!m.is_array() || m.empty() || !m[0].is_array() || m[0].empty())
    throw InputError(where + ": expected an array of rows");
  return m[0].size();
}

SourceModel parse_bayes_net(const json& bn, const json& symbols) {
  if (!bn.is_object()) throw InputError("bayes_net: expected an object");
  static const std::set<std::string> keys = {"p_f", "p_z_given_f", "p_x1_given_z", "p_x2_given_z", "p_x3_given_f"};
  for (const auto& [k, v] : bn.items())
    if (!keys.contains(k)) throw InputError("bayes_net." + k + ": unknown factor");
  for (const auto& k : keys)
    if (!bn.contains(k)) throw InputError("bayes_net." + k + ": missing factor");

  auto pf = parse_vector(bn.at("p_f"), "bayes_net.p_f");
  normalize(pf, "bayes_net.p_f");
  const Alphabet f = declared_alphabet(symbols, var::F, pf.size());
  const Alphabet z = declared_alphabet(symbols, var::Z, row_width(bn.at("p_z_given_f"), "bayes_net.p_z_given_f"));
  const Alphabet x1 = declared_alphabet(symbols, var::X1, row_width(bn.at("p_x1_given_z"), "bayes_net.p_x1_given_z"));
  const Alphabet x2 = declared_alphabet(symbols, var::X2, row_width(bn.at("p_x2_given_z"), "bayes_net.p_x2_given_z"));
  const Alphabet x3 = declared_alphabet(symbols, var::X3, row_width(bn.at("p_x3_given_f"), "bayes_net.p_x3_given_f"));
  BayesNetSpec spec{
      JointPMF({f}, std::move(pf)),
      parse_conditional(bn.at("p_z_given_f"), "bayes_net.p_z_given_f", f, z),
      parse_conditional(bn.at("p_x1_given_z"), "bayes_net.p_x1_given_z", z, x1),
      parse_conditional(bn.at("p_x2_given_z"), "bayes_net.p_x2_given_z", z, x2),
      parse_conditional(bn.at("p_x3_given_f"), "bayes_net.p_x3_given_f", f, x3),
  };
  return assemble_joint(spec);
}

void flatten(const json& v, const std::vector<Alphabet>& axes, std::size_t depth, const std::string& where,
             std::vector<double>& out) {
  if (depth == axes.size()) {
    out.push_back(parse_number(v, where));
    return;
  }
  if (!v.is_array() || v.size() != axes[depth].size())
    throw InputError(where + ": expected " + std::to_string(axes[depth].size()) + " entries along " +
                     axes[depth].name());
  for (std::size_t k = 0; k < v.size(); ++k) flatten(v[k], axes, depth + 1, where + "[" + std::to_string(k) + "]", out);
}

JointPMF parse_joint(const json& vars, const json& joint) {
  if (!vars.is_array() || vars.empty()) throw InputError("variables: expected a nonempty array");
  std::vector<Alphabet> axes;
  std::set<std::string> seen;
  std::size_t total = 1;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const std::string where = "variables[" + std::to_string(k) + "]";
    const json& v = vars[k];
    if (!v.is_object() || !v.contains("name") || !v.at("name").is_string())
      throw InputError(where + ": expected {\"name\": ..., \"symbols\": [...]}");
    const std::string name = v.at("name").get<std::string>();
    if (!seen.insert(name).second) throw InputError(where + ": duplicate variable '" + name + "'");
    try {
      if (v.contains("symbols")) {
        if (!v.at("symbols").is_array()) throw InputError(where + ".symbols: expected an array");
        std::vector<std::string> labels;
        for (const auto& s : v.at("symbols")) {
          if (!s.is_string()) throw InputError(where + ".symbols: labels must be strings");
          labels.push_back(s.get<std::string>());
        }
        axes.emplace_back(name, std::move(labels));
      } else if (v.contains("size") && v.at("size").is_number_unsigned()) {
        axes.push_back(Alphabet::indexed(name, v.at("size").get<std::size_t>()));
      } else {
        throw InputError(where + ": needs \"symbols\" or a positive \"size\"");
      }
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      throw InputError(where + ": " + e.what());
    }
    total *= axes.back().size();
    if (total > kMaxStateSpace) throw InputError("joint: state space exceeds " + std::to_string(kMaxStateSpace));
  }
  std::vector<double> probs;
  if (joint.is_array() && joint.size() == total && (joint.empty() || !joint[0].is_array())) {
    probs = parse_vector(joint, "joint");
  } else {
    flatten(joint, axes, 0, "joint", probs);
  }
  normalize(probs, "joint");
  return JointPMF(std::move(axes), std::move(probs));
}

std::vector<DistortionMeasure> parse_distortions(const json& d, const JointPMF& joint) {
  if (!d.is_object()) throw InputError("distortions: expected an object keyed by variable name");
  std::vector<DistortionMeasure> out;
  for (const auto& [name, m] : d.items()) {
    const std::string where = "distortions." + name;
    if (!joint.has_axis(name)) throw InputError(where + ": unknown variable");
    const Alphabet& a = joint.axis(name);
    const auto rows = parse_matrix(m, where);
    if (rows.size() != a.size())
      throw InputError(where + ": expected " + std::to_string(a.size()) + " rows, got " + std::to_string(rows.size()));
    const std::size_t k = rows.front().size();
    const Alphabet recon = k == a.size() ? a.renamed(name + "_hat") : Alphabet::indexed(name + "_hat", k);
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    out.emplace_back(a, recon, std::move(flat));
  }
  return out;
}

}  // namespace

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

TestChannelTriple parse_channels(const json& doc, const SourceModel& model) {
  const json& ch = doc.is_object() && doc.contains("channels") ? doc.at("channels") : doc;
  if (!ch.is_object()) throw InputError("channels: expected an object with W1, W2, W3");
  for (const auto& [k, v] : ch.items())
    if (k != var::W1 && k != var::W2 && k != var::W3) throw InputError("channels." + k + ": unknown channel");
  std::vector<ConditionalPMF> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& name = var::kAuxiliaries[i];
    const std::string where = "channels." + name;
    if (!ch.contains(name)) throw InputError(where + ": missing");
    const Alphabet w = Alphabet::indexed(name, row_width(ch.at(name), where));
    out.push_back(parse_conditional(ch.at(name), where, model.source_alphabet(i), w));
  }
  return {out[0], out[1], out[2]};
}

TestChannelTriple load_channels(const std::filesystem::path& path, const SourceModel& model) {
  const json doc = read_json(path);
  if (doc.is_object() && doc.contains("schema_version") && doc.at("schema_version") != kSchemaVersion)
    throw InputError(path.string() + ": unsupported schema_version");
  try {
    return parse_channels(doc, model);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

ModelFile parse_model(const json& doc) {
  if (!doc.is_object()) throw InputError("model: expected a JSON object");
  static const std::set<std::string> keys = {"schema_version", "name", "description", "bayes_net", "variables",
                                             "joint", "symbols", "distortions", "channels"};
  for (const auto& [k, v] : doc.items())
    if (!keys.contains(k)) throw InputError(k + ": unknown field");
  if (!doc.contains("schema_version")) throw InputError("schema_version: missing");
  if (doc.at("schema_version") != kSchemaVersion)
    throw InputError("schema_version: unsupported value " + doc.at("schema_version").dump() + " (expected 1)");
  const bool has_bn = doc.contains("bayes_net");
  const bool has_joint = doc.contains("joint") || doc.contains("variables");
  if (has_bn == has_joint) throw InputError("model: exactly one of \"bayes_net\" or \"joint\" is required");

  std::optional<SourceModel> source;
  std::optional<JointPMF> joint;
  if (has_bn) {
    source = parse_bayes_net(doc.at("bayes_net"), doc.value("symbols", json::object()));
    joint = source->joint();
  } else {
    if (!doc.contains("variables") || !doc.contains("joint"))
      throw InputError("joint: needs both \"variables\" and \"joint\"");
    joint = parse_joint(doc.at("variables"), doc.at("joint"));
    const auto labels = joint->labels();
    if (std::set<std::string>(labels.begin(), labels.end()) ==
        std::set<std::string>(var::kSourceOrder.begin(), var::kSourceOrder.end()))
      source = SourceModel(*joint);
  }
  ModelFile file{*joint, source, std::nullopt, {}};
  if (doc.contains("distortions")) file.distortions = parse_distortions(doc.at("distortions"), *joint);
  if (doc.contains("channels")) {
    if (!source) throw InputError("channels: only valid for five-variable source models");
    file.channels = parse_channels(doc.at("channels"), *source);
  }
  return file;
}

ModelFile load_model(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return parse_model(doc);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

DistortionMeasure distortion_for(const ModelFile& model, const Alphabet& source) {
  for (const auto& d : model.distortions)
    if (d.source().name() == source.name()) return d;
  return DistortionMeasure::hamming(source);
}

}  // namespace rdregion
