#include "rdregion/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rdregion/coding_sim.hpp"
#include "rdregion/errors.hpp"
#include "rdregion/execution.hpp"
#include "rdregion/model_io.hpp"
#include "rdregion/optimizer.hpp"
#include "rdregion/rate_region.hpp"

namespace rdregion {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

ordered_json residual_list(const ResidualReport& r) {
  ordered_json out = ordered_json::array();
  for (const auto& e : r.residuals) out.push_back({{"name", e.name}, {"residual", num(e.residual)}});
  return out;
}

ordered_json bounds_json(const RateRegionBounds& b) {
  ordered_json j;
  j["form"] = std::string(to_string(b.form));
  j["r1"] = num(b.r1);
  j["r2"] = num(b.r2);
  j["r3"] = num(b.r3);
  j["r12"] = b.r12 ? num(*b.r12) : ordered_json(nullptr);
  j["r13"] = b.r13 ? num(*b.r13) : ordered_json(nullptr);
  j["r23"] = b.r23 ? num(*b.r23) : ordered_json(nullptr);
  j["r123"] = b.r123 ? num(*b.r123) : ordered_json(nullptr);
  return j;
}

// Writes to --out when given, stdout otherwise; the text is complete before anything is written.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError(path + ": cannot open for writing");
  f << text;
  if (!f) throw InputError(path + ": write failed");
}

SourceModel require_source(const ModelFile& file, const std::string& path) {
  if (!file.source) throw InputError(path + ": command needs a model over X1, X2, X3, Z, F");
  return *file.source;
}

std::vector<DistortionMeasure> source_distortions(const ModelFile& file, const SourceModel& model) {
  return {distortion_for(file, model.source_alphabet(0)), distortion_for(file, model.source_alphabet(1)),
          distortion_for(file, model.source_alphabet(2))};
}

std::array<double, 3> triple(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw ConfigError(std::string(what) + " needs exactly three comma-separated values");
  return {v[0], v[1], v[2]};
}

std::vector<double> distortion_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double a = 0, b = 0, s = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec);
    if (!(is >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || !(s > 0) || b < a || !is.eof())
      throw ConfigError("--distortion-grid expects start:stop:step or a comma list");
    for (long k = 0; a + k * s <= b + 1e-12; ++k) out.push_back(std::round((a + k * s) * 1e12) / 1e12);
  } else {
    std::istringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || *end != '\0') throw ConfigError("--distortion-grid: bad value '" + tok + "'");
      out.push_back(v);
    }
  }
  if (out.empty()) throw ConfigError("--distortion-grid is empty");
  for (double d : out)
    if (!(d >= 0.0)) throw ConfigError("--distortion-grid values must be >= 0");
  return out;
}

// ---------------------------------------------------------------------------------------------

struct CheckArgs {
  std::string model;
  double tol = 1e-9;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
  const ModelFile file = load_model(a.model);
  const SourceModel model = require_source(file, a.model);
  const bool have_channels = file.channels.has_value();
  const TestChannelTriple channels = have_channels ? *file.channels : TestChannelTriple::identity(model);

  const auto bn = check_bn_structure(model, a.tol);
  const auto identities = verify_converse_identities(model, channels, a.tol);
  std::vector<std::string> violations;
  for (const auto& v : bn.violations) violations.push_back(v.name);
  for (const auto& v : identities.violations) violations.push_back(v.name);

  ordered_json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "check";
  report["tol"] = num(a.tol);
  report["channels"] = have_channels ? "model" : "identity";
  report["bayes_net_structure"] = residual_list(bn);
  report["converse_identities"] = residual_list(identities);
  if (bn.ok()) {
    const auto c4 = corollary4_bounds(model, channels);
    ResidualReport cross;
    for (const auto& r : c4.cross_terms.residuals) cross.add(r.name, r.residual, a.tol);
    for (const auto& v : cross.violations) violations.push_back(v.name);
    report["corollary4_cross_terms"] = residual_list(cross);
  }
  report["violations"] = violations;
  report["ok"] = violations.empty();
  emit(report.dump(2) + "\n", "", out);
  return violations.empty() ? kExitOk : kExitThreshold;
}

struct RegionArgs {
  std::string model;
  double grid_step = 0.05;
  std::vector<std::size_t> w_sizes;
  std::vector<double> distortion;
  std::string objective = "min_sum_rate";
  int refine = 0;
  std::string out;
};

int cmd_region(const RegionArgs& a, std::ostream& out, std::ostream& err) {
  const ModelFile file = load_model(a.model);
  const SourceModel model = require_source(file, a.model);
  SearchConfig cfg;
  cfg.grid_step = a.grid_step;
  cfg.refine_iters = a.refine;
  cfg.targets = triple(a.distortion, "--distortion");
  cfg.objective = parse_objective(a.objective);
  cfg.distortions = source_distortions(file, model);
  if (a.w_sizes.empty()) {
    cfg.w_sizes = default_w_sizes(model);
  } else {
    if (a.w_sizes.size() != 3) throw ConfigError("--w-sizes needs exactly three comma-separated values");
    cfg.w_sizes = {a.w_sizes[0], a.w_sizes[1], a.w_sizes[2]};
  }
  const auto points = trace_frontier(model, cfg);

  std::ostringstream csv;
  csv << "D1,D2,D3,R1,R2,R3,sum_rate,bound_form";
  for (std::size_t i = 0; i < 3; ++i) {
    const Alphabet& x = model.source_alphabet(i);
    for (std::size_t xs = 0; xs < x.size(); ++xs)
      for (std::size_t w = 0; w < cfg.w_sizes[i]; ++w)
        csv << ",p(" << var::kAuxiliaries[i] << "=" << w << "|" << x.name() << "=" << x.symbol(xs) << ")";
  }
  csv << "\n";
  for (const auto& p : points) {
    for (double d : p.distortions) csv << format_number(d) << ",";
    csv << format_number(p.rates.r1) << "," << format_number(p.rates.r2) << "," << format_number(p.rates.r3)
        << "," << format_number(p.rates.sum()) << "," << to_string(p.bound_form);
    for (std::size_t i = 0; i < 3; ++i)
      for (double v : p.channels[i].table()) csv << "," << format_number(v);
    csv << "\n";
  }
  if (points.empty()) err << "warning: no channel triple on the grid meets the distortion targets\n";
  emit(csv.str(), a.out, out);
  return kExitOk;
}

struct SimulateArgs {
  std::string model;
  std::string channels;
  std::size_t n = 0;
  std::vector<double> rates;
  std::vector<double> rates_prime;
  double epsilon = 0.1;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const ModelFile file = load_model(a.model);
  const SourceModel model = require_source(file, a.model);
  std::optional<TestChannelTriple> channels = file.channels;
  if (!a.channels.empty()) channels = load_channels(a.channels, model);
  if (!channels) throw InputError("simulate needs test channels (--channels or \"channels\" in the model)");

  BinningRates rates{triple(a.rates, "--rates"), triple(a.rates_prime, "--rates-prime")};
  const TypicalityParams params{a.epsilon, a.n};
  codebook_shape(rates, params);  // fail on caps before any work
  const auto report = run_binning_trials(model, *channels, rates, params, a.trials, a.seed,
                                         source_distortions(file, model));
  const auto bounds = inner_bound(model, *channels);
  const JointPMF extended = extend_with_test_channels(model, *channels);
  InfoMeasures info(extended);

  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "simulate";
  j["config"] = {{"n", a.n},
                 {"epsilon", num(a.epsilon)},
                 {"trials", a.trials},
                 {"seed", a.seed},
                 {"rates", {num(rates.rate[0]), num(rates.rate[1]), num(rates.rate[2])}},
                 {"rates_prime", {num(rates.rate_prime[0]), num(rates.rate_prime[1]), num(rates.rate_prime[2])}}};
  ordered_json r;
  r["trials"] = report.trials;
  r["event1_count"] = report.event1_count;
  r["event2_count"] = report.event2_count;
  r["event3_count"] = report.event3_count;
  r["decode_failures"] = report.decode_failures;
  r["successes"] = report.successes;
  const auto arr3 = [](const std::optional<std::array<double, 3>>& v) {
    return v ? ordered_json{num((*v)[0]), num((*v)[1]), num((*v)[2])} : ordered_json(nullptr);
  };
  r["empirical_distortions"] = arr3(report.empirical_distortions);
  r["distortion_std_errors"] = arr3(report.distortion_std_errors);
  r["per_class_rates"] = {{"event1", num(report.event_rates[0])},
                          {"event2", num(report.event_rates[1])},
                          {"event3", num(report.event_rates[2])},
                          {"total", num(report.error_rate)}};
  j["report"] = r;
  j["theorem2_bounds"] = bounds_json(bounds);
  ordered_json enc = ordered_json::array();
  for (std::size_t m = 0; m < 3; ++m) {
    const std::string w = var::kAuxiliaries[m];
    std::string others;
    for (std::size_t k = 0; k < 3; ++k)
      if (k != m) others += var::kAuxiliaries[k] + ",";
    enc.push_back({{"covering_information", num(info("I(" + var::kSources[m] + ";" + w + ")"))},
                   {"binning_information", num(info("I(" + w + ";" + others + "Z,F)"))},
                   {"rate_prime_minus_rate", num(rates.rate_prime[m] - rates.rate[m])}});
  }
  j["encoders"] = enc;
  j["inside_region"] = bounds.contains({rates.rate[0], rates.rate[1], rates.rate[2]});
  emit(j.dump(2) + "\n", a.out, out);
  return kExitOk;
}

struct WynerZivArgs {
  std::string model;
  std::string grid = "0.01:0.25:0.01";
  std::size_t w_size = 3;
  double grid_step = 0.01;
  std::string out;
};

int cmd_wyner_ziv(const WynerZivArgs& a, std::ostream& out) {
  const ModelFile file = load_model(a.model);
  if (file.joint.rank() != 2) throw InputError(a.model + ": wyner-ziv needs a model with exactly two variables");
  const DistortionMeasure d = distortion_for(file, file.joint.axes()[0]);
  WynerZivConfig cfg{a.w_size, a.grid_step, distortion_grid(a.grid)};
  const auto points = wyner_ziv_reduction(file.joint, d, cfg);
  std::vector<std::pair<double, double>> finite;
  for (const auto& p : points)
    if (std::isfinite(p.rate)) finite.emplace_back(p.distortion, p.rate);
  const auto hull = lower_convex_envelope(finite);
  const auto crossover = binary_symmetric_crossover(file.joint, d);

  std::ostringstream csv;
  csv << "D,R,R_hull,R_closed_form\n";
  for (const auto& p : points) {
    csv << format_number(p.distortion) << "," << (std::isfinite(p.rate) ? format_number(p.rate) : "inf") << ","
        << (hull.empty() ? "" : format_number(envelope_at(hull, p.distortion))) << ","
        << (crossover ? format_number(wyner_ziv_binary(*crossover, p.distortion)) : "") << "\n";
  }
  emit(csv.str(), a.out, out);
  return kExitOk;
}

void apply_threads(int flag) {
  if (const char* env = std::getenv("RD_REGION_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("RD_REGION_THREADS must be a positive integer");
    set_thread_count(static_cast<int>(v));
  } else if (flag > 0) {
    set_thread_count(flag);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate-distortion regions for three separately encoded sources with decoder side information",
               "rdregion"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: machine parallelism)")->check(CLI::PositiveNumber);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Bayesian-network structure and converse identity residuals (JSON)");
  c->add_option("model", check.model, "Model file")->required();
  c->add_option("--tol", check.tol, "Residual tolerance")->capture_default_str();

  RegionArgs region;
  auto* r = app.add_subcommand("region", "Grid-search frontier (CSV)");
  r->add_option("model", region.model, "Model file")->required();
  r->add_option("--grid-step", region.grid_step, "Channel grid step")->capture_default_str();
  r->add_option("--w-sizes", region.w_sizes, "Auxiliary alphabet sizes W1,W2,W3 (default |X_i|+1)")->delimiter(',');
  r->add_option("--distortion", region.distortion, "Targets D1,D2,D3")->delimiter(',')->required();
  r->add_option("--objective", region.objective, "min_sum_rate | min_r1 | min_r2 | min_r3")->capture_default_str();
  r->add_option("--refine", region.refine, "Dyadic refinement rounds")->capture_default_str();
  r->add_option("--out", region.out, "Output CSV path (default stdout)");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Random-binning Monte Carlo (JSON)");
  s->add_option("model", sim.model, "Model file")->required();
  s->add_option("--channels", sim.channels, "Test-channel file (default: channels in the model)");
  s->add_option("--n", sim.n, "Blocklength")->required();
  s->add_option("--rates", sim.rates, "Bin rates R1,R2,R3")->delimiter(',')->required();
  s->add_option("--rates-prime", sim.rates_prime, "Codebook rates R1',R2',R3'")->delimiter(',')->required();
  s->add_option("--epsilon", sim.epsilon, "Typicality epsilon")->capture_default_str();
  s->add_option("--trials", sim.trials, "Trials")->capture_default_str();
  s->add_option("--seed", sim.seed, "Seed")->capture_default_str();
  s->add_option("--out", sim.out, "Output JSON path (default stdout)");

  WynerZivArgs wz;
  auto* w = app.add_subcommand("wyner-ziv", "Single-source side-information reduction (CSV)");
  w->add_option("model", wz.model, "Two-variable model file (source, side information)")->required();
  w->add_option("--distortion-grid", wz.grid, "start:stop:step or comma list")->capture_default_str();
  w->add_option("--w-size", wz.w_size, "Auxiliary alphabet size")->capture_default_str();
  w->add_option("--grid-step", wz.grid_step, "Channel grid step")->capture_default_str();
  w->add_option("--out", wz.out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    apply_threads(threads);
    if (*c) return cmd_check(check, out);
    if (*r) return cmd_region(region, out, err);
    if (*s) return cmd_simulate(sim, out);
    if (*w) return cmd_wyner_ziv(wz, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace rdregion
