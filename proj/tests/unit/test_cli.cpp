#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rdregion/cli.hpp"
#include "rdregion/errors.hpp"
#include "rdregion/model_io.hpp"

using namespace rdregion;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = fs::path(RDREGION_SOURCE_DIR) / "data";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rdregion");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return (kData / name).string(); }

fs::path write_temp(const std::string& name, const json& doc) {
  const fs::path p = fs::temp_directory_path() / ("rdregion_test_" + name);
  std::ofstream(p) << doc.dump(2);
  return p;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, sep);) out.push_back(f);
  return out;
}

json wz_model(const std::vector<std::string>& joint) {
  return {{"schema_version", 1},
          {"variables", {{{"name", "X"}, {"symbols", {"0", "1"}}}, {{"name", "Y"}, {"symbols", {"0", "1"}}}}},
          {"joint", joint}};
}

}  // namespace

TEST(FormatNumber, SixSignificantDigits) {
  EXPECT_EQ(format_number(0.4689955935892812), "0.468996");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1e-7), "1e-07");
}

TEST(ModelIo, LoadsReferenceModel) {
  const auto m = load_model(kData / "e1.json");
  ASSERT_TRUE(m.source);
  ASSERT_TRUE(m.source->bayes_net());
  EXPECT_NEAR(mutual_information(m.source->joint(), {"X1"}, {"Z"}), 0.5310044064107188, 1e-12);
  EXPECT_FALSE(m.channels);
}

TEST(ModelIo, LoadsChannelsAndJointForms) {
  const auto m = load_model(kData / "e1_bsc025.json");
  ASSERT_TRUE(m.channels);
  EXPECT_NEAR(m.channels->w1.at(0, 1), 0.25, 1e-15);
  const auto ch = load_channels(kData / "e1_channels_bsc025.json", *m.source);
  EXPECT_NEAR(ch.w3.at(1, 1), 0.75, 1e-15);
  const auto nonbn = load_model(kData / "x3_copies_x1.json");
  ASSERT_TRUE(nonbn.source);
  EXPECT_FALSE(nonbn.source->bayes_net());
}

TEST(ModelIo, NestedAndFlatJointsAgree) {
  auto flat = wz_model({"0.375", "0.125", "0.125", "0.375"});
  auto nested = flat;
  nested["joint"] = json::array({json::array({"0.375", "0.125"}), json::array({"0.125", "0.375"})});
  const auto a = parse_model(flat), b = parse_model(nested);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(a.joint.probs()[i], b.joint.probs()[i]);
  EXPECT_FALSE(a.source);
}

TEST(ModelIo, RenormalizesOnlyWithinSlack) {
  const auto ok = parse_model(wz_model({"0.375", "0.125", "0.125", "0.3750000001"}));
  double s = 0.0;
  for (double v : ok.joint.probs()) s += v;
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_THROW(parse_model(wz_model({"0.375", "0.125", "0.125", "0.376"})), InputError);
}

TEST(ModelIo, RejectsMalformedDocuments) {
  auto doc = wz_model({"0.25", "0.25", "0.25", "0.25"});
  doc["extra"] = 1;
  EXPECT_THROW(parse_model(doc), InputError);
  auto no_version = wz_model({"0.25", "0.25", "0.25", "0.25"});
  no_version.erase("schema_version");
  EXPECT_THROW(parse_model(no_version), InputError);
  auto v2 = wz_model({"0.25", "0.25", "0.25", "0.25"});
  v2["schema_version"] = 2;
  EXPECT_THROW(parse_model(v2), InputError);
  EXPECT_THROW(parse_model(wz_model({"0.25", "0.25", "0.5"})), InputError);
  EXPECT_THROW(parse_model(wz_model({"0.25", "x", "0.25", "0.5"})), InputError);
  auto both = read_json(kData / "e1.json");
  both["joint"] = json::array({"1"});
  EXPECT_THROW(parse_model(both), InputError);
}

TEST(CliCheck, ReferenceModelPasses) {
  const auto r = cli({"check", data("e1.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_TRUE(doc["ok"].get<bool>());
  EXPECT_TRUE(doc["violations"].empty());
  std::size_t n = 0;
  for (const auto& section : {"bayes_net_structure", "converse_identities", "corollary4_cross_terms"})
    for (const auto& item : doc[section]) {
      EXPECT_LE(std::abs(item["residual"].get<double>()), 1e-9) << item["name"];
      ++n;
    }
  EXPECT_GT(n, 40u);
}

TEST(CliCheck, BadRowNamesFactorAndRow) {
  auto doc = read_json(kData / "e1.json");
  doc["bayes_net"]["p_x1_given_z"][1] = json::array({"0.1", "0.8"});
  const auto path = write_temp("bad_row.json", doc);
  const auto r = cli({"check", path.string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("p_x1_given_z"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("row 1"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliCheck, NonNetworkModelFails) {
  const auto r = cli({"check", data("x3_copies_x1.json"), "--tol", "1e-9"});
  EXPECT_EQ(r.code, kExitThreshold);
  const auto doc = json::parse(r.out);
  bool named = false;
  for (const auto& v : doc["violations"]) named |= v == "I(X1,X2;X3|Z,F)";
  EXPECT_TRUE(named);
}

TEST(CliCheck, MissingFileIsInputError) {
  const auto r = cli({"check", data("does_not_exist.json")});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("does_not_exist.json"), std::string::npos);
}

TEST(CliRegion, WorstCaseTargetsGiveZeroRow) {
  const auto r = cli({"region", data("e1.json"), "--distortion", "1,1,1", "--grid-step", "0.25", "--w-sizes", "2,2,2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  const auto header = split(ls[0]);
  ASSERT_GE(header.size(), 8u);
  EXPECT_EQ(header[0], "D1");
  EXPECT_EQ(header[6], "sum_rate");
  EXPECT_EQ(header[7], "bound_form");
  const auto row = split(ls[1]);
  EXPECT_EQ(row[3], "0");
  EXPECT_EQ(row[4], "0");
  EXPECT_EQ(row[5], "0");
  EXPECT_EQ(row[6], "0");
  EXPECT_EQ(header.size(), row.size());
}

TEST(CliRegion, ZeroDistortionMinR1) {
  const auto r = cli({"region", data("e1.json"), "--distortion", "0,0,0", "--grid-step", "0.05", "--w-sizes", "2,2,2",
                      "--objective", "min_r1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_GE(ls.size(), 2u);
  EXPECT_NEAR(std::stod(split(ls[1])[3]), 0.469, 0.02);
}

TEST(CliRegion, InfeasibleTargetsGiveHeaderOnly) {
  const auto r = cli({"region", data("e1.json"), "--distortion", "0,0,0", "--grid-step", "0.5", "--w-sizes", "1,1,1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(lines(r.out).size(), 1u);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(CliRegion, OutputIsByteStable) {
  const std::vector<std::string> args = {"region", data("e1.json"), "--distortion", "0.1,0.15,0.1", "--grid-step", "0.1"};
  const auto a = cli(args), b = cli(args);
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  auto serial = args;
  serial.insert(serial.begin(), {"--threads", "1"});
  EXPECT_EQ(cli(serial).out, a.out);
}

TEST(CliRegion, BadConfigIsInputError) {
  EXPECT_EQ(cli({"region", data("e1.json"), "--distortion", "0.1,0.1"}).code, kExitInput);
  EXPECT_EQ(cli({"region", data("e1.json"), "--distortion", "0.1,0.1,0.1", "--grid-step", "0.3"}).code, kExitInput);
  EXPECT_EQ(cli({"region", data("e1.json"), "--distortion", "0.1,0.1,0.1", "--objective", "fastest"}).code, kExitInput);
  EXPECT_EQ(cli({"region", data("e1.json")}).code, kExitInput);
}

TEST(CliSimulate, SingletonBinsAndDeterminism) {
  const std::vector<std::string> args = {"simulate", data("e1_bsc025.json"), "--n", "40", "--rates", "0.4,0.4,0.4",
                                         "--rates-prime", "0.4,0.4,0.4", "--epsilon", "0.9", "--trials", "10", "--seed", "3"};
  const auto a = cli(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  const auto doc = json::parse(a.out);
  EXPECT_EQ(doc["report"]["event3_count"].get<int>(), 0);
  EXPECT_TRUE(doc.contains("theorem2_bounds"));
  EXPECT_TRUE(doc.contains("inside_region"));
  EXPECT_EQ(cli(args).out, a.out);
}

TEST(CliSimulate, CapExceededNamesTheCap) {
  const auto r = cli({"simulate", data("e1_bsc025.json"), "--n", "200", "--rates", "0.1,0.1,0.1", "--rates-prime", "0.2,0.2,0.2"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("2^20"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliSimulate, NeedsChannels) {
  const auto r = cli({"simulate", data("e1.json"), "--n", "20", "--rates", "0.1,0.1,0.1", "--rates-prime", "0.2,0.2,0.2"});
  EXPECT_EQ(r.code, kExitInput);
}

TEST(CliWynerZiv, SideInfoEqualsSource) {
  const auto path = write_temp("wz_copy.json", wz_model({"0.5", "0", "0", "0.5"}));
  const auto r = cli({"wyner-ziv", path.string(), "--distortion-grid", "0:0.3:0.1", "--grid-step", "0.1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 5u);
  for (std::size_t k = 1; k < ls.size(); ++k) EXPECT_EQ(split(ls[k])[1], "0");
}

TEST(CliWynerZiv, IndependentSideInfo) {
  const auto path = write_temp("wz_indep.json", wz_model({"0.25", "0.25", "0.25", "0.25"}));
  const auto r = cli({"wyner-ziv", path.string(), "--distortion-grid", "0.5,0.6", "--grid-step", "0.1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  for (std::size_t k = 1; k < ls.size(); ++k) EXPECT_EQ(split(ls[k])[1], "0");
}

TEST(CliWynerZiv, CoarseBscColumns) {
  const auto r = cli({"wyner-ziv", data("wz_bsc025.json"), "--distortion-grid", "0.05:0.2:0.05", "--grid-step", "0.05"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  EXPECT_EQ(ls[0], "D,R,R_hull,R_closed_form");
  ASSERT_EQ(ls.size(), 5u);
  for (std::size_t k = 1; k < ls.size(); ++k) {
    const auto f = split(ls[k]);
    EXPECT_LE(std::stod(f[2]), std::stod(f[1]) + 1e-6);
    EXPECT_NEAR(std::stod(f[1]), std::stod(f[3]), 0.05);
  }
}

TEST(CliWynerZiv, RejectsFiveVariableModel) {
  EXPECT_EQ(cli({"wyner-ziv", data("e1.json")}).code, kExitInput);
}

TEST(Cli, ThreadsEnvironmentOverride) {
  ::setenv("RD_REGION_THREADS", "zero", 1);
  EXPECT_EQ(cli({"check", data("e1.json")}).code, kExitInput);
  ::setenv("RD_REGION_THREADS", "1", 1);
  EXPECT_EQ(cli({"check", data("e1.json")}).code, kExitOk);
  ::unsetenv("RD_REGION_THREADS");
}

TEST(Cli, HelpAndUnknownCommand) {
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(cli({}).code, kExitInput);
}
