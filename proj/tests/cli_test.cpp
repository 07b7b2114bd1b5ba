#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ecs/cli/commands.hpp"
#include "ecs/cli/protocol_spec.hpp"
#include "ecs/errors.hpp"

using namespace ecs;
using namespace ecs::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("ecs_cli_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::string specs_dir() { return ECS_SPECS_DIR; }

}  // namespace

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("2"), cplx(2, 0));
  EXPECT_EQ(parse_complex("-2i"), cplx(0, -2));
  EXPECT_EQ(parse_complex("1+1i"), cplx(1, 1));
  EXPECT_EQ(parse_complex("0.5-0.25j"), cplx(0.5, -0.25));
  EXPECT_EQ(parse_complex("i"), cplx(0, 1));
  EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
  EXPECT_EQ(parse_complex("1e-3+2e+1i"), cplx(1e-3, 20));
  EXPECT_EQ(parse_complex("[1, 2]"), cplx(1, 2));
  EXPECT_THROW(parse_complex("abc"), ValidationError);
  EXPECT_THROW(parse_complex(""), ValidationError);
  EXPECT_EQ(parse_list("10,20,50"), (std::vector<double>{10, 20, 50}));
  EXPECT_THROW(parse_list("1,x"), ValidationError);
}

TEST(Cli, RunGhzDefaults) {
  const auto r = invoke({"run-ghz", "--n", "3", "--alpha", "2", "--theta", "pi/2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  const double pg = j["result"]["outcomes"]["g"]["probability"].get<double>();
  EXPECT_NEAR(pg - 0.5, 0.5 * std::exp(-24.0), 1e-15);
  EXPECT_NEAR(j["result"]["outcomes"]["g"]["fidelity"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["result"]["probabilitySum"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(j["tool"]["version"], kToolVersion);
}

TEST(Cli, RunGhzVacuum) {
  const auto r = invoke({"run-ghz", "--alpha", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["result"]["outcomes"]["g"]["probability"].get<double>(), 1.0);
}

TEST(Cli, FockValidationBlock) {
  const auto r = invoke({"run-ghz", "--validate-fock", "--detuning-ratio", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_GE(j["fockValidation"]["compensatedFidelity"].get<double>(), 0.99);
  EXPECT_TRUE(j["fockValidation"].contains("rawFidelity"));
  EXPECT_TRUE(j["fockValidation"].contains("tailBound"));
}

TEST(Cli, RunW) {
  const auto r = invoke({"run-w", "--n", "3", "--alpha", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["result"]["outcomes"].size(), 8U);
  EXPECT_NEAR(j["result"]["outcomes"]["ggg"]["probability"].get<double>(), (1 + 2 * std::exp(-4.0)) / 8, 1e-12);
  EXPECT_EQ(j["result"]["outcomes"]["gge"]["group"], j["result"]["outcomes"]["eeg"]["group"]);
  for (const auto& [w, o] : j["result"]["outcomes"].items()) EXPECT_NEAR(o["fidelity"].get<double>(), 1.0, 1e-12) << w;
}

TEST(Cli, SpecReproducesRunGhzBitIdentically) {
  const auto a = invoke({"run-spec", specs_dir() + "/ghz3.spec"});
  const auto b = invoke({"run-ghz"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto c = invoke({"run-spec", specs_dir() + "/w3.spec"});
  EXPECT_EQ(c.out, invoke({"run-w"}).out);
}

TEST(Cli, ExitCodes) {
  const auto impossible = temp_file("impossible.spec", R"({"nModes": 1, "atoms": [{"basis": "e"}],
    "steps": [{"op": "measure", "atom": 0, "outcome": "g"}]})");
  const auto r3 = invoke({"run-spec", impossible});
  EXPECT_EQ(r3.code, 3);
  EXPECT_FALSE(r3.err.empty());

  const auto badIndex = temp_file("bad_index.spec", R"({"nModes": 1, "atoms": [{"basis": "e"}],
    "steps": [{"op": "ramsey", "atom": 0}, {"op": "transit", "atom": 4, "mode": 0, "theta": "pi/2"}]})");
  const auto r2 = invoke({"run-spec", badIndex});
  EXPECT_EQ(r2.code, 2);
  EXPECT_NE(r2.err.find("step 1"), std::string::npos) << r2.err;

  EXPECT_EQ(invoke({"run-spec", temp_file("broken.spec", "{not json")}).code, 2);
  EXPECT_EQ(invoke({"run-spec", "/nonexistent/file.spec"}).code, 2);
  EXPECT_EQ(invoke({"run-ghz", "--alpha", "zzz"}).code, 2);
  EXPECT_EQ(invoke({"run-ghz", "--theta", "nonsense"}).code, 2);
  EXPECT_EQ(invoke({"no-such-command"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"timescales", "--q", "-1"}).code, 2);
}

TEST(Cli, DeterministicOutputs) {
  const std::vector<std::vector<std::string>> commands{
      {"run-ghz", "--entanglement", "--kappa", "1000", "--storage-time", "1e-4"},
      {"run-w", "--alpha", "0.7"},
      {"run-ghz", "--sample", "--seed", "7"},
      {"validate-dispersive", "--ratios", "10,50"},
      {"decohere"},
      {"sweep-entanglement", "--family", "w"},
      {"timescales"}};
  for (const auto& c : commands) {
    const auto a = invoke(c), b = invoke(c);
    EXPECT_EQ(a.code, 0) << c[0] << ": " << a.err;
    EXPECT_EQ(a.out, b.out) << c[0];
  }
}

TEST(Cli, SampleSeedSelectsOutcome) {
  std::set<std::string> seen;
  for (int seed = 0; seed < 20; ++seed) {
    const auto r = invoke({"run-w", "--sample", "--seed", std::to_string(seed)});
    ASSERT_EQ(r.code, 0);
    seen.insert(Json::parse(r.out)["sample"]["outcome"].get<std::string>());
  }
  EXPECT_GT(seen.size(), 3U);
}

TEST(Cli, ValidateDispersive) {
  const auto csv = (std::filesystem::temp_directory_path() / "ecs_cli_test_vd.csv").string();
  const auto r = invoke({"validate-dispersive", "--ratios", "10,20,50,100", "--csv", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_TRUE(j["compensatedIncreasing"].get<bool>());
  EXPECT_GE(j["compensatedAtRatio50"].get<double>(), 0.99);
  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "ratio,raw_fidelity,compensated_fidelity,cutoff,tail_bound");
}

TEST(Cli, DecohereAndSweep) {
  const auto d = invoke({"decohere", "--alpha", "0.5,1,2", "--kappa", "1e3", "--t", "1e-4"});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_TRUE(Json::parse(d.out)["fidelityNonIncreasingInAlpha"].get<bool>());
  const auto s = invoke({"sweep-entanglement", "--family", "ghz-minus", "--n", "2"});
  ASSERT_EQ(s.code, 0) << s.err;
  for (const auto& row : Json::parse(s.out)["rows"]) EXPECT_NEAR(row["entropyBits"].get<double>(), 1.0, 1e-10);
  EXPECT_EQ(invoke({"sweep-entanglement", "--family", "bogus"}).code, 2);
}

TEST(Cli, Timescales) {
  const auto r = invoke({"timescales"});
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j["transitOverAtomicLifetime"].get<double>(), 3.3e-3, 1e-4);
  EXPECT_NEAR(j["transitOverCavityLifetime"].get<double>(), 0.1, 1e-12);
  EXPECT_NEAR(j["cavityLifetimeFromQ"].get<double>(), 0.94e-3, 0.005e-3);
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Spec, RoundTrip) {
  for (const char* name : {"ghz3.spec", "w3.spec"}) {
    std::ifstream f(specs_dir() + "/" + name);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto spec = parse_spec_text(ss.str());
    const Json once = spec_to_json(spec);
    const Json twice = spec_to_json(parse_spec(once));
    EXPECT_EQ(once.dump(), twice.dump()) << name;
  }
  // Dispersive-parameter transits, superpositions, weights and damping.
  const std::string text = R"({"nModes": 2, "initialAlphas": [[0.5, 0], [0, 0]],
    "atoms": [{"superposition": [{"word": "e", "coeff": [1, 0]}, {"word": "g", "coeff": [0, 1]}]},
              {"w": {"n": 2, "weights": [[1, 0], [2, 0]]}}],
    "steps": [{"op": "transit", "atom": 0, "mode": 1, "g": 1, "delta": 50, "tau": 78.5},
              {"op": "inject", "mode": 1, "gamma": [0.3, 0.1]},
              {"op": "measure", "atom": 1, "outcome": "e"},
              {"op": "ramsey", "atom": 0},
              {"op": "measure", "atom": 0, "outcome": "tabulate"},
              {"op": "measure", "atom": 2, "outcome": "tabulate"}],
    "reference": {"kind": "none"},
    "damping": {"kappa": 10, "t": 0.01, "modes": [1]}})";
  const auto spec = parse_spec_text(text);
  const Json once = spec_to_json(spec);
  EXPECT_EQ(once.dump(), spec_to_json(parse_spec(once)).dump());
  const auto path = temp_file("roundtrip.spec", text);
  EXPECT_EQ(invoke({"run-spec", path}).code, 0);
}
