#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ghzchain/cli.hpp"

using namespace ghzchain;
namespace fs = std::filesystem;

namespace {

ChainSpec random_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ChainSpec s;
  s.N = 2 + static_cast<int>(rng() % 60);
  s.scheme = static_cast<Scheme>(rng() % 3);
  s.g0 = 0.1 + u(rng);
  s.T = 1.0 + 1e4 * u(rng);
  if (rng() % 2) s.tau = s.T * u(rng);
  s.tau_divisor = 1.0 + 9.0 * u(rng);
  s.delta1 = 1e3 * u(rng);
  s.delta2 = 1e3 * u(rng);
  s.jprime_scale = 50.0 * u(rng);
  s.omega_edge = 50.0 * u(rng);
  s.stark_compensation = rng() % 2;
  s.gamma = {0.01 * u(rng)};
  if (rng() % 2) {
    s.gamma.assign(static_cast<std::size_t>(s.N), 0.0);
    for (auto& g : s.gamma) g = 0.01 * u(rng);
  }
  s.kappa = {0.01 * u(rng), 1e-7 * u(rng)};
  s.disorder_delta = u(rng);
  s.seed = rng();
  return s;
}

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ghzchain_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("ghzchain_test_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string str() const { return path_.string(); }
  std::vector<fs::path> files(const std::string& ext) const {
    std::vector<fs::path> r;
    for (const auto& e : fs::directory_iterator(path_))
      if (e.path().extension() == ext) r.push_back(e.path());
    return r;
  }

 private:
  fs::path path_;
};

}  // namespace

TEST(Config, RoundTripProperty) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 300; ++i) {
    const auto s = random_spec(rng);
    const auto back = parse_config(serialize_config(s));
    EXPECT_EQ(back, s) << serialize_config(s);
    EXPECT_EQ(spec_hash(back), spec_hash(s));
  }
}

TEST(Config, HashChangesWithContent) {
  ChainSpec a, b;
  b.seed += 1;
  EXPECT_NE(spec_hash(a), spec_hash(b));
  EXPECT_EQ(spec_hash(a).size(), 16u);
}

TEST(Config, CommentsAndBlankLines) {
  const auto s = parse_config("# a chain\nN = 11   # qutrits\n\nscheme = C\ngamma = 0.01, 0.02\ntau = auto\n");
  EXPECT_EQ(s.N, 11);
  EXPECT_EQ(s.scheme, Scheme::C);
  EXPECT_EQ(s.gamma, (std::vector<double>{0.01, 0.02}));
  EXPECT_FALSE(s.tau.has_value());
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    parse_config("N = 5\ncolour = blue\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "colour");
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(Config, BadValuesAreNamed) {
  ChainSpec s;
  try {
    set_config_value(s, "T", "soon");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "T");
  }
  EXPECT_THROW(set_config_value(s, "N", "1"), ConfigError);
  EXPECT_THROW(set_config_value(s, "scheme", "D"), ConfigError);
  EXPECT_THROW(set_config_value(s, "stark_compensation", "maybe"), ConfigError);
  EXPECT_THROW(parse_config("N 5\n"), ConfigError);
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1234.0), "1234");
  EXPECT_EQ(format_number(5e-5), "5e-05");
  EXPECT_EQ(format_number(1e-4), "0.0001");
  std::ostringstream os;
  CsvWriter w(os, {"a", "b"});
  w.row(std::vector<double>{1.0, 2e-7});
  EXPECT_EQ(os.str(), "a,b\n1,2e-07\n");
  EXPECT_THROW(w.row(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Cli, EvolveWritesCsvAndManifest) {
  TempDir dir;
  const auto r = cli({"--N", "5", "--g0T", "150", "--points", "11", "--out", dir.str(), "evolve"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(dir.files(".csv").size(), 1u);
  ASSERT_EQ(dir.files(".json").size(), 1u);
  std::ifstream mf(dir.files(".json").front());
  const auto m = nlohmann::json::parse(mf);
  EXPECT_EQ(m["subcommand"], "evolve");
  EXPECT_NEAR(m["results"]["final_norm"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(m["spec"]["N"], 5);
  EXPECT_TRUE(m.contains("spec_hash"));
  EXPECT_TRUE(m.contains("duration_s"));
  std::ifstream cf(dir.files(".csv").front());
  std::string header;
  std::getline(cf, header);
  EXPECT_EQ(header.rfind("t,norm", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(cf, line);) ++rows;
  EXPECT_EQ(rows, 11);
}

TEST(Cli, ConfigFileAndOverrides) {
  TempDir dir;
  const auto cfg = dir.str() + "/chain.cfg";
  std::ofstream(cfg) << "N = 4\nscheme = C\nT = 120\n";
  const auto r = cli({"-c", cfg, "--N", "3", "--out", dir.str(), "ghz"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream mf(dir.files(".json").front());
  const auto m = nlohmann::json::parse(mf);
  EXPECT_EQ(m["spec"]["N"], 3);
  EXPECT_EQ(m["spec"]["scheme"], "C");
  EXPECT_GT(m["results"]["final_fidelity"].get<double>(), 0.9);
}

TEST(Cli, UnknownConfigKeyExitsTwo) {
  TempDir dir;
  const auto cfg = dir.str() + "/bad.cfg";
  std::ofstream(cfg) << "N = 4\nwobble = 3\n";
  const auto r = cli({"-c", cfg, "--out", dir.str(), "spectrum"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("wobble"), std::string::npos);
  EXPECT_TRUE(dir.files(".json").empty());
}

TEST(Cli, InvalidSchemeAndParseErrors) {
  TempDir dir;
  EXPECT_EQ(cli({"--scheme", "Z", "--out", dir.str(), "spectrum"}).code, 2);
  EXPECT_EQ(cli({"--N", "4"}).code, 2);
  EXPECT_EQ(cli({"--N", "4", "--out", dir.str(), "no-such-command"}).code, 2);
  EXPECT_EQ(cli({"--N", "9", "--out", dir.str(), "oracle-check"}).code, 2);
}

TEST(Cli, UnknownProjectorExitsTwo) {
  TempDir dir;
  const auto r = cli({"--N", "3", "--g0T", "20", "--out", dir.str(), "evolve", "--project", "moon"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("projector"), std::string::npos);
}
