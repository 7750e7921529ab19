#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "landau/cli.hpp"

using namespace landau;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = LANDAU_CONFIG_DIR;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("landau_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args, const std::string& sub = "") {
    const fs::path out = sub.empty() ? dir_ : dir_ / sub;
    args.insert(args.begin(), "landau_cli");
    args.push_back("--out");
    args.push_back(out.string());
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  }

  std::string slurp(const std::string& name, const std::string& sub = "") const {
    std::ifstream f(sub.empty() ? dir_ / name : dir_ / sub / name, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  json read_json(const std::string& name) const { return json::parse(slurp(name)); }

  std::vector<std::vector<std::string>> read_csv(const std::string& name) const {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(name));
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      rows.push_back(cells);
    }
    return rows;
  }

  static std::string config(const std::string& name) { return kConfigs + "/" + name + ".json"; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"verify", "--filter", "husimi"}), 0);
  EXPECT_EQ(run({"verify", "--filter", "moyal", "--inject-fault", "wigner-phase"}), 1);
  EXPECT_EQ(run({"radial-eigs", "--config", config("malformed")}), 2);
  EXPECT_EQ(run({"radial-eigs", "--config", kConfigs + "/does_not_exist.json"}), 2);
  EXPECT_EQ(run({"spectrum"}), 2);
  EXPECT_EQ(run({"no-such-command"}), 2);
  EXPECT_EQ(run({"verify", "--filter", "no-such-suite"}), 2);
  EXPECT_EQ(run({"verify", "--inject-fault", "unknown"}), 2);
}

TEST_F(Cli, ConfigErrorsAreReported) {
  const fs::path bad = dir_ / "bad.json";
  auto attempt = [&](const std::string& text, const std::string& cmd) {
    std::ofstream(bad) << text;
    return run({cmd, "--config", bad.string()}, "o");
  };
  EXPECT_EQ(attempt(R"({"profile": {"kind": "wobbly"}, "K": 4})", "radial-eigs"), 2);
  EXPECT_EQ(attempt(R"({"profile": {"kind": "gaussian", "a": 1}, "K": -1})", "radial-eigs"), 2);
  EXPECT_EQ(attempt(R"({"profile": {"kind": "gaussian"}, "K": 4})", "radial-eigs"), 2);
  EXPECT_EQ(attempt(R"({"set": {"kind": "disk", "radius": 0}})", "capacity"), 2);
  EXPECT_EQ(attempt(R"([1, 2])", "spectrum"), 2);
  EXPECT_EQ(attempt(R"({"symbol": {"zero": true}, "Q": 2, "K": 2, "sign": "sideways"})", "spectrum"), 2);
  EXPECT_EQ(attempt(R"({"zeta": {"kind": "power", "gamma": 3}, "K": 4, "model": {"kind": "exp"}})", "toeplitz"), 2);
}

TEST_F(Cli, VerifyOutputsAndFaultInjection) {
  ASSERT_EQ(run({"verify"}), 0);
  const auto rows = read_csv("verify.csv");
  ASSERT_EQ(rows.size(), verify_suites().size() + 1);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"suite", "checks", "max_error", "tolerance", "status"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][4], "PASS") << rows[i][0];
  EXPECT_TRUE(read_json("verify.json")["all_passed"].get<bool>());

  ASSERT_EQ(run({"verify", "--inject-fault", "wigner-phase"}), 1);
  const auto j = read_json("verify.json");
  EXPECT_FALSE(j["all_passed"].get<bool>());
  for (const auto& s : j["suites"]) {
    const std::string name = s["suite"];
    if (name == "fourier" || name == "moyal") {
      EXPECT_FALSE(s["passed"].get<bool>()) << name;
    }
    if (name == "symplectic" || name == "radial") {
      EXPECT_TRUE(s["passed"].get<bool>()) << name;
    }
  }
}

TEST_F(Cli, VerifyFilterRunsOneSuite) {
  ASSERT_EQ(run({"verify", "--filter", "fourier"}), 0);
  const auto rows = read_csv("verify.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "fourier");
  EXPECT_EQ(run({"verify", "--filter", "fourier", "--inject-fault", "wigner-phase"}), 1);
  EXPECT_EQ(run({"verify", "--filter", "husimi", "--inject-fault", "wigner-phase"}), 0);
}

TEST_F(Cli, OutputsAreDeterministic) {
  ASSERT_EQ(run({"capacity", "--config", config("capacity_segment")}, "a"), 0);
  ASSERT_EQ(run({"capacity", "--config", config("capacity_segment")}, "b"), 0);
  EXPECT_EQ(slurp("capacity.json", "a"), slurp("capacity.json", "b"));
  ASSERT_EQ(run({"radial-eigs", "--config", config("radial_gaussian")}, "a"), 0);
  ASSERT_EQ(run({"radial-eigs", "--config", config("radial_gaussian")}, "b"), 0);
  EXPECT_EQ(slurp("radial_eigs.csv", "a"), slurp("radial_eigs.csv", "b"));
  EXPECT_EQ(slurp("radial_eigs.json", "a"), slurp("radial_eigs.json", "b"));

  ASSERT_EQ(run({"capacity", "--config", config("capacity_segment"), "--seed", "99"}, "c"), 0);
  const auto a = json::parse(slurp("capacity.json", "a")), c = json::parse(slurp("capacity.json", "c"));
  EXPECT_NE(a["provenance"]["config_hash"], c["provenance"]["config_hash"]);
  EXPECT_EQ(c["seed"].get<int>(), 99);
}

TEST_F(Cli, RadialEigsRankOne) {
  ASSERT_EQ(run({"radial-eigs", "--config", config("radial_rank_one")}), 0);
  const auto rows = read_csv("radial_eigs.csv");
  ASSERT_EQ(rows.size(), 17u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "mu_w", "mu_aw", "mu_w_fourier"}));
  EXPECT_NEAR(std::stod(rows[1][1]), 1.0, 1e-9);
  EXPECT_NEAR(std::stod(rows[1][3]), 1.0, 1e-9);
  for (std::size_t r = 2; r < rows.size(); ++r) {
    EXPECT_NEAR(std::stod(rows[r][1]), 0.0, 1e-9);
    EXPECT_NEAR(std::stod(rows[r][3]), 0.0, 1e-9);
  }
  EXPECT_TRUE(read_json("radial_eigs.json")["warnings"].empty());
}

TEST_F(Cli, RadialEigsGaussianClosedForm) {
  // e^{-s/2} has Weyl eigenvalues (2/3)(1/3)^k and anti-Wick eigenvalues (1/2)^{k+1}
  ASSERT_EQ(run({"radial-eigs", "--config", config("radial_gaussian")}), 0);
  const auto rows = read_csv("radial_eigs.csv");
  ASSERT_EQ(rows.size(), 33u);
  for (int k = 0; k < 32; ++k) {
    const double w = 2.0 / 3.0 * std::pow(1.0 / 3.0, k), aw = std::pow(0.5, k + 1);
    EXPECT_NEAR(std::stod(rows[k + 1][1]), w, 1e-12 + 1e-9 * w) << k;
    EXPECT_NEAR(std::stod(rows[k + 1][2]), aw, 1e-12 + 1e-9 * aw) << k;
    EXPECT_NEAR(std::stod(rows[k + 1][3]), w, 1e-10) << k;
  }
}

TEST_F(Cli, RadialEigsConstantWarnsForMissingColumn) {
  ASSERT_EQ(run({"radial-eigs", "--config", config("radial_constant")}), 0);
  const auto rows = read_csv("radial_eigs.csv");
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    EXPECT_DOUBLE_EQ(std::stod(rows[r][1]), 1.0);
    EXPECT_EQ(rows[r][3], "nan");
  }
  EXPECT_FALSE(read_json("radial_eigs.json")["warnings"].empty());
}

TEST_F(Cli, SpectrumOfFreeOperatorIsLandauLevels) {
  ASSERT_EQ(run({"spectrum", "--config", config("spectrum_zero")}), 0);
  const auto j = read_json("spectrum.json");
  const auto eigs = j["eigenvalues"].get<std::vector<double>>();
  ASSERT_EQ(eigs.size(), 18u);
  for (std::size_t i = 0; i < eigs.size(); ++i) EXPECT_NEAR(eigs[i], 1.0 + 2.0 * (i / 6), 1e-12);
  for (const auto& w : j["gap_windows"]) EXPECT_EQ(w["count"].get<int>(), 0);
  EXPECT_TRUE(j["provenance"].contains("config_hash"));
  EXPECT_EQ(read_csv("spectrum.csv").size(), 19u);
}

TEST_F(Cli, SpectrumAndConstructionReproducePrescribedGaps) {
  ASSERT_EQ(run({"construct-gaps", "--config", config("gap_construction")}), 0);
  const auto j = read_json("gaps.json");
  EXPECT_EQ(j["gap_counts_minus"].get<std::vector<int>>(), (std::vector<int>{2, 0, 1}));
  EXPECT_LT(j["max_eigenvalue_error"].get<double>(), 1e-8);
  EXPECT_TRUE(j["passed"].get<bool>());

  ASSERT_EQ(run({"spectrum", "--config", config("spectrum_gaps")}), 0);
  const auto s = read_json("spectrum.json");
  int below = 0;
  for (const auto& w : s["gap_windows"])
    if (w["side"] == "minus") below += w["count"].get<int>();
  EXPECT_EQ(below, 3);
}

TEST_F(Cli, ConstructionMismatchIsAnAssertionFailure) {
  const fs::path cfg = dir_ / "np.json";
  // too few angular modes to resolve the predicted eigenvalues
  std::ofstream(cfg) << R"({"m": [2, 0, 1], "c1": [0.8, 0.5, 0.3], "c2": [0.5, 0.25], "Q": 3, "K": 1,
                            "tolerance": 1e-8})";
  EXPECT_EQ(run({"construct-gaps", "--config", cfg.string()}, "o"), 1);
}

TEST_F(Cli, ToeplitzExponentialWeight) {
  ASSERT_EQ(run({"toeplitz", "--config", config("toeplitz_beta1")}), 0);
  const auto rows = read_csv("toeplitz.csv");
  ASSERT_EQ(rows.size(), 202u);
  const double mu = 0.7;
  for (int k = 0; k <= 200; ++k) {
    const double exact = -(k + 1) * std::log1p(mu);
    EXPECT_NEAR(std::stod(rows[k + 1][2]), exact, 1e-10 * std::abs(exact)) << k;
    if (k >= 2) {
      EXPECT_NEAR(std::stod(rows[k + 1][4]), -std::log1p(mu), 1e-8) << k;
    }
  }
}

TEST_F(Cli, ToeplitzEmptyRangeWritesHeaderOnly) {
  ASSERT_EQ(run({"toeplitz", "--config", config("toeplitz_empty")}), 0);
  EXPECT_EQ(slurp("toeplitz.csv"), "k,nu_k,ln_nu_k,model_prediction,residual,residual_over_k,residual_over_ln_k\n");
}

TEST_F(Cli, CapacityEstimatesInRange) {
  ASSERT_EQ(run({"capacity", "--config", config("capacity_disk")}, "d"), 0);
  ASSERT_EQ(run({"capacity", "--config", config("capacity_segment")}, "s"), 0);
  const auto d = json::parse(slurp("capacity.json", "d")), s = json::parse(slurp("capacity.json", "s"));
  EXPECT_NEAR(d["estimate"].get<double>(), 1.0, 0.03);
  EXPECT_NEAR(s["estimate"].get<double>(), 0.5, 0.025);
  EXPECT_LE(d["lower_bound"].get<double>(), d["estimate"].get<double>());
  EXPECT_LE(s["lower_bound"].get<double>(), s["estimate"].get<double>());
  EXPECT_EQ(d["runs"].back()["points"].size(), 40u);
}

TEST_F(Cli, Asymptotics) {
  ASSERT_EQ(run({"asymptotics", "--config", config("asymptotics")}), 0);
  const auto j = read_json("asymptotics.json");
  EXPECT_EQ(j["model"], "exp_small_beta");
  EXPECT_EQ(j["coefficients"].size(), 3u);
  EXPECT_TRUE(j["log_slope_bounds"]["satisfied"].get<bool>());
  for (const auto& c : j["counting"]) {
    const double lam = c["lambda"];
    EXPECT_NEAR(c["volume"].get<double>(), (1.0 / lam - 1.0) / 2.0, 1e-6 / lam);
  }
}
