#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "landau/asymptotics.hpp"
#include "landau/capacity.hpp"
#include "landau/config.hpp"
#include "landau/operators.hpp"
#include "landau/symbol.hpp"
#include "landau/verify.hpp"

namespace landau {

inline constexpr const char* kToolVersion = "0.1.0";

struct CliOptions {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int order = 0;
  std::string filter;
  std::string fault;
};

namespace cli {

struct Context {
  CliOptions opt;
  json config = json::object();
  std::filesystem::path out;

  json provenance(const json& quadrature, const json& truncation) const {
    std::string canon = config.dump() + "|command=" + opt.command;
    if (opt.seed) canon += "|seed=" + std::to_string(*opt.seed);
    if (opt.order > 0) canon += "|order=" + std::to_string(opt.order);
    return {{"command", opt.command},
            {"config_hash", "fnv1a64:" + hex64(fnv1a(canon))},
            {"quadrature", quadrature},
            {"truncation", truncation},
            {"tool_version", kToolVersion}};
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out / name).string());
    f << text;
  }

  void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }
};

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { line(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw std::logic_error("csv row width");
    line(cells);
  }
  const std::string& str() const { return text_; }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }
  std::size_t cols_;
  std::string text_;
};

inline double field_b(const json& c) { return cfg::positive(cfg::number_or(c, "b", 1.0, "config"), "b"); }

inline int cmd_radial_eigs(const Context& ctx) {
  const json& c = ctx.config;
  const RadialProfile p = parse_profile(cfg::require(c, "profile", "config"));
  const int K = cfg::integer(c, "K", "config");
  if (K <= 0) throw ConfigError("config: K must be positive");
  json warnings = json::array();
  auto column = [&](const char* name, auto&& compute) {
    try {
      return compute();
    } catch (const std::exception& e) {
      warnings.push_back(std::string(name) + " unavailable: " + e.what());
      return std::vector<double>(K, std::numeric_limits<double>::quiet_NaN());
    }
  };
  const auto mu_w = weyl_radial_eigs(p, K);
  const auto mu_aw = column("mu_aw", [&] { return antiwick_radial_eigs(p, K); });
  const auto mu_f = column("mu_w_fourier", [&] { return weyl_radial_eigs_fourier(radial_fourier_transform(p), K); });
  Csv csv({"k", "mu_w", "mu_aw", "mu_w_fourier"});
  for (int k = 0; k < K; ++k) csv.row({std::to_string(k), fmt17(mu_w[k]), fmt17(mu_aw[k]), fmt17(mu_f[k])});
  ctx.write("radial_eigs.csv", csv.str());
  ctx.write_json("radial_eigs.json", {{"profile", p.kind_name()},
                                      {"rows", K},
                                      {"warnings", warnings},
                                      {"provenance", ctx.provenance({{"radial", "sqrt-panel Gauss-Legendre"}},
                                                                    {{"K", K}})}});
  return 0;
}

inline json spectrum_json(const SpectrumReport& rep, const TruncatedOperator& t) {
  json windows = json::array();
  for (std::size_t i = 0; i < rep.windows.size(); ++i) {
    const auto& w = rep.windows[i];
    windows.push_back({{"level", w.level},
                       {"side", w.plus ? "plus" : "minus"},
                       {"lo", num(w.lo)},
                       {"hi", num(w.hi)},
                       {"count", rep.gap_counts[i]}});
  }
  json clusters = json::array();
  for (const auto& [v, m] : rep.clusters) clusters.push_back({{"value", v}, {"multiplicity", m}});
  json warnings = json::array();
  for (const auto& w : t.warnings) warnings.push_back(w);
  for (const auto& w : rep.warnings) warnings.push_back(w);
  return {{"eigenvalues", rep.eigenvalues},
          {"clusters", clusters},
          {"levels", rep.levels},
          {"gap_windows", windows},
          {"exclusion", rep.exclusion},
          {"trust_threshold", t.trust_threshold},
          {"warnings", warnings}};
}

inline int cmd_spectrum(const Context& ctx) {
  const json& c = ctx.config;
  const double b = field_b(c);
  const int Q = cfg::integer(c, "Q", "config"), K = cfg::integer(c, "K", "config");
  if (Q <= 0 || K <= 0) throw ConfigError("config: Q and K must be positive");
  const Sign sign = parse_sign(c, "config");
  Symbol4D V = Symbol4D::zero(b);
  if (c.contains("gap_construction")) {
    const json& n = c.at("gap_construction");
    try {
      V = construct_gap_potential(b, cfg::integers(n, "m", "gap_construction"), cfg::numbers(n, "c1", "gap_construction"), cfg::numbers(n, "c2", "gap_construction")).V;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("gap_construction: ") + e.what());
    }
  } else {
    V = parse_symbol4d(cfg::require(c, "symbol", "config"), b);
  }
  const auto t = assemble_HV(V, Q, K, sign, true, ctx.opt.order);
  const auto rep = eig_hermitian(t);
  json out = spectrum_json(rep, t);
  out["b"] = b;
  out["sign"] = sign == Sign::plus ? "plus" : "minus";
  out["provenance"] = ctx.provenance({{"generic_order", t.quadrature_order}}, {{"Q", Q}, {"K", K}});
  ctx.write_json("spectrum.json", out);
  Csv csv({"index", "eigenvalue"});
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) csv.row({std::to_string(i), fmt17(rep.eigenvalues[i])});
  ctx.write("spectrum.csv", csv.str());
  return 0;
}

inline std::optional<AsymptoticModel> parse_model(const json& c, const RadialProfile& zeta, double b) {
  if (!c.contains("model")) return std::nullopt;
  const json& m = c.at("model");
  const std::string kind = cfg::string_or(m, "kind", "", "model");
  if (kind == "compact") return AsymptoticModel::compact(b, cfg::positive(cfg::number(m, "capacity", "model"), "model.capacity"));
  if (kind == "exp") {
    if (zeta.kind == RadialProfile::Kind::exp_beta) return AsymptoticModel::exp_weight(zeta.gamma, zeta.beta, b);
    if (zeta.kind == RadialProfile::Kind::gaussian) return AsymptoticModel::exp_weight(zeta.a, 1.0, b);
    throw ConfigError("model: 'exp' needs an exp_beta or gaussian weight");
  }
  throw ConfigError("model: kind must be 'compact' or 'exp'");
}

inline int cmd_toeplitz(const Context& ctx) {
  const json& c = ctx.config;
  const double b = field_b(c);
  const RadialProfile zeta = parse_profile(cfg::require(c, "zeta", "config"), "zeta");
  const int q = cfg::integer_or(c, "q", 0, "config");
  if (q < 0) throw ConfigError("config: q must be nonnegative");
  int k_lo = 0, k_hi = -1;
  if (c.contains("k_range")) {
    const auto r = cfg::integers(c, "k_range", "config");
    if (r.size() != 2) throw ConfigError("config: k_range must be [k_lo, k_hi]");
    k_lo = r[0];
    k_hi = r[1];
  } else {
    k_hi = cfg::integer(c, "K", "config") - 1;
  }
  if (k_lo < 0) throw ConfigError("config: k_range must start at k >= 0");
  const auto model = parse_model(c, zeta, b);
  Csv csv({"k", "nu_k", "ln_nu_k", "model_prediction", "residual", "residual_over_k", "residual_over_ln_k"});
  if (k_hi >= k_lo) {
    const auto nu = toeplitz_radial_eigs_log(zeta, q, b, k_hi + 1);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int k = k_lo; k <= k_hi; ++k) {
      const double ln = nu[k].sign > 0 ? nu[k].log_abs : nan;
      const double pred = model && k >= 2 ? (*model)(k) : nan;
      const double res = ln - pred;
      csv.row({std::to_string(k), fmt17(nu[k].value()), fmt17(ln), fmt17(pred), fmt17(res),
               fmt17(k > 0 ? res / k : nan), fmt17(k >= 2 ? res / std::log(static_cast<double>(k)) : nan)});
    }
  }
  ctx.write("toeplitz.csv", csv.str());
  json meta{{"zeta", zeta.kind_name()},
            {"q", q},
            {"b", b},
            {"k_range", {k_lo, k_hi}},
            {"model", model ? json(model->name()) : json(nullptr)},
            {"provenance", ctx.provenance({{"gamma_moments", "adaptive Gauss-Legendre, log form"}},
                                          {{"k_max", std::max(k_hi, -1)}})}};
  if (model && (model->kind == AsymptoticModel::Kind::exp_small_beta || model->kind == AsymptoticModel::Kind::exp_large_beta ||
                model->kind == AsymptoticModel::Kind::exp_beta_one)) {
    meta["mu"] = model->mu;
    meta["coefficients"] = model->coeffs;
  }
  ctx.write_json("toeplitz.json", meta);
  return 0;
}

inline json points_json(const std::vector<point2>& pts) {
  json a = json::array();
  for (auto p : pts) a.push_back({p.real(), p.imag()});
  return a;
}

inline int cmd_capacity(const Context& ctx) {
  const json& c = ctx.config;
  const CompactSet K = parse_set(cfg::require(c, "set", "config"));
  const int j_max = cfg::integer_or(c, "j_max", 40, "config");
  const int restarts = cfg::integer_or(c, "restarts", 8, "config");
  if (j_max < 8) throw ConfigError("config: j_max must be at least 8");
  if (restarts < 1) throw ConfigError("config: restarts must be positive");
  const std::uint64_t seed = ctx.opt.seed ? *ctx.opt.seed : static_cast<std::uint64_t>(cfg::integer_or(c, "seed", 0, "config"));
  const auto est = capacity_estimate(K, j_max, restarts, seed);
  json runs = json::array();
  for (const auto& r : est.runs)
    runs.push_back({{"j", r.j},
                    {"delta_j", r.delta_j},
                    {"normalized_estimate", std::exp(log_capacity_estimate(r))},
                    {"log_energy", r.log_energy},
                    {"restart", r.restart},
                    {"iterations", r.iterations},
                    {"points", points_json(r.points)}});
  ctx.write_json("capacity.json",
                 {{"estimate", est.estimate},
                  {"lower_bound", num(est.lower_cert)},
                  {"certified", est.certified},
                  {"seed", seed},
                  {"restarts", restarts},
                  {"runs", runs},
                  {"provenance", ctx.provenance(json::object(), {{"j_max", j_max}})}});
  return 0;
}

inline int cmd_asymptotics(const Context& ctx) {
  const json& c = ctx.config;
  const double b = field_b(c);
  json out{{"b", b}};
  if (c.contains("weight")) {
    const json& w = c.at("weight");
    const std::string kind = cfg::string_or(w, "kind", "", "weight");
    std::vector<int> ks = c.contains("ks") ? cfg::integers(c, "ks", "config") : std::vector<int>{10, 20, 50, 100, 200, 400};
    for (int k : ks)
      if (k < 2) throw ConfigError("config: ks must be at least 2");
    AsymptoticModel m;
    if (kind == "compact") {
      m = AsymptoticModel::compact(b, cfg::positive(cfg::number(w, "capacity", "weight"), "weight.capacity"));
      out["capacity"] = m.capacity;
    } else if (kind == "exp_beta") {
      m = AsymptoticModel::exp_weight(cfg::positive(cfg::number(w, "gamma", "weight"), "weight.gamma"),
                                      cfg::positive(cfg::number(w, "beta", "weight"), "weight.beta"), b);
      out["beta"] = m.beta;
      out["mu"] = m.mu;
      out["coefficients"] = m.coeffs;
    } else {
      throw ConfigError("weight: kind must be 'compact' or 'exp_beta'");
    }
    out["model"] = m.name();
    json preds = json::array();
    for (int k : ks) preds.push_back({{"k", k}, {"ln_nu_prediction", m(k)}});
    out["predictions"] = preds;
  }
  if (c.contains("counting")) {
    const json& n = c.at("counting");
    const auto v = Symbol2D::radial(parse_profile(cfg::require(n, "symbol", "counting"), "counting.symbol"));
    const Sign sign = parse_sign(n, "counting");
    const auto lambdas = cfg::numbers(n, "lambdas", "counting");
    json counts = json::array();
    for (double l : lambdas) {
      if (!(l > 0)) throw ConfigError("counting: lambdas must be positive");
      counts.push_back({{"lambda", l}, {"volume", predict_counting(l, v, sign)}});
    }
    out["counting"] = counts;
    if (lambdas.size() >= 2) {
      const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
      try {
        const auto rep = log_slope_bounds([&](double l) { return predict_counting(l, v, sign); }, *lo, *hi);
        out["log_slope_bounds"] = {{"gamma1", rep.gamma1}, {"gamma2", rep.gamma2}, {"satisfied", rep.satisfied}};
      } catch (const std::domain_error& e) {
        out["log_slope_bounds"] = {{"satisfied", false}, {"reason", e.what()}};
      }
    }
  }
  if (!c.contains("weight") && !c.contains("counting"))
    throw ConfigError("config: asymptotics needs a 'weight' or a 'counting' block");
  out["provenance"] = ctx.provenance({{"coefficients", "Newton + Richardson central differences"}}, json::object());
  ctx.write_json("asymptotics.json", out);
  return 0;
}

inline int cmd_construct_gap_potential(const Context& ctx) {
  const json& c = ctx.config;
  const double b = field_b(c);
  GapConstruction con;
  std::vector<int> m;
  try {
    m = cfg::integers(c, "m", "config");
    con = construct_gap_potential(b, m, cfg::numbers(c, "c1", "config"), cfg::numbers(c, "c2", "config"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  json predicted = json::array();
  for (const auto& p : con.predicted) predicted.push_back({{"q", p.q}, {"k", p.k}, {"value", p.value}});
  json out{{"b", b}, {"m", m}, {"predicted", predicted}};
  int status = 0;
  int Q = cfg::integer_or(c, "Q", 0, "config"), K = cfg::integer_or(c, "K", 0, "config");
  if (Q > 0 && K > 0) {
    const double tol = cfg::number_or(c, "tolerance", 1e-8, "config");
    const auto t = assemble_HV(con.V, Q, K, Sign::minus);
    const auto rep = eig_hermitian(t);
    json counts = json::array();
    std::vector<std::string> failures;
    for (std::size_t q = 0; q < m.size(); ++q) {
      const int got = rep.count_minus(static_cast<int>(q));
      counts.push_back(got);
      if (got != m[q]) failures.push_back("count below level " + std::to_string(q) + " is " + std::to_string(got));
    }
    double worst = 0.0;
    for (const auto& p : con.predicted) {
      double best = INFINITY;
      for (double e : rep.eigenvalues) best = std::min(best, std::abs(e - p.value));
      worst = std::max(worst, best);
    }
    if (!(worst < tol)) failures.push_back("predicted eigenvalue error " + fmt17(worst));
    out["computed"] = spectrum_json(rep, t);
    out["gap_counts_minus"] = counts;
    out["max_eigenvalue_error"] = worst;
    out["passed"] = failures.empty();
    out["failures"] = failures;
    if (!failures.empty()) status = 1;
  }
  out["provenance"] = ctx.provenance(json::object(), {{"Q", Q}, {"K", K}});
  ctx.write_json("gaps.json", out);
  if (status) std::cerr << "construct-gaps: prescribed gap spectrum not reproduced\n";
  return status;
}

inline int cmd_verify(const Context& ctx) {
  VerifyOptions vo;
  vo.order = ctx.opt.order;
  if (!ctx.opt.fault.empty()) {
    if (ctx.opt.fault != "wigner-phase") throw ConfigError("unknown fault '" + ctx.opt.fault + "' (known: wigner-phase)");
    vo.kernel = phase_fault_kernel;
  }
  if (!ctx.opt.filter.empty()) {
    bool known = false;
    for (const auto& s : verify_suites()) known = known || s.name == ctx.opt.filter;
    if (!known) throw ConfigError("unknown suite '" + ctx.opt.filter + "'");
  }
  const auto results = run_verify(vo, ctx.opt.filter);
  Csv csv({"suite", "checks", "max_error", "tolerance", "status"});
  json rows = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    csv.row({r.name, std::to_string(r.checks), fmt17(r.max_error), fmt17(r.tolerance), r.passed ? "PASS" : "FAIL"});
    rows.push_back({{"suite", r.name},
                    {"checks", r.checks},
                    {"max_error", num(r.max_error)},
                    {"tolerance", r.tolerance},
                    {"passed", r.passed},
                    {"note", r.note}});
    std::printf("%-16s %-4s checks=%-5d max_error=%.3e tol=%.0e\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                r.checks, r.max_error, r.tolerance);
    if (!r.passed) std::fprintf(stderr, "verify: identity '%s' failed (%s)\n", r.name.c_str(), r.note.c_str());
  }
  ctx.write("verify.csv", csv.str());
  ctx.write_json("verify.json", {{"suites", rows},
                                 {"all_passed", all},
                                 {"fault", ctx.opt.fault.empty() ? json(nullptr) : json(ctx.opt.fault)},
                                 {"provenance", ctx.provenance({{"order_override", ctx.opt.order}}, json::object())}});
  return all ? 0 : 1;
}

}  // namespace cli

/// Entry point of the command-line tool. Exit codes: 0 success, 1 assertion
/// failure, 2 usage or configuration error.
inline int run_cli(int argc, char** argv) {
  CLI::App app{"Landau-level spectral toolkit"};
  app.set_version_flag("--version", kToolVersion);
  CliOptions opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config_path, "experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "seed override");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--order", opt.order, "quadrature order override")->check(CLI::NonNegativeNumber);
  app.add_option("--filter", opt.filter, "verify: run only the named suite");
  app.add_option("--inject-fault", opt.fault, "verify: run the suites against a deliberately broken kernel");
  const std::vector<std::pair<std::string, std::string>> commands{
      {"radial-eigs", "Weyl, anti-Wick and Fourier-route eigenvalues of a radial symbol"},
      {"spectrum", "spectrum of the truncated perturbed Landau Hamiltonian"},
      {"toeplitz", "Toeplitz eigenvalues of a radial weight with model residuals"},
      {"capacity", "logarithmic capacity from Fekete configurations"},
      {"asymptotics", "asymptotic predictions and coefficient tables"},
      {"construct-gaps", "potential with a prescribed finite gap spectrum"},
      {"verify", "identity suites"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  opt.command = app.get_subcommands().front()->get_name();
  if (seed_opt->count()) opt.seed = seed;

  cli::Context ctx;
  ctx.opt = opt;
  try {
    if (opt.command != "verify" || !opt.config_path.empty()) {
      if (opt.config_path.empty()) throw ConfigError("--config is required for '" + opt.command + "'");
      ctx.config = load_config(opt.config_path);
      if (!ctx.config.is_object()) throw ConfigError("config root must be a JSON object");
    }
    ctx.out = opt.out_dir;
    std::filesystem::create_directories(ctx.out);
    if (opt.command == "radial-eigs") return cli::cmd_radial_eigs(ctx);
    if (opt.command == "spectrum") return cli::cmd_spectrum(ctx);
    if (opt.command == "toeplitz") return cli::cmd_toeplitz(ctx);
    if (opt.command == "capacity") return cli::cmd_capacity(ctx);
    if (opt.command == "asymptotics") return cli::cmd_asymptotics(ctx);
    if (opt.command == "construct-gaps") return cli::cmd_construct_gap_potential(ctx);
    if (opt.command == "verify") return cli::cmd_verify(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace landau
