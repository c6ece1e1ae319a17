// telefid: average teleportation fidelity for pure partially entangled
// and X-form two-qubit channels, measured in partially entangled bases.
//
// Exit codes: 0 success, 1 validation failure, 2 input error,
// 3 self-check discrepancy.

#include "telefid/analysis.hpp"
#include "telefid/channels.hpp"
#include "telefid/json_io.hpp"
#include "telefid/protocol.hpp"
#include "telefid/qkernel.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace qk = telefid::qkernel;
namespace ch = telefid::channels;
namespace pr = telefid::protocol;
namespace an = telefid::analysis;
namespace jio = telefid::json_io;
using jio::json;

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kInputError = 2, kSelfCheck = 3 };

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Write through a temp file and rename, so readers never see a torn file.
void write_output(const std::optional<std::string>& path, const std::string& content) {
  if (!path) {
    std::cout << content;
    return;
  }
  const std::filesystem::path target(*path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::invalid_argument("cannot open output file " + tmp.string());
    f << content;
  }
  std::filesystem::rename(tmp, target);
}

void emit_json(const std::optional<std::string>& path, const json& j) {
  write_output(path, j.dump(2) + "\n");
}

// ── channel / basis flags shared across subcommands ─────────────────

struct ChannelFlags {
  CLI::Option* werner = nullptr;
  CLI::Option* pure_alpha = nullptr;
  CLI::Option* pure_conc = nullptr;
  CLI::Option* xstate = nullptr;
  CLI::Option* json_path = nullptr;
  double gamma = 0, alpha = 0, conc = 0;
  std::vector<double> xs;
  std::string path;

  void attach(CLI::App* cmd) {
    werner = cmd->add_option("--werner-gamma", gamma,
                             "Werner channel mixing weight in [0,1]");
    pure_alpha = cmd->add_option("--pure-alpha", alpha,
                                 "pure channel amplitude alpha in [0,1]");
    pure_conc = cmd->add_option("--pure-concurrence", conc,
                                "pure channel concurrence in [0,1]");
    xstate = cmd->add_option("--xstate", xs,
                             "X channel entries: rho11 rho22 rho33 rho44 rho23 rho14")
                 ->expected(6);
    json_path = cmd->add_option("--channel-json", path,
                                "path to a JSON channel spec");
  }

  jio::ChannelConfig resolve() const {
    const int given = (werner->count() > 0) + (pure_alpha->count() > 0) +
                      (pure_conc->count() > 0) + (xstate->count() > 0) +
                      (json_path->count() > 0);
    if (given != 1)
      throw std::invalid_argument(
          "specify exactly one channel: --werner-gamma, --pure-alpha, "
          "--pure-concurrence, --xstate or --channel-json");
    jio::ChannelConfig cfg;
    if (werner->count()) {
      cfg.kind = "werner";
      cfg.gamma = gamma;
      cfg.xstate = ch::werner_xstate(ch::WernerParams(gamma));
    } else if (pure_alpha->count()) {
      cfg.kind = "pure";
      cfg.pure = ch::PureChannel::from_alpha(alpha);
    } else if (pure_conc->count()) {
      cfg.kind = "pure";
      cfg.pure = ch::PureChannel::from_concurrence(conc);
    } else if (xstate->count()) {
      cfg.kind = "xstate";
      cfg.xstate = ch::XStateParams(xs[0], xs[1], xs[2], xs[3], xs[4], xs[5]);
    } else {
      std::ifstream f(path);
      if (!f) throw std::invalid_argument("cannot read channel spec " + path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("channel spec is not valid JSON: ") + e.what());
      }
      cfg = jio::parse_channel(j);
    }
    return cfg;
  }
};

struct BasisFlags {
  CLI::Option* conc = nullptr;
  CLI::Option* xy = nullptr;
  double c = 1.0;
  std::vector<double> v;

  void attach(CLI::App* cmd) {
    conc = cmd->add_option("--basis-concurrence", c,
                           "measurement basis concurrence in [0,1] (default 1, Bell)");
    xy = cmd->add_option("--basis-xy", v, "measurement basis amplitudes x y")
             ->expected(2);
  }

  pr::MeasurementBasis resolve() const {
    if (conc->count() && xy->count())
      throw std::invalid_argument("give either --basis-concurrence or --basis-xy, not both");
    if (xy->count()) return pr::MeasurementBasis::build(v[0], v[1]);
    return pr::MeasurementBasis::from_concurrence(c);
  }
};

json basis_echo(const pr::MeasurementBasis& b) {
  json j;
  j["x"] = b.x();
  j["y"] = b.y();
  j["concurrence"] = b.concurrence();
  return j;
}

double closed_form_average(const jio::ChannelConfig& cfg, double c_meas) {
  return cfg.is_pure()
             ? an::fp_closed(c_meas, ch::pure_concurrence(*cfg.pure))
             : an::fx_closed_general(c_meas, *cfg.xstate);
}

// ── fidelity ────────────────────────────────────────────────────────

struct FidelityCmd {
  ChannelFlags channel;
  BasisFlags basis;
  std::optional<std::string> out;
  std::string format = "json";

  int run() const {
    if (format != "json")
      throw std::invalid_argument("fidelity supports only --format json");
    const auto cfg = channel.resolve();
    const auto b = basis.resolve();
    const double f = closed_form_average(cfg, b.concurrence());
    json j;
    j["command"] = "fidelity";
    j["channel"] = jio::channel_echo(cfg);
    j["basis"] = basis_echo(b);
    j["average_fidelity"] = f;
    j["classical_limit"] = an::kClassicalLimit;
    j["margin"] = f - an::kClassicalLimit;
    j["regime"] = jio::regime_name(an::classify(f - an::kClassicalLimit));
    emit_json(out, j);
    return kOk;
  }
};

// ── simulate ────────────────────────────────────────────────────────

struct SimulateCmd {
  ChannelFlags channel;
  BasisFlags basis;
  std::optional<std::string> out;
  std::string format = "json";
  std::string mode = "mc";
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int theta_nodes = 64;
  int phi_nodes = 64;

  int run() const {
    if (format != "json")
      throw std::invalid_argument("simulate supports only --format json");
    const auto cfg = channel.resolve();
    const auto b = basis.resolve();
    const auto rho = cfg.density();
    const double closed = closed_form_average(cfg, b.concurrence());

    json j;
    j["command"] = "simulate";
    j["mode"] = mode;
    j["channel"] = jio::channel_echo(cfg);
    j["basis"] = basis_echo(b);

    double estimate = 0.0, tolerance = 0.0;
    if (mode == "mc") {
      const auto r = pr::average_fidelity_mc(rho, b, samples, seed, threads);
      estimate = r.estimate;
      tolerance = std::max(5.0 * r.std_error, 1e-12);
      j["samples"] = samples;
      j["seed"] = seed;
      j["estimate"] = r.estimate;
      j["std_error"] = r.std_error;
    } else if (mode == "quadrature") {
      const auto grid = qk::bloch_quadrature(theta_nodes, phi_nodes);
      estimate = pr::average_fidelity_quadrature(rho, b, grid);
      tolerance = 1e-8;
      j["grid"] = {{"n_theta", theta_nodes}, {"n_phi", phi_nodes}};
      j["estimate"] = estimate;
    } else {
      throw std::invalid_argument("--mode must be mc or quadrature");
    }

    const double disc = std::abs(estimate - closed);
    const bool ok = disc <= tolerance;
    j["closed_form"] = closed;
    j["abs_discrepancy"] = disc;
    j["tolerance"] = tolerance;
    j["selfcheck"] = ok ? "ok" : "fail";
    emit_json(out, j);
    if (!ok) {
      std::cerr << "self-check discrepancy: |" << fmt12(estimate) << " - "
                << fmt12(closed) << "| > " << fmt12(tolerance) << "\n";
      return kSelfCheck;
    }
    return kOk;
  }
};

// ── thresholds ──────────────────────────────────────────────────────

struct ThresholdsCmd {
  ChannelFlags channel;
  std::optional<std::string> out;
  std::string format = "json";
  double pure_basis_conc = 1.0;
  double pure_chan_conc = 1.0;
  double x_basis_conc = 1.0;

  int run() const {
    if (format != "json")
      throw std::invalid_argument("thresholds supports only --format json");
    const auto cfg = channel.resolve();
    if (cfg.is_pure())
      throw std::invalid_argument("thresholds needs an X-form channel "
                                  "(--werner-gamma, --xstate or --channel-json)");
    const auto& p = *cfg.xstate;

    const bool shared = std::abs(x_basis_conc - pure_basis_conc) <= 1e-12;
    const auto feature = an::quantum_feature_check(p, x_basis_conc);
    const auto situation =
        shared ? an::situation_b2_report(x_basis_conc, pure_chan_conc, p)
               : an::situation_b1_report(pure_basis_conc, pure_chan_conc,
                                         x_basis_conc, p);

    json j;
    j["command"] = "thresholds";
    j["situation"] = shared ? "B2" : "B1";
    j["channel"] = jio::channel_echo(cfg);
    j["pure_reference"] = {{"basis_concurrence", pure_basis_conc},
                           {"channel_concurrence", pure_chan_conc}};
    j["x_basis_concurrence"] = x_basis_conc;
    j["quantum_feature"] = jio::report_to_json(feature);
    j["improvement"] = jio::report_to_json(situation);
    emit_json(out, j);
    return kOk;
  }
};

// ── sweep ───────────────────────────────────────────────────────────

struct SweepCmd {
  ChannelFlags channel;
  BasisFlags basis;
  std::optional<std::string> out;
  std::string format = "csv";
  std::string preset;
  std::string param;
  double from = 0.0, to = 1.0;
  int points = 101;
  CLI::Option* fp_ref_opt = nullptr;
  double fp_ref = 0.0;
  int theta_nodes = 64;
  int phi_nodes = 64;

  struct Row {
    double param, fx, fp_ref, fx_numeric;
    std::string regime;
  };

  int run() const {
    std::string param_name = param;
    double lo = from, hi = to;
    int n = points;
    double fpref = fp_ref;
    std::optional<jio::ChannelConfig> base;
    double basis_conc = 0.0;

    if (!preset.empty()) {
      if (preset != "fig1")
        throw std::invalid_argument("unknown preset \"" + preset + "\"");
      // Werner channel against the pure Bell reference measured with
      // concurrence 0.6, shared X-side basis concurrence 0.9.
      param_name = "gamma";
      lo = 0.0;
      hi = 1.0;
      n = 101;
      fpref = an::fp_closed(0.6, 1.0);
      basis_conc = 0.9;
      jio::ChannelConfig cfg;
      cfg.kind = "werner";
      cfg.gamma = 0.0;
      cfg.xstate = ch::werner_xstate(ch::WernerParams(0.0));
      base = cfg;
    } else {
      if (param_name.empty())
        throw std::invalid_argument("sweep needs --preset fig1 or --param");
      if (n < 2) throw std::invalid_argument("--points must be at least 2");
      if (!fp_ref_opt->count())
        throw std::invalid_argument("sweep needs --fp-ref for the reference column");
      if (param_name == "basis-concurrence") {
        base = channel.resolve();
      } else if (param_name == "gamma") {
        const int given = channel.werner->count() + channel.pure_alpha->count() +
                          channel.pure_conc->count() + channel.xstate->count() +
                          channel.json_path->count();
        if (given != 0)
          throw std::invalid_argument("--param gamma sweeps a Werner channel; "
                                      "drop the channel flags");
        basis_conc = 0.0;  // resolved below
      } else if (param_name == "rho14" || param_name == "rho23") {
        base = channel.resolve();
        if (base->is_pure())
          throw std::invalid_argument("--param " + param_name +
                                      " needs an X-form base channel");
      } else {
        throw std::invalid_argument(
            "--param must be gamma, rho14, rho23 or basis-concurrence");
      }
      basis_conc = basis.resolve().concurrence();
    }
    if (!preset.empty()) {
      // preset fixes the basis; reject contradictory flags
      if (basis.conc->count() || basis.xy->count())
        throw std::invalid_argument("--preset fig1 fixes the basis; drop basis flags");
    }

    std::vector<Row> rows;
    rows.reserve(n);
    const auto grid = qk::bloch_quadrature(theta_nodes, phi_nodes);
    for (int i = 0; i < n; ++i) {
      const double v = lo + (hi - lo) * i / (n - 1);
      double cb = basis_conc;
      std::optional<ch::XStateParams> p;
      std::optional<ch::PureChannel> pure;
      try {
        if (param_name == "gamma") {
          p = ch::werner_xstate(ch::WernerParams(v));
        } else if (param_name == "rho14" || param_name == "rho23") {
          const auto& b0 = *base->xstate;
          p = ch::XStateParams(b0.rho11(), b0.rho22(), b0.rho33(), b0.rho44(),
                               param_name == "rho23" ? v : b0.rho23(),
                               param_name == "rho14" ? v : b0.rho14());
        } else {  // basis-concurrence
          cb = v;
          if (base->is_pure())
            pure = *base->pure;
          else
            p = *base->xstate;
        }
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("sweep value " + fmt12(v) +
                                    " is not a valid channel: " + e.what());
      }
      const double fx = p ? an::fx_closed_general(cb, *p)
                          : an::fp_closed(cb, ch::pure_concurrence(*pure));
      const auto rho = p ? ch::xstate_density(*p) : ch::pure_channel_density(*pure);
      const auto b = pr::MeasurementBasis::from_concurrence(cb);
      const double fxn = pr::average_fidelity_quadrature(rho, b, grid);
      rows.push_back({v, fx, fpref, fxn,
                      jio::regime_name(an::classify(fx - an::kClassicalLimit))});
    }

    if (format == "csv") {
      std::ostringstream os;
      os << "param,F_X,F_p_ref,classical_limit,F_X_numeric,regime\n";
      for (const auto& r : rows)
        os << fmt12(r.param) << ',' << fmt12(r.fx) << ',' << fmt12(r.fp_ref)
           << ',' << fmt12(an::kClassicalLimit) << ',' << fmt12(r.fx_numeric)
           << ',' << r.regime << '\n';
      write_output(out, os.str());
    } else if (format == "json") {
      json j;
      j["command"] = "sweep";
      j["param"] = param_name;
      if (!preset.empty()) j["preset"] = preset;
      json jr = json::array();
      for (const auto& r : rows)
        jr.push_back({{"param", r.param},
                      {"F_X", r.fx},
                      {"F_p_ref", r.fp_ref},
                      {"classical_limit", an::kClassicalLimit},
                      {"F_X_numeric", r.fx_numeric},
                      {"regime", r.regime}});
      j["rows"] = jr;
      emit_json(out, j);
    } else {
      throw std::invalid_argument("--format must be json or csv");
    }
    return kOk;
  }
};

// ── validate ────────────────────────────────────────────────────────

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;
};

void record_failure(SuiteResult& r, const std::string& msg) {
  if (r.failures == 0) r.first_failure = msg;
  ++r.failures;
}

SuiteResult suite_oracle_equivalence(int n, std::uint64_t seed) {
  SuiteResult r{"oracle-equivalence", n};
  const auto grid = qk::bloch_quadrature(64, 64);
  const std::uint64_t s_basis = qk::rng::at(seed, 1);
  const std::uint64_t s_chan = qk::rng::at(seed, 2);
  for (int i = 0; i < n; ++i) {
    const double cb = qk::rng::unit(s_basis, i);
    const auto b = pr::MeasurementBasis::from_concurrence(cb);
    double numeric, closed;
    if (i % 2 == 0) {
      const auto chp = ch::PureChannel::from_concurrence(qk::rng::unit(s_chan, i));
      numeric = pr::average_fidelity_quadrature(ch::pure_channel_density(chp), b, grid);
      closed = an::fp_closed(cb, ch::pure_concurrence(chp));
    } else {
      const auto p = ch::sample_xstate(s_chan, i);
      numeric = pr::average_fidelity_quadrature(ch::xstate_density(p), b, grid);
      closed = an::fx_closed_general(cb, p);
    }
    if (std::abs(numeric - closed) > 1e-10)
      record_failure(r, "case " + std::to_string(i) + ": |" + fmt12(numeric) +
                            " - " + fmt12(closed) + "| > 1e-10");
  }
  return r;
}

SuiteResult suite_identity_check(int n, std::uint64_t seed) {
  SuiteResult r{"identity-check", n};
  const std::uint64_t s_psi = qk::rng::at(seed, 3);
  const std::uint64_t s_ch = qk::rng::at(seed, 4);
  const std::uint64_t s_b = qk::rng::at(seed, 5);
  for (int i = 0; i < n; ++i) {
    const auto psi = qk::haar_qubit(s_psi, i);
    const auto chp = ch::PureChannel::from_alpha(qk::rng::unit(s_ch, i));
    const auto b = pr::MeasurementBasis::from_concurrence(qk::rng::unit(s_b, i));
    const double res = pr::decomposition_identity_check(psi, chp, b);
    if (res > 1e-12)
      record_failure(r, "case " + std::to_string(i) + ": residual " + fmt12(res));
  }
  return r;
}

SuiteResult suite_concurrence_oracle(int n, std::uint64_t seed) {
  SuiteResult r{"concurrence-oracle", n};
  const std::uint64_t s_x = qk::rng::at(seed, 6);
  const std::uint64_t s_p = qk::rng::at(seed, 7);
  for (int i = 0; i < n; ++i) {
    double closed, numeric;
    if (i % 4 == 3) {
      const auto chp = ch::PureChannel::from_alpha(qk::rng::unit(s_p, i));
      closed = ch::pure_concurrence(chp);
      numeric = qk::wootters_concurrence(ch::pure_channel_density(chp));
    } else {
      const auto p = ch::sample_xstate(s_x, i);
      closed = ch::xstate_concurrence(p);
      numeric = qk::wootters_concurrence(ch::xstate_density(p));
    }
    if (std::abs(closed - numeric) > 1e-10)
      record_failure(r, "case " + std::to_string(i) + ": |" + fmt12(closed) +
                            " - " + fmt12(numeric) + "| > 1e-10");
  }
  return r;
}

SuiteResult suite_threshold_consistency(int n, std::uint64_t seed) {
  SuiteResult r{"threshold-consistency", n};
  const std::uint64_t s_x = qk::rng::at(seed, 8);
  const std::uint64_t s_c = qk::rng::at(seed, 9);
  for (int i = 0; i < n; ++i) {
    const auto p = ch::sample_xstate(s_x, i);
    const double cb = qk::rng::unit(s_c, 3 * i);
    const double q = p.rho11() + p.rho44();
    const double s = std::sqrt(p.rho11() * p.rho44());
    const double cab = ch::principal_concurrence_signed(p);

    const auto feature = an::quantum_feature_check(p, cb);
    if (std::abs(feature.feature_margin) > 1e-9) {
      const bool want = feature.feature_margin > 0.0;
      if ((feature.satisfied_branch == "both") != want)
        record_failure(r, "case " + std::to_string(i) +
                              ": feature branch disagrees with margin");
      if ((feature.classical_limit_exceeded == an::Verdict::yes) != want)
        record_failure(r, "case " + std::to_string(i) + ": feature verdict mismatch");
    }
    // threshold functions fall with their argument
    if (cb > 1e-6) {
      if (an::frak_C(1.0, p.rho11(), p.rho44()) >
          an::frak_C(cb, p.rho11(), p.rho44()) + 1e-12)
        record_failure(r, "case " + std::to_string(i) + ": frak ordering violated");
      if (q > 0.0 &&
          an::cal_C(cb, p.rho11(), p.rho44()) + 1e-12 <
              an::cal_C(1.0, p.rho11(), p.rho44()))
        record_failure(r, "case " + std::to_string(i) + ": cal ordering violated");
    }
    // improvement reports against the direct margin
    const double cpb = qk::rng::unit(s_c, 3 * i + 1);
    const double cpc = qk::rng::unit(s_c, 3 * i + 2);
    const auto b1 = an::situation_b1_report(cpb, cpc, cb, p);
    if (b1.improvement_margin && std::abs(*b1.improvement_margin) > 1e-9) {
      const bool want = *b1.improvement_margin > 0.0;
      if ((b1.satisfied_branch == "both") != want)
        record_failure(r, "case " + std::to_string(i) + ": b1 sets disagree with margin");
    }
    const auto b2 = an::situation_b2_report(cb, cpc, p);
    if (b2.improvement_margin && std::abs(*b2.improvement_margin) > 1e-9) {
      const bool want = *b2.improvement_margin > 0.0;
      if ((b2.satisfied_branch == "both") != want)
        record_failure(r, "case " + std::to_string(i) + ": b2 sets disagree with margin");
    }
    // critical-sum ordering under cal monotonicity
    if (q > 0.0 && std::abs(cab + cpc - 1.0) > 1e-9) {
      const auto cal_or_inf = [&](double arg) {
        const double denom = arg + 2.0 * s;
        return denom > 0.0 ? q / denom : std::numeric_limits<double>::infinity();
      };
      const bool sum_above = cab + cpc > 1.0;
      if (sum_above != (cal_or_inf(1.0 - cpc) >= cal_or_inf(cab)))
        record_failure(r, "case " + std::to_string(i) + ": critical-sum ordering");
    }
  }
  return r;
}

struct ValidateCmd {
  std::optional<std::string> out;
  std::string format = "json";
  std::string depth = "quick";
  std::uint64_t seed = 20240501;

  int run() const {
    if (format != "json")
      throw std::invalid_argument("validate supports only --format json");
    int n;
    if (depth == "quick")
      n = 100;
    else if (depth == "full")
      n = 10000;
    else
      throw std::invalid_argument("--depth must be quick or full");

    const std::vector<SuiteResult> suites = {
        suite_oracle_equivalence(n, seed), suite_identity_check(n, seed),
        suite_concurrence_oracle(n, seed), suite_threshold_consistency(n, seed)};

    bool ok = true;
    json js = json::array();
    for (const auto& s : suites) {
      json e;
      e["name"] = s.name;
      e["cases"] = s.cases;
      e["failures"] = s.failures;
      if (s.failures > 0) e["first_failure"] = s.first_failure;
      js.push_back(e);
      ok = ok && s.failures == 0;
    }
    json j;
    j["command"] = "validate";
    j["depth"] = depth;
    j["cases_per_suite"] = n;
    j["suites"] = js;
    j["status"] = ok ? "ok" : "fail";
    emit_json(out, j);
    return ok ? kOk : kValidationFailure;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"average teleportation fidelity for partially entangled bases "
               "and X-form channels"};
  app.require_subcommand(1);

  FidelityCmd fid;
  auto* cfid = app.add_subcommand("fidelity", "closed-form average fidelity");
  fid.channel.attach(cfid);
  fid.basis.attach(cfid);
  std::string fid_out, sim_out, thr_out, swp_out, val_out;
  auto* fid_out_opt = cfid->add_option("--out", fid_out, "write output to this path");
  cfid->add_option("--format", fid.format, "output format (json)");

  SimulateCmd sim;
  auto* csim = app.add_subcommand("simulate",
                                  "numeric average fidelity with closed-form self-check");
  sim.channel.attach(csim);
  sim.basis.attach(csim);
  csim->add_option("--mode", sim.mode, "mc or quadrature (default mc)");
  csim->add_option("--samples", sim.samples, "Monte Carlo sample count (default 1e6)");
  csim->add_option("--seed", sim.seed, "RNG seed (default 1)");
  csim->add_option("--threads", sim.threads, "worker threads, 0 = auto");
  csim->add_option("--theta-nodes", sim.theta_nodes, "quadrature nodes in cos(theta)");
  csim->add_option("--phi-nodes", sim.phi_nodes, "quadrature nodes in phi");
  auto* sim_out_opt = csim->add_option("--out", sim_out, "write output to this path");
  csim->add_option("--format", sim.format, "output format (json)");

  ThresholdsCmd thr;
  auto* cthr = app.add_subcommand("thresholds",
                                  "regime reports against the classical limit and a "
                                  "pure reference channel");
  thr.channel.attach(cthr);
  cthr->add_option("--pure-basis-concurrence", thr.pure_basis_conc,
                   "measurement concurrence used with the pure reference");
  cthr->add_option("--pure-channel-concurrence", thr.pure_chan_conc,
                   "concurrence of the pure reference channel");
  cthr->add_option("--x-basis-concurrence", thr.x_basis_conc,
                   "measurement concurrence used with the X channel");
  auto* thr_out_opt = cthr->add_option("--out", thr_out, "write output to this path");
  cthr->add_option("--format", thr.format, "output format (json)");

  SweepCmd swp;
  auto* cswp = app.add_subcommand("sweep", "parameter sweep table (CSV or JSON)");
  swp.channel.attach(cswp);
  swp.basis.attach(cswp);
  cswp->add_option("--preset", swp.preset, "named sweep; fig1 = Werner gamma 0..1");
  cswp->add_option("--param", swp.param,
                   "swept parameter: gamma, rho14, rho23 or basis-concurrence");
  cswp->add_option("--from", swp.from, "first swept value");
  cswp->add_option("--to", swp.to, "last swept value");
  cswp->add_option("--points", swp.points, "number of grid points (default 101)");
  swp.fp_ref_opt = cswp->add_option("--fp-ref", swp.fp_ref,
                                    "pure-channel reference fidelity column");
  cswp->add_option("--theta-nodes", swp.theta_nodes, "quadrature nodes in cos(theta)");
  cswp->add_option("--phi-nodes", swp.phi_nodes, "quadrature nodes in phi");
  auto* swp_out_opt = cswp->add_option("--out", swp_out, "write output to this path");
  cswp->add_option("--format", swp.format, "output format: csv (default) or json");

  ValidateCmd val;
  auto* cval = app.add_subcommand("validate", "run the numeric self-check suites");
  cval->add_option("--depth", val.depth, "quick (100 cases) or full (10000 cases)");
  cval->add_option("--seed", val.seed, "RNG seed for the random cases");
  auto* val_out_opt = cval->add_option("--out", val_out, "write output to this path");
  cval->add_option("--format", val.format, "output format (json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (cfid->parsed()) {
      if (fid_out_opt->count()) fid.out = fid_out;
      return fid.run();
    }
    if (csim->parsed()) {
      if (sim_out_opt->count()) sim.out = sim_out;
      return sim.run();
    }
    if (cthr->parsed()) {
      if (thr_out_opt->count()) thr.out = thr_out;
      return thr.run();
    }
    if (cswp->parsed()) {
      if (swp_out_opt->count()) swp.out = swp_out;
      return swp.run();
    }
    if (cval->parsed()) {
      if (val_out_opt->count()) val.out = val_out;
      return val.run();
    }
  } catch (const telefid::EigenSolverError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kSelfCheck;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
