#pragma once

// JSON channel specifications and report serialization. Channel specs
// look like
//   {"kind": "pure",   "alpha": 0.6}
//   {"kind": "werner", "gamma": 0.5}
//   {"kind": "xstate", "rho11": ..., "rho22": ..., "rho33": ...,
//                      "rho44": ..., "rho23": ..., "rho14": ...}
// Unknown keys are rejected so typos fail loudly.

#include "telefid/analysis.hpp"
#include "telefid/channels.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>
#include <set>
#include <string>

namespace telefid::json_io {

using json = nlohmann::ordered_json;

struct ChannelConfig {
  std::string kind;  // "pure", "werner" or "xstate"
  std::optional<channels::PureChannel> pure;
  std::optional<channels::XStateParams> xstate;  // set for werner too
  std::optional<double> gamma;

  bool is_pure() const { return kind == "pure"; }

  qkernel::TwoQubitDensity density() const {
    return is_pure() ? channels::pure_channel_density(*pure)
                     : channels::xstate_density(*xstate);
  }

  double concurrence() const {
    return is_pure() ? channels::pure_concurrence(*pure)
                     : channels::xstate_concurrence(*xstate);
  }
};

namespace detail {

inline double require_number(const json& j, const std::string& key) {
  if (!j.contains(key))
    throw std::invalid_argument("channel spec: missing key \"" + key + "\"");
  if (!j.at(key).is_number())
    throw std::invalid_argument("channel spec: \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

inline void reject_unknown_keys(const json& j, const std::set<std::string>& known) {
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw std::invalid_argument("channel spec: unknown key \"" + item.key() + "\"");
}

}  // namespace detail

inline ChannelConfig parse_channel(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw std::invalid_argument("channel spec: expected an object with a \"kind\" string");
  ChannelConfig cfg;
  cfg.kind = j.at("kind").get<std::string>();
  if (cfg.kind == "pure") {
    detail::reject_unknown_keys(j, {"kind", "alpha", "beta"});
    const double alpha = detail::require_number(j, "alpha");
    cfg.pure = j.contains("beta")
                   ? channels::PureChannel(alpha, detail::require_number(j, "beta"))
                   : channels::PureChannel::from_alpha(alpha);
  } else if (cfg.kind == "werner") {
    detail::reject_unknown_keys(j, {"kind", "gamma"});
    cfg.gamma = detail::require_number(j, "gamma");
    cfg.xstate = channels::werner_xstate(channels::WernerParams(*cfg.gamma));
  } else if (cfg.kind == "xstate") {
    detail::reject_unknown_keys(
        j, {"kind", "rho11", "rho22", "rho33", "rho44", "rho23", "rho14"});
    cfg.xstate = channels::XStateParams(
        detail::require_number(j, "rho11"), detail::require_number(j, "rho22"),
        detail::require_number(j, "rho33"), detail::require_number(j, "rho44"),
        j.contains("rho23") ? detail::require_number(j, "rho23") : 0.0,
        j.contains("rho14") ? detail::require_number(j, "rho14") : 0.0);
  } else {
    throw std::invalid_argument("channel spec: unknown kind \"" + cfg.kind +
                                "\" (expected pure, werner or xstate)");
  }
  return cfg;
}

inline json channel_echo(const ChannelConfig& cfg) {
  json j;
  j["kind"] = cfg.kind;
  if (cfg.is_pure()) {
    j["alpha"] = cfg.pure->alpha();
    j["beta"] = cfg.pure->beta();
  } else {
    if (cfg.gamma) j["gamma"] = *cfg.gamma;
    const auto& p = *cfg.xstate;
    j["rho11"] = p.rho11();
    j["rho22"] = p.rho22();
    j["rho33"] = p.rho33();
    j["rho44"] = p.rho44();
    j["rho23"] = p.rho23();
    j["rho14"] = p.rho14();
  }
  j["concurrence"] = cfg.concurrence();
  return j;
}

// Infinities mark degenerate (unsatisfiable) thresholds; JSON has no
// literal for them, so they are emitted as strings.
inline json finite_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  if (std::isnan(v)) return json("nan");
  return json(v);
}

inline const char* regime_name(analysis::Verdict v) {
  switch (v) {
    case analysis::Verdict::yes: return "quantum";
    case analysis::Verdict::no: return "classical";
    case analysis::Verdict::boundary: return "boundary";
  }
  return "?";
}

inline json report_to_json(const analysis::RegimeReport& r) {
  json j;
  j["classical_limit_exceeded"] = r.classical_limit_exceeded == analysis::Verdict::yes;
  j["classical_limit_verdict"] = to_string(r.classical_limit_exceeded);
  j["feature_margin"] = r.feature_margin;
  if (r.improvement) {
    j["improvement_verdict"] = to_string(*r.improvement);
    j["improvement_margin"] = *r.improvement_margin;
  }
  j["satisfied_branch"] = r.satisfied_branch;
  json tv;
  for (const auto& [name, value] : r.threshold_values)
    tv[name] = finite_or_string(value);
  j["threshold_values"] = tv;
  json mg;
  for (const auto& [name, value] : r.margins) mg[name] = finite_or_string(value);
  j["margins"] = mg;
  j["notes"] = r.notes;
  return j;
}

}  // namespace telefid::json_io
