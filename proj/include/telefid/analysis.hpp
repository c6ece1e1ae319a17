#pragma once

// Closed-form average fidelities and the threshold algebra that decides
// when an X-form channel beats the classical limit or a pure reference
// channel. Margins on the fidelity scale come with a +-1e-9 boundary
// band so callers can distinguish a robust verdict from a coin flip at
// the edge.

#include "telefid/channels.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace telefid::analysis {

inline constexpr double kClassicalLimit = 2.0 / 3.0;
inline constexpr double kBoundaryBand = 1e-9;

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void require_unit_interval(double v, const char* who) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(who) + ": expected a value in [0, 1]");
}

}  // namespace detail

// Haar-averaged fidelity of the pure-channel protocol.
inline double fp_closed(double c_meas, double c_chan) {
  detail::require_unit_interval(c_meas, "fp_closed: c_meas");
  detail::require_unit_interval(c_chan, "fp_closed: c_chan");
  return 2.0 / 3.0 + c_meas * c_chan / 3.0;
}

// Haar-averaged fidelity through an arbitrary X-form channel. Exact for
// every valid parameter set; the inner coherence rho23 is the only
// off-diagonal entry that survives the average.
inline double fx_closed_general(double c_meas, const channels::XStateParams& p) {
  detail::require_unit_interval(c_meas, "fx_closed_general: c_meas");
  return 2.0 / 3.0 +
         (2.0 * c_meas * p.rho23() - (p.rho11() + p.rho44())) / 3.0;
}

// Same average written through the channel concurrence. Only valid when
// the entanglement sits in the inner block, so that the concurrence and
// rho23 are two names for the same coherence; rejected otherwise.
inline double fx_closed(double c_meas, const channels::XStateParams& p) {
  detail::require_unit_interval(c_meas, "fx_closed: c_meas");
  if (!channels::principal_subspace_ok(p))
    throw std::invalid_argument(
        "fx_closed: channel entanglement must sit in the {|01>,|10>} block");
  const double s = std::sqrt(p.rho11() * p.rho44());
  const double cbar = channels::xstate_concurrence(p);
  return 2.0 / 3.0 +
         (c_meas * (cbar + 2.0 * s) - (p.rho11() + p.rho44())) / 3.0;
}

// ── threshold functions ─────────────────────────────────────────────

// Channel-concurrence threshold (decreasing in c):
//   F(c) = [ (sqrt(rho11) - sqrt(rho44))^2 + 2 (1 - c) sqrt(rho11 rho44) ] / c
inline double frak_C(double c, double rho11, double rho44) {
  if (!(c > 0.0 && c <= 1.0))
    throw std::invalid_argument("frak_C: c must be in (0, 1]");
  if (rho11 < 0.0 || rho44 < 0.0)
    throw std::invalid_argument("frak_C: populations must be nonnegative");
  const double d = std::sqrt(rho11) - std::sqrt(rho44);
  return (d * d + 2.0 * (1.0 - c) * std::sqrt(rho11 * rho44)) / c;
}

// Measurement-concurrence threshold (decreasing in c):
//   C(c) = (rho11 + rho44) / (c + 2 sqrt(rho11 rho44))
inline double cal_C(double c, double rho11, double rho44) {
  detail::require_unit_interval(c, "cal_C: c");
  if (rho11 < 0.0 || rho44 < 0.0)
    throw std::invalid_argument("cal_C: populations must be nonnegative");
  const double denom = c + 2.0 * std::sqrt(rho11 * rho44);
  if (denom <= 0.0)
    throw std::invalid_argument("cal_C: vanishing denominator");
  return (rho11 + rho44) / denom;
}

// When measurement and channel share one concurrence value, the
// classical limit is beaten above this value.
inline double equal_concurrence_threshold(double rho11, double rho44) {
  if (rho11 < 0.0 || rho44 < 0.0)
    throw std::invalid_argument(
        "equal_concurrence_threshold: populations must be nonnegative");
  if (rho11 + rho44 > 1.0 + kNormTol)
    throw std::invalid_argument(
        "equal_concurrence_threshold: populations must not exceed 1");
  return std::sqrt(rho11 + rho44 + rho11 * rho44) - std::sqrt(rho11 * rho44);
}

// ── regime reports ──────────────────────────────────────────────────

enum class Verdict { no, boundary, yes };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::no: return "no";
    case Verdict::boundary: return "boundary";
    case Verdict::yes: return "yes";
  }
  return "?";
}

inline Verdict classify(double margin, double band = kBoundaryBand) {
  if (std::abs(margin) <= band) return Verdict::boundary;
  return margin > 0.0 ? Verdict::yes : Verdict::no;
}

struct RegimeReport {
  Verdict classical_limit_exceeded = Verdict::no;  // F_X vs 2/3
  double feature_margin = 0.0;                     // F_X - 2/3
  std::optional<Verdict> improvement;              // F_X vs F_p
  std::optional<double> improvement_margin;        // F_X - F_p
  std::string satisfied_branch;
  std::vector<std::pair<std::string, double>> threshold_values;
  std::vector<std::pair<std::string, double>> margins;
  std::vector<std::string> notes;
};

namespace detail {

// Threshold evaluations that tolerate out-of-domain arguments: a branch
// whose threshold degenerates is simply unsatisfiable, encoded as +inf.
inline double frak_or_inf(double c, double r11, double r44) {
  return c > 0.0 ? frak_C(c, r11, r44) : kInf;
}

inline double cal_or_inf(double arg, double r11, double r44) {
  const double denom = arg + 2.0 * std::sqrt(r11 * r44);
  return denom > 0.0 ? (r11 + r44) / denom : kInf;
}

}  // namespace detail

// Does the X channel beat the classical average 2/3? The margin is
// evaluated directly; the two sufficient routes from the threshold
// functions are reported alongside and agree away from the boundary.
inline RegimeReport quantum_feature_check(const channels::XStateParams& p,
                                          double c_meas) {
  detail::require_unit_interval(c_meas, "quantum_feature_check: c_meas");
  const double r11 = p.rho11(), r44 = p.rho44();
  const double cab = channels::principal_concurrence_signed(p);

  RegimeReport rep;
  rep.feature_margin = fx_closed_general(c_meas, p) - kClassicalLimit;
  rep.classical_limit_exceeded = classify(rep.feature_margin);

  const double frak1 = detail::frak_or_inf(1.0, r11, r44);
  const double frak_b = detail::frak_or_inf(c_meas, r11, r44);
  const double cal1 = detail::cal_or_inf(1.0, r11, r44);
  const double cal_ch = detail::cal_or_inf(cab, r11, r44);

  const bool channel_first = cab > frak1 && c_meas > cal_ch;
  const bool measurement_first = cab > frak_b && c_meas > cal1;
  rep.satisfied_branch = channel_first && measurement_first ? "both"
                         : channel_first                    ? "channel-first"
                         : measurement_first                ? "measurement-first"
                                                            : "none";

  rep.threshold_values = {
      {"frak_at_1", frak1},
      {"frak_at_basis", frak_b},
      {"cal_at_1", cal1},
      {"cal_at_channel", cal_ch},
      {"channel_concurrence_signed", cab},
      {"equal_concurrence_threshold", equal_concurrence_threshold(r11, r44)},
  };
  rep.margins = {
      {"feature", rep.feature_margin},
      {"channel_above_frak_at_1", cab - frak1},
      {"basis_above_cal_at_channel", c_meas - cal_ch},
      {"channel_above_frak_at_basis", cab - frak_b},
      {"basis_above_cal_at_1", c_meas - cal1},
  };
  return rep;
}

struct ImprovementResult {
  Verdict verdict;
  double fx;
  double fp;
  double margin;  // fx - fp
};

// Direct comparison of the two protocol averages.
inline ImprovementResult improvement_check(double c_meas_pure,
                                           double c_chan_pure,
                                           double c_meas_x,
                                           const channels::XStateParams& p) {
  const double fp = fp_closed(c_meas_pure, c_chan_pure);
  const double fx = fx_closed_general(c_meas_x, p);
  const double margin = fx - fp;
  return {classify(margin), fx, fp, margin};
}

// Situation with independently chosen measurement entanglement on each
// side: pure reference (c_meas_pure, c_chan_pure) against the X channel
// measured with concurrence c_meas_x.
inline RegimeReport situation_b1_report(double c_meas_pure, double c_chan_pure,
                                        double c_meas_x,
                                        const channels::XStateParams& p) {
  detail::require_unit_interval(c_meas_pure, "situation_b1_report: c_meas_pure");
  detail::require_unit_interval(c_chan_pure, "situation_b1_report: c_chan_pure");
  detail::require_unit_interval(c_meas_x, "situation_b1_report: c_meas_x");

  const double r11 = p.rho11(), r44 = p.rho44();
  const double q = r11 + r44;
  const double s = std::sqrt(r11 * r44);
  const double cab = channels::principal_concurrence_signed(p);
  const double prod = c_meas_pure * c_chan_pure;
  const double frak1 = detail::frak_or_inf(1.0, r11, r44);

  RegimeReport rep = quantum_feature_check(p, c_meas_x);
  rep.threshold_values.clear();
  rep.margins.clear();

  const auto imp = improvement_check(c_meas_pure, c_chan_pure, c_meas_x, p);
  rep.improvement = imp.verdict;
  rep.improvement_margin = imp.margin;

  const double set1_channel =
      c_meas_x > 0.0 ? prod / c_meas_x + frak_C(c_meas_x, r11, r44)
                     : detail::kInf;
  const double set1_basis = (q + prod) / (1.0 + 2.0 * s);
  const double set2_channel = prod + frak1;
  const double set2_basis_denom = cab + 2.0 * s;
  const double set2_basis =
      set2_basis_denom > 0.0 ? (q + prod) / set2_basis_denom : detail::kInf;

  const bool set1 = cab > set1_channel && c_meas_x > set1_basis;
  const bool set2 = cab > set2_channel && c_meas_x > set2_basis;
  rep.satisfied_branch = set1 && set2 ? "both"
                         : set1       ? "set-1"
                         : set2       ? "set-2"
                                      : "none";

  const double product_upper = 1.0 - frak1;
  const double less_entangled_bound = c_chan_pure - frak1;

  rep.threshold_values = {
      {"product_upper_bound", product_upper},
      {"set1_channel_bound", set1_channel},
      {"set1_basis_bound", set1_basis},
      {"set2_channel_bound", set2_channel},
      {"set2_basis_bound", set2_basis},
      {"less_entangled_product_bound", less_entangled_bound},
  };
  rep.margins = {
      {"improvement", imp.margin},
      {"product_below_upper_bound", product_upper - prod},
      {"set1_channel", cab - set1_channel},
      {"set1_basis", c_meas_x - set1_basis},
      {"set2_channel", cab - set2_channel},
      {"set2_basis", c_meas_x - set2_basis},
      {"less_entangled_product", less_entangled_bound - prod},
  };

  if (r11 == 0.0 && r44 == 0.0)
    rep.notes.push_back(
        "noise-free limit: improvement reduces to the concurrence-product "
        "comparison c_meas_pure*c_chan_pure < c_meas_x*c_chan_x");
  if (prod < less_entangled_bound)
    rep.notes.push_back(
        "a less entangled X channel than the pure reference can still improve");
  else if (prod < product_upper)
    rep.notes.push_back(
        "improvement requires the X channel to be more entangled than the "
        "pure reference");
  return rep;
}

// Situation with one shared measurement apparatus of concurrence
// c_meas_shared on both sides.
inline RegimeReport situation_b2_report(double c_meas_shared,
                                        double c_chan_pure,
                                        const channels::XStateParams& p) {
  detail::require_unit_interval(c_meas_shared, "situation_b2_report: c_meas_shared");
  detail::require_unit_interval(c_chan_pure, "situation_b2_report: c_chan_pure");

  const double r11 = p.rho11(), r44 = p.rho44();
  const double q = r11 + r44;
  const double s = std::sqrt(r11 * r44);
  const double cab = channels::principal_concurrence_signed(p);
  const double frak1 = detail::frak_or_inf(1.0, r11, r44);

  RegimeReport rep = quantum_feature_check(p, c_meas_shared);
  rep.threshold_values.clear();
  rep.margins.clear();

  const auto imp = improvement_check(c_meas_shared, c_chan_pure, c_meas_shared, p);
  rep.improvement = imp.verdict;
  rep.improvement_margin = imp.margin;

  const double set1_channel =
      c_chan_pure + detail::frak_or_inf(c_meas_shared, r11, r44);
  const double set1_basis = detail::cal_or_inf(1.0 - c_chan_pure, r11, r44);
  const double set2_channel = c_chan_pure + frak1;
  const double set2_basis = detail::cal_or_inf(cab - c_chan_pure, r11, r44);

  const bool set1 = cab > set1_channel && c_meas_shared > set1_basis;
  const bool set2 = cab > set2_channel && c_meas_shared > set2_basis;
  rep.satisfied_branch = set1 && set2 ? "both"
                         : set1       ? "set-1"
                         : set2       ? "set-2"
                                      : "none";

  const double channel_upper = 1.0 - frak1;
  const double critical_sum = cab + c_chan_pure;
  const double cal_at_cab = detail::cal_or_inf(cab, r11, r44);

  rep.threshold_values = {
      {"channel_upper_bound", channel_upper},
      {"set1_channel_bound", set1_channel},
      {"set1_basis_bound", set1_basis},
      {"set2_channel_bound", set2_channel},
      {"set2_basis_bound", set2_basis},
      {"critical_sum", critical_sum},
      {"cal_at_channel_x", cal_at_cab},
  };
  rep.margins = {
      {"improvement", imp.margin},
      {"channel_below_upper_bound", channel_upper - c_chan_pure},
      {"set1_channel", cab - set1_channel},
      {"set1_basis", c_meas_shared - set1_basis},
      {"set2_channel", cab - set2_channel},
      {"set2_basis", c_meas_shared - set2_basis},
  };

  // Both thresholds fall as their argument grows, so once the two
  // channel concurrences sum past 1 the pure-complement threshold sits
  // at or above the X-channel one.
  if (critical_sum > 1.0)
    rep.notes.push_back(
        "critical sum above 1: cal(1 - c_chan_pure) >= cal(c_chan_x), the "
        "shared-basis requirement is set by the pure complement");
  else
    rep.notes.push_back(
        "critical sum below 1: cal(1 - c_chan_pure) <= cal(c_chan_x)");
  return rep;
}

// Werner mixing weight where the X-channel average first matches
// fp_target, found by bisection on the closed form; no value when even
// the fully mixed-in limit gamma = 1 stays below the target.
inline std::optional<double> werner_crossover(double c_meas_x,
                                              double fp_target) {
  if (!(c_meas_x > 0.0 && c_meas_x <= 1.0))
    throw std::invalid_argument("werner_crossover: c_meas_x must be in (0, 1]");
  if (!(fp_target >= 2.0 / 3.0 - kNormTol && fp_target <= 1.0 + kNormTol))
    throw std::invalid_argument("werner_crossover: target must be in [2/3, 1]");

  const auto fx = [c_meas_x](double gamma) {
    return fx_closed(c_meas_x, channels::werner_xstate(channels::WernerParams(gamma)));
  };
  double lo = std::nextafter(1.0 / 3.0, 1.0);
  double hi = 1.0;
  if (fx(hi) < fp_target) return std::nullopt;
  if (fx(lo) >= fp_target) return lo;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (fx(mid) < fp_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace telefid::analysis
