#pragma once

// Channel families for the teleportation analysis: pure partially
// entangled kets, X-form mixed states, and the Werner line.

#include "telefid/qkernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace telefid::channels {

// ── pure channel ────────────────────────────────────────────────────

// alpha|01> + beta|10> with real nonnegative amplitudes, stored in the
// canonical order alpha <= beta.
class PureChannel {
 public:
  PureChannel(double alpha, double beta) {
    if (alpha < 0.0 || beta < 0.0)
      throw std::invalid_argument("PureChannel: amplitudes must be nonnegative");
    const double n2 = alpha * alpha + beta * beta;
    if (std::abs(n2 - 1.0) > kInputNormTol)
      throw std::invalid_argument("PureChannel: amplitudes must be normalized");
    const double inv = 1.0 / std::sqrt(n2);
    alpha_ = alpha * inv;
    beta_ = beta * inv;
    reordered_ = alpha_ > beta_;
    if (reordered_) std::swap(alpha_, beta_);
  }

  static PureChannel from_alpha(double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
      throw std::invalid_argument("PureChannel: alpha must be in [0, 1]");
    return PureChannel(alpha, std::sqrt(std::max(0.0, 1.0 - alpha * alpha)));
  }

  // concurrence c = 2 alpha beta, inverted on the alpha <= beta sheet
  static PureChannel from_concurrence(double c) {
    if (c < 0.0 || c > 1.0)
      throw std::invalid_argument("PureChannel: concurrence must be in [0, 1]");
    const double r = std::sqrt(std::max(0.0, 1.0 - c * c));
    return PureChannel(std::sqrt(0.5 * (1.0 - r)), std::sqrt(0.5 * (1.0 + r)));
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  bool reordered() const { return reordered_; }

  qkernel::Ket4 ket() const { return qkernel::Ket4(0.0, alpha_, beta_, 0.0); }

 private:
  double alpha_, beta_;
  bool reordered_;
};

inline qkernel::TwoQubitDensity pure_channel_density(const PureChannel& ch) {
  return qkernel::TwoQubitDensity::pure(ch.ket());
}

inline double pure_concurrence(const PureChannel& ch) {
  // 2ab <= a^2 + b^2 = 1, but rounding can land one ulp past it
  return std::min(1.0, 2.0 * ch.alpha() * ch.beta());
}

// ── X states ────────────────────────────────────────────────────────

// Density matrix supported on the diagonal and anti-diagonal,
//
//   [ rho11    0      0    rho14 ]
//   [   0    rho22  rho23    0   ]
//   [   0    rho23  rho33    0   ]
//   [ rho14    0      0    rho44 ]
//
// with off-diagonal phases removed by local Z rotations at
// construction (recorded, not reapplied: they do not affect any of the
// averaged quantities computed here).
class XStateParams {
 public:
  XStateParams(double rho11, double rho22, double rho33, double rho44,
               Complex rho23, Complex rho14)
      : d_{rho11, rho22, rho33, rho44},
        rho23_(std::abs(rho23)),
        rho14_(std::abs(rho14)),
        phase23_(std::arg(rho23)),
        phase14_(std::arg(rho14)) {
    for (double d : d_)
      if (d < -kNormTol)
        throw std::invalid_argument("XStateParams: negative diagonal entry");
    for (double& d : d_) d = std::max(d, 0.0);
    if (std::abs(d_[0] + d_[1] + d_[2] + d_[3] - 1.0) > kNormTol)
      throw std::invalid_argument("XStateParams: trace must be 1");
    if (rho23_ > std::sqrt(d_[1] * d_[2]) + kNormTol)
      throw std::invalid_argument(
          "XStateParams: inner block {|01>,|10>} not positive semidefinite");
    if (rho14_ > std::sqrt(d_[0] * d_[3]) + kNormTol)
      throw std::invalid_argument(
          "XStateParams: outer block {|00>,|11>} not positive semidefinite");
  }

  XStateParams(double rho11, double rho22, double rho33, double rho44,
               double rho23, double rho14)
      : XStateParams(rho11, rho22, rho33, rho44, Complex(rho23, 0.0),
                     Complex(rho14, 0.0)) {
    if (rho23 < 0.0 || rho14 < 0.0)
      throw std::invalid_argument(
          "XStateParams: real off-diagonal entries must be nonnegative");
  }

  double rho11() const { return d_[0]; }
  double rho22() const { return d_[1]; }
  double rho33() const { return d_[2]; }
  double rho44() const { return d_[3]; }
  double rho23() const { return rho23_; }
  double rho14() const { return rho14_; }
  double phase23() const { return phase23_; }
  double phase14() const { return phase14_; }

 private:
  std::array<double, 4> d_;
  double rho23_, rho14_;
  double phase23_, phase14_;
};

inline qkernel::TwoQubitDensity xstate_density(const XStateParams& p) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = p.rho11();
  m(1, 1) = p.rho22();
  m(2, 2) = p.rho33();
  m(3, 3) = p.rho44();
  m(1, 2) = m(2, 1) = p.rho23();
  m(0, 3) = m(3, 0) = p.rho14();
  return qkernel::TwoQubitDensity(m);
}

// Concurrence of an X state in closed form.
inline double xstate_concurrence(const XStateParams& p) {
  const double inner = p.rho23() - std::sqrt(p.rho11() * p.rho44());
  const double outer = p.rho14() - std::sqrt(p.rho22() * p.rho33());
  return 2.0 * std::max({0.0, inner, outer});
}

// Signed version of the inner-block branch; negative when that branch
// carries no entanglement.
inline double principal_concurrence_signed(const XStateParams& p) {
  return 2.0 * (p.rho23() - std::sqrt(p.rho11() * p.rho44()));
}

// True when the entanglement, if any, lives in the {|01>,|10>} block,
// matching the pure channels under study.
inline bool principal_subspace_ok(const XStateParams& p) {
  return p.rho23() - std::sqrt(p.rho11() * p.rho44()) > 0.0 &&
         p.rho14() - std::sqrt(p.rho22() * p.rho33()) <= 0.0;
}

// Embeds a pure channel as the rank-one X state with the same density.
inline XStateParams xstate_embedding(const PureChannel& ch) {
  const double a2 = ch.alpha() * ch.alpha();
  const double b2 = ch.beta() * ch.beta();
  return XStateParams(0.0, a2, b2, 0.0, ch.alpha() * ch.beta(), 0.0);
}

// ── Werner line ─────────────────────────────────────────────────────

// (1-gamma)/4 identity plus gamma times the triplet Bell projector.
struct WernerParams {
  double gamma;
  explicit WernerParams(double g) : gamma(g) {
    if (!(g >= 0.0 && g <= 1.0))
      throw std::invalid_argument("WernerParams: gamma must be in [0, 1]");
  }
};

inline XStateParams werner_xstate(const WernerParams& w) {
  const double g = w.gamma;
  return XStateParams(0.25 * (1.0 - g), 0.25 * (1.0 + g), 0.25 * (1.0 + g),
                      0.25 * (1.0 - g), 0.5 * g, 0.0);
}

// ── Bell-diagonal decomposition ─────────────────────────────────────

// For X states with rho11 = rho44 and rho22 = rho33 (within 1e-12) the
// state is Bell diagonal; weights are ordered {phi+, phi-, psi+, psi-}.
inline std::optional<std::array<double, 4>> bell_diagonal_weights(
    const XStateParams& p) {
  if (std::abs(p.rho11() - p.rho44()) > kNormTol ||
      std::abs(p.rho22() - p.rho33()) > kNormTol)
    return std::nullopt;
  return std::array<double, 4>{p.rho11() + p.rho14(), p.rho11() - p.rho14(),
                               p.rho22() + p.rho23(), p.rho22() - p.rho23()};
}

// ── random instances (property tests, self checks) ──────────────────

namespace detail {

inline std::array<double, 4> dirichlet_diag(std::uint64_t seed,
                                            std::uint64_t base) {
  std::array<double, 4> e{};
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    e[k] = -std::log1p(-qkernel::rng::unit(seed, base + k));
    sum += e[k];
  }
  if (sum <= 0.0) return {0.25, 0.25, 0.25, 0.25};
  for (double& v : e) v /= sum;
  return e;
}

}  // namespace detail

// Valid X state with Dirichlet(1,1,1,1) diagonal and off-diagonal
// magnitudes uniform within their block bounds. Each index consumes a
// disjoint counter window, so draws are reproducible under any
// work partitioning.
inline XStateParams sample_xstate(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t base = index * 8;
  const auto d = detail::dirichlet_diag(seed, base);
  const double r23 = qkernel::rng::unit(seed, base + 4) * std::sqrt(d[1] * d[2]);
  const double r14 = qkernel::rng::unit(seed, base + 5) * std::sqrt(d[0] * d[3]);
  return XStateParams(d[0], d[1], d[2], d[3], r23, r14);
}

// Valid X state whose entanglement sits strictly in the inner block.
inline XStateParams sample_principal_xstate(std::uint64_t seed,
                                            std::uint64_t index) {
  for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
    const std::uint64_t base = index * 64 + attempt * 8;
    auto d = detail::dirichlet_diag(seed, base);
    if (d[0] * d[3] >= d[1] * d[2]) {
      std::swap(d[0], d[1]);
      std::swap(d[3], d[2]);
    }
    const double lo = std::sqrt(d[0] * d[3]);
    const double hi = std::sqrt(d[1] * d[2]);
    if (hi - lo < 1e-9) continue;
    const double t = 1.0 - qkernel::rng::unit(seed, base + 4);  // (0, 1]
    const double r23 = lo + t * (hi - lo);
    const double r14 = qkernel::rng::unit(seed, base + 5) * lo;
    XStateParams p(d[0], d[1], d[2], d[3], r23, r14);
    if (principal_subspace_ok(p)) return p;
  }
  throw std::logic_error("sample_principal_xstate: rejection loop exhausted");
}

}  // namespace telefid::channels
