#pragma once

// Teleportation protocol over a two-qubit resource state, measured in
// a partially entangled basis. Branch outcomes carry the classical
// probability and the corrected conditional output state; averages over
// the input state come either from deterministic Monte Carlo or from
// the sphere quadrature.

#include "telefid/channels.hpp"
#include "telefid/qkernel.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace telefid::protocol {

enum class BasisLabel { phi_plus, phi_minus, psi_plus, psi_minus };

inline constexpr std::array<BasisLabel, 4> kBasisLabels = {
    BasisLabel::phi_plus, BasisLabel::phi_minus, BasisLabel::psi_plus,
    BasisLabel::psi_minus};

inline const char* to_string(BasisLabel k) {
  switch (k) {
    case BasisLabel::phi_plus: return "phi+";
    case BasisLabel::phi_minus: return "phi-";
    case BasisLabel::psi_plus: return "psi+";
    case BasisLabel::psi_minus: return "psi-";
  }
  return "?";
}

// Orthonormal measurement family
//   phi+ = x|00> + y|11>,  phi- = y|00> - x|11>,
//   psi+ = x|01> + y|10>,  psi- = y|01> - x|10>,
// canonical order x <= y; concurrence of each member is 2xy.
class MeasurementBasis {
 public:
  static MeasurementBasis build(double x, double y) {
    if (x < 0.0 || y < 0.0)
      throw std::invalid_argument("MeasurementBasis: x, y must be nonnegative");
    const double n2 = x * x + y * y;
    if (std::abs(n2 - 1.0) > kInputNormTol)
      throw std::invalid_argument("MeasurementBasis: x, y must be normalized");
    const double inv = 1.0 / std::sqrt(n2);
    return MeasurementBasis(x * inv, y * inv);
  }

  static MeasurementBasis from_concurrence(double c) {
    if (c < 0.0 || c > 1.0)
      throw std::invalid_argument(
          "MeasurementBasis: concurrence must be in [0, 1]");
    const double r = std::sqrt(std::max(0.0, 1.0 - c * c));
    return MeasurementBasis(std::sqrt(0.5 * (1.0 - r)),
                            std::sqrt(0.5 * (1.0 + r)));
  }

  double x() const { return x_; }
  double y() const { return y_; }
  double concurrence() const { return std::min(1.0, 2.0 * x_ * y_); }
  bool reordered() const { return reordered_; }

  const qkernel::Ket4& state(BasisLabel k) const {
    return states_[static_cast<int>(k)];
  }

 private:
  // members initialize in declaration order: x_, y_ are canonical
  // before states_ is built from them
  MeasurementBasis(double x, double y)
      : x_(std::min(x, y)), y_(std::max(x, y)), reordered_(x > y),
        states_{qkernel::Ket4(x_, 0, 0, y_), qkernel::Ket4(y_, 0, 0, -x_),
                qkernel::Ket4(0, x_, y_, 0), qkernel::Ket4(0, y_, -x_, 0)} {}

  double x_, y_;
  bool reordered_;
  std::array<qkernel::Ket4, 4> states_;
};

inline MeasurementBasis build_basis(double x, double y) {
  return MeasurementBasis::build(x, y);
}

// Local unitary the receiver applies for each measurement record.
inline Eigen::Matrix2cd correction_for(BasisLabel k) {
  switch (k) {
    case BasisLabel::phi_plus: return qkernel::pauli_x();
    case BasisLabel::phi_minus: return qkernel::pauli_x() * qkernel::pauli_z();
    case BasisLabel::psi_plus: return qkernel::identity2();
    case BasisLabel::psi_minus: return qkernel::pauli_z();
  }
  throw std::invalid_argument("correction_for: bad label");
}

struct TeleportOutcome {
  BasisLabel label;
  double probability;
  qkernel::QubitDensity output;  // after correction
  bool degenerate;               // probability below 1e-14, output unreliable
};

// All four branch outcomes for input psi sent through the given
// resource state. The unnormalized conditional state is
//   tau_k = sum_{A,A'} v_A conj(v_A') rho[A block, A' block],
// with v_A = sum_a conj(<aA|k>) psi_a, so no 8-dimensional objects are
// ever formed.
inline std::array<TeleportOutcome, 4> teleport_outcomes(
    const qkernel::Ket2& psi, const qkernel::TwoQubitDensity& channel,
    const MeasurementBasis& basis) {
  std::array<TeleportOutcome, 4> out{
      TeleportOutcome{BasisLabel::phi_plus, 0, qkernel::QubitDensity::maximally_mixed(), true},
      TeleportOutcome{BasisLabel::phi_minus, 0, qkernel::QubitDensity::maximally_mixed(), true},
      TeleportOutcome{BasisLabel::psi_plus, 0, qkernel::QubitDensity::maximally_mixed(), true},
      TeleportOutcome{BasisLabel::psi_minus, 0, qkernel::QubitDensity::maximally_mixed(), true}};
  for (int idx = 0; idx < 4; ++idx) {
    const BasisLabel k = kBasisLabels[idx];
    const auto& kk = basis.state(k).vec();
    Eigen::Vector2cd v;
    for (int A = 0; A < 2; ++A)
      v(A) = std::conj(kk(A)) * psi.a0() + std::conj(kk(2 + A)) * psi.a1();
    Eigen::Matrix2cd tau = Eigen::Matrix2cd::Zero();
    for (int A = 0; A < 2; ++A)
      for (int Ap = 0; Ap < 2; ++Ap)
        tau += v(A) * std::conj(v(Ap)) * channel.mat().block<2, 2>(2 * A, 2 * Ap);
    const double pk = tau.trace().real();
    if (pk < kDegenerateBranchTol) {
      out[idx] = {k, std::max(pk, 0.0), qkernel::QubitDensity::maximally_mixed(), true};
      continue;
    }
    const Eigen::Matrix2cd u = correction_for(k);
    const Eigen::Matrix2cd rho = (u * tau * u.adjoint()) / pk;
    out[idx] = {k, pk, qkernel::QubitDensity(rho), false};
  }
  return out;
}

// Probability-weighted overlap of the corrected outputs with the input;
// degenerate branches carry weight zero.
inline double conditional_fidelity(const qkernel::Ket2& psi,
                                   const std::array<TeleportOutcome, 4>& outs) {
  double f = 0.0;
  for (const auto& o : outs)
    if (!o.degenerate)
      f += o.probability * qkernel::fidelity_pure_mixed(psi, o.output);
  return f;
}

// Rebuilds psi (x) channel from the four measurement branches, using
// the explicit per-branch amplitudes and the inverse corrections, with
// a fitted sign per branch. Returns the largest amplitude deviation;
// anything above ~1e-12 means the branch bookkeeping is inconsistent.
inline double decomposition_identity_check(const qkernel::Ket2& psi,
                                           const channels::PureChannel& ch,
                                           const MeasurementBasis& basis) {
  using Vec8 = Eigen::Matrix<Complex, 8, 1>;
  const Complex a = psi.a0(), b = psi.a1();
  const double al = ch.alpha(), be = ch.beta();
  const double x = basis.x(), y = basis.y();

  Vec8 target;
  const auto chv = ch.ket().vec();
  for (int ai = 0; ai < 2; ++ai)
    for (int m = 0; m < 4; ++m)
      target(4 * ai + m) = (ai == 0 ? a : b) * chv(m);

  const std::array<Eigen::Vector2cd, 4> w = {
      Eigen::Vector2cd(y * be * b, x * al * a),
      Eigen::Vector2cd(-x * be * b, y * al * a),
      Eigen::Vector2cd(x * be * a, y * al * b),
      Eigen::Vector2cd(y * be * a, -x * al * b)};

  Vec8 recon = Vec8::Zero();
  for (int idx = 0; idx < 4; ++idx) {
    const BasisLabel k = kBasisLabels[idx];
    const Eigen::Matrix2cd u = correction_for(k);
    Eigen::Vector2cd bside;
    const double pk = w[idx].squaredNorm();
    if (pk < kDegenerateBranchTol) {
      bside = w[idx];
    } else {
      const Eigen::Vector2cd corrected = (u * w[idx]) / std::sqrt(pk);
      bside = std::sqrt(pk) * (u.adjoint() * corrected);
    }
    Vec8 branch;
    const auto& kv = basis.state(k).vec();
    for (int m = 0; m < 4; ++m)
      for (int bi = 0; bi < 2; ++bi)
        branch(2 * m + bi) = kv(m) * bside(bi);
    const double s = branch.dot(target).real() >= 0.0 ? 1.0 : -1.0;
    recon += s * branch;
  }
  return (recon - target).cwiseAbs().maxCoeff();
}

// ── averages over the input state ───────────────────────────────────

struct McResult {
  double estimate;
  double std_error;
};

namespace detail {

// Neumaier compensated sum.
struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

inline unsigned resolve_threads(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("TELEFID_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1 && cap < 1024)
      n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

}  // namespace detail

// Haar-averaged fidelity by Monte Carlo. Samples are indexed by the
// counter RNG and reduced in fixed chunks, sequentially recombined, so
// the result is bit-identical for any worker count.
inline McResult average_fidelity_mc(const qkernel::TwoQubitDensity& channel,
                                    const MeasurementBasis& basis,
                                    std::size_t n_samples, std::uint64_t seed,
                                    unsigned n_threads = 0) {
  if (n_samples < 100)
    throw std::invalid_argument("average_fidelity_mc: need at least 100 samples");
  constexpr std::size_t kChunk = 4096;
  const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<double> sum_f(n_chunks), sum_f2(n_chunks);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      detail::Kahan s1, s2;
      const std::size_t lo = c * kChunk;
      const std::size_t hi = std::min(lo + kChunk, n_samples);
      for (std::size_t i = lo; i < hi; ++i) {
        const auto psi = qkernel::haar_qubit(seed, i);
        const double f =
            conditional_fidelity(psi, teleport_outcomes(psi, channel, basis));
        s1.add(f);
        s2.add(f * f);
      }
      sum_f[c] = s1.value();
      sum_f2[c] = s2.value();
    }
  };

  const unsigned workers = std::min<std::size_t>(
      detail::resolve_threads(n_threads), n_chunks);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  detail::Kahan t1, t2;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    t1.add(sum_f[c]);
    t2.add(sum_f2[c]);
  }
  const double n = static_cast<double>(n_samples);
  const double mean = t1.value() / n;
  const double var_num = std::max(0.0, t2.value() - n * mean * mean);
  const double se = std::sqrt(var_num / (n - 1.0) / n);
  return {mean, se};
}

inline double average_fidelity_quadrature(
    const qkernel::TwoQubitDensity& channel, const MeasurementBasis& basis,
    const qkernel::QuadratureGrid& grid) {
  detail::Kahan acc;
  for (const auto& node : grid.nodes)
    acc.add(node.weight *
            conditional_fidelity(node.ket,
                                 teleport_outcomes(node.ket, channel, basis)));
  return acc.value();
}

}  // namespace telefid::protocol
