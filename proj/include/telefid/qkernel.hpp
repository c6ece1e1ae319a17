#pragma once

// Small fixed-dimension quantum kernel: kets, density matrices, Pauli
// algebra, Haar sampling on the Bloch sphere, a product quadrature grid
// for sphere averages, and the two-qubit concurrence.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace telefid {

using Complex = std::complex<double>;

// Shared numeric tolerances.
inline constexpr double kNormTol = 1e-12;      // ket norm, trace, hermiticity
inline constexpr double kPsdTol = 1e-10;       // eigenvalue floor for densities
inline constexpr double kInputNormTol = 1e-9;  // renormalizable user input
inline constexpr double kDegenerateBranchTol = 1e-14;

class EigenSolverError : public std::runtime_error {
 public:
  explicit EigenSolverError(const std::string& what) : std::runtime_error(what) {}
};

namespace qkernel {

// ── kets ────────────────────────────────────────────────────────────

class Ket2 {
 public:
  Ket2(Complex a0, Complex a1) : v_(a0, a1) { check_norm(); }
  explicit Ket2(const Eigen::Vector2cd& v) : v_(v) { check_norm(); }

  // cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
  static Ket2 from_bloch(double theta, double phi) {
    const double h = 0.5 * theta;
    return Ket2(Complex(std::cos(h), 0.0),
                std::polar(std::sin(h), phi));
  }

  Complex a0() const { return v_(0); }
  Complex a1() const { return v_(1); }
  const Eigen::Vector2cd& vec() const { return v_; }

 private:
  void check_norm() const {
    if (std::abs(v_.squaredNorm() - 1.0) > kNormTol)
      throw std::invalid_argument("Ket2: not unit norm");
  }
  Eigen::Vector2cd v_;
};

// Basis order for two qubits is {|00>, |01>, |10>, |11>}, first factor
// most significant, throughout.
class Ket4 {
 public:
  Ket4(Complex c00, Complex c01, Complex c10, Complex c11)
      : v_(c00, c01, c10, c11) { check_norm(); }
  explicit Ket4(const Eigen::Vector4cd& v) : v_(v) { check_norm(); }

  const Eigen::Vector4cd& vec() const { return v_; }
  Complex amp(int i) const { return v_(i); }

 private:
  void check_norm() const {
    if (std::abs(v_.squaredNorm() - 1.0) > kNormTol)
      throw std::invalid_argument("Ket4: not unit norm");
  }
  Eigen::Vector4cd v_;
};

inline Eigen::Vector4cd tensor(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  Eigen::Vector4cd out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

inline Ket4 tensor(const Ket2& a, const Ket2& b) {
  return Ket4(tensor(a.vec(), b.vec()));
}

// ── operators ───────────────────────────────────────────────────────

inline Eigen::Matrix2cd identity2() { return Eigen::Matrix2cd::Identity(); }

inline Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

inline Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

inline Eigen::Matrix4cd tensor(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// ── density matrices ────────────────────────────────────────────────

namespace detail {

template <typename Mat>
void require_hermitian_unit_trace(const Mat& m, const char* who) {
  if (std::abs(m.trace().real() - 1.0) > kNormTol ||
      std::abs(m.trace().imag()) > kNormTol)
    throw std::invalid_argument(std::string(who) + ": trace must be 1");
  if ((m - Mat(m.adjoint())).cwiseAbs().maxCoeff() > kNormTol)
    throw std::invalid_argument(std::string(who) + ": not Hermitian");
}

}  // namespace detail

class QubitDensity {
 public:
  explicit QubitDensity(const Eigen::Matrix2cd& m) : m_(m) {
    detail::require_hermitian_unit_trace(m_, "QubitDensity");
    // Hermitian 2x2: eigenvalues from trace and determinant.
    const double t = m_.trace().real();
    const double d = m_.determinant().real();
    const double disc = std::sqrt(std::max(0.0, 0.25 * t * t - d));
    if (0.5 * t - disc < -kPsdTol)
      throw std::invalid_argument("QubitDensity: negative eigenvalue");
  }

  static QubitDensity pure(const Ket2& psi) {
    return QubitDensity(psi.vec() * psi.vec().adjoint());
  }

  static QubitDensity maximally_mixed() {
    return QubitDensity(0.5 * Eigen::Matrix2cd::Identity());
  }

  const Eigen::Matrix2cd& mat() const { return m_; }

 private:
  Eigen::Matrix2cd m_;
};

class TwoQubitDensity {
 public:
  explicit TwoQubitDensity(const Eigen::Matrix4cd& m) : m_(m) {
    detail::require_hermitian_unit_trace(m_, "TwoQubitDensity");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(
        0.5 * (m_ + m_.adjoint().eval()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw EigenSolverError("TwoQubitDensity: eigensolver failed");
    if (es.eigenvalues().minCoeff() < -kPsdTol)
      throw std::invalid_argument("TwoQubitDensity: negative eigenvalue");
  }

  static TwoQubitDensity pure(const Ket4& psi) {
    return TwoQubitDensity(psi.vec() * psi.vec().adjoint());
  }

  const Eigen::Matrix4cd& mat() const { return m_; }

 private:
  Eigen::Matrix4cd m_;
};

inline QubitDensity partial_trace_first(const TwoQubitDensity& rho) {
  Eigen::Matrix2cd out = rho.mat().block<2, 2>(0, 0) + rho.mat().block<2, 2>(2, 2);
  return QubitDensity(out);
}

inline QubitDensity partial_trace_second(const TwoQubitDensity& rho) {
  Eigen::Matrix2cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out(i, j) = rho.mat()(2 * i, 2 * j) + rho.mat()(2 * i + 1, 2 * j + 1);
  return QubitDensity(out);
}

// <psi|rho|psi>, clamped into [0, 1] against rounding.
inline double fidelity_pure_mixed(const Ket2& psi, const QubitDensity& rho) {
  const Complex f = psi.vec().dot(rho.mat() * psi.vec());
  return std::clamp(f.real(), 0.0, 1.0);
}

// ── Bell states ─────────────────────────────────────────────────────

inline Ket4 bell_phi_plus()  { const double r = std::numbers::sqrt2 / 2; return Ket4(r, 0, 0, r); }
inline Ket4 bell_phi_minus() { const double r = std::numbers::sqrt2 / 2; return Ket4(r, 0, 0, -r); }
inline Ket4 bell_psi_plus()  { const double r = std::numbers::sqrt2 / 2; return Ket4(0, r, r, 0); }
inline Ket4 bell_psi_minus() { const double r = std::numbers::sqrt2 / 2; return Ket4(0, r, -r, 0); }

// ── counter-based RNG and Haar sampling ─────────────────────────────

namespace rng {

// splitmix64 finalizer; value at (seed, index) is a pure function, so
// any worker partitioning reproduces the same stream.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// uniform in [0, 1)
inline double unit(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(at(seed, index) >> 11) * 0x1.0p-53;
}

}  // namespace rng

// Haar-uniform single-qubit state: cos(theta) uniform on [-1, 1],
// phi uniform on [0, 2 pi). Sample i consumes counters 2i and 2i+1.
inline Ket2 haar_qubit(std::uint64_t seed, std::uint64_t index) {
  const double u = 2.0 * rng::unit(seed, 2 * index) - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng::unit(seed, 2 * index + 1);
  const double ch = std::sqrt(0.5 * (1.0 + u));  // cos(theta/2)
  const double sh = std::sqrt(0.5 * (1.0 - u));
  return Ket2(Complex(ch, 0.0), std::polar(sh, phi));
}

struct HaarStream {
  std::uint64_t seed;
  std::uint64_t counter = 0;
  Ket2 next() { return haar_qubit(seed, counter++); }
};

// ── quadrature over the Bloch sphere ────────────────────────────────

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// three-term recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
}

}  // namespace detail

struct QuadratureNode {
  Ket2 ket;
  double weight;
};

// Normalized product rule for Haar averages over pure qubit states:
// Gauss-Legendre in cos(theta), uniform nodes in phi (exact for
// trigonometric polynomials up to the grid order). Weights sum to 1.
struct QuadratureGrid {
  std::vector<QuadratureNode> nodes;
  int n_theta = 0;
  int n_phi = 0;
};

inline QuadratureGrid bloch_quadrature(int n_theta = 64, int n_phi = 64) {
  if (n_theta < 1 || n_phi < 1)
    throw std::invalid_argument("bloch_quadrature: grid sizes must be positive");
  std::vector<double> gx, gw;
  detail::gauss_legendre(n_theta, gx, gw);
  QuadratureGrid grid;
  grid.n_theta = n_theta;
  grid.n_phi = n_phi;
  grid.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double ch = std::sqrt(0.5 * (1.0 + gx[i]));
    const double sh = std::sqrt(0.5 * (1.0 - gx[i]));
    const double wu = 0.5 * gw[i];  // d(cos theta)/2
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n_phi;
      grid.nodes.push_back(
          {Ket2(Complex(ch, 0.0), std::polar(sh, phi)), wu / n_phi});
    }
  }
  return grid;
}

// ── concurrence ─────────────────────────────────────────────────────

// Wootters formula: lambda_i are the square roots of the eigenvalues of
// rho (sy x sy) rho* (sy x sy), sorted descending. Computed as the
// singular values of conj(sqrt(rho)) (sy x sy) sqrt(rho), which has the
// same spectrum but avoids squaring; the direct eigenvalue route loses
// half the digits on rank-deficient inputs.
inline double wootters_concurrence(const TwoQubitDensity& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(
      0.5 * (rho.mat() + rho.mat().adjoint().eval()));
  if (es.info() != Eigen::Success)
    throw EigenSolverError("wootters_concurrence: eigensolver failed");
  Eigen::Vector4d d = es.eigenvalues();
  for (int i = 0; i < 4; ++i) d(i) = std::sqrt(std::max(0.0, d(i)));
  const Eigen::Matrix4cd root =
      es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();

  const Eigen::Matrix4cd yy = tensor(pauli_y(), pauli_y());
  const Eigen::Matrix4cd a = root.conjugate() * yy * root;
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(a);
  const Eigen::Vector4d& lam = svd.singularValues();
  return std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
}

}  // namespace qkernel
}  // namespace telefid
