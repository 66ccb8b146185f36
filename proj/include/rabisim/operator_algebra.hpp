#pragma once

// Dense operators on a truncated qubits-times-mode Hilbert space.
//
// Basis conventions used everywhere in rabisim:
//   * qubit basis is ordered {|up>, |down>}, so sigma_z = diag(+1, -1);
//   * tensor order is qubit 1 (x) ... (x) qubit L (x) mode, qubit 1 being the
//     most significant index;
//   * the mode is truncated to Fock states |0> ... |fock_cutoff - 1>.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rabisim/constants.hpp"
#include "rabisim/error.hpp"

namespace rabisim {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Collects non-fatal diagnostics (thermal truncation and similar).
using Warnings = std::vector<std::string>;

class HilbertLayout {
 public:
  HilbertLayout(int n_qubits, int fock_cutoff) : n_qubits_(n_qubits), fock_cutoff_(fock_cutoff) {
    if (n_qubits < 0 || n_qubits > 12)
      throw InvalidDimensionError("qubit count must be in [0, 12], got " + std::to_string(n_qubits));
    if (fock_cutoff < 1)
      throw InvalidDimensionError("fock cutoff must be positive, got " + std::to_string(fock_cutoff));
  }

  /// Layout of a bare mode.
  static HilbertLayout mode(int fock_cutoff) { return {0, fock_cutoff}; }
  /// Layout of a single bare qubit.
  static HilbertLayout qubit() { return {1, 1}; }

  int n_qubits() const noexcept { return n_qubits_; }
  int fock_cutoff() const noexcept { return fock_cutoff_; }
  std::size_t qubit_dim() const noexcept { return std::size_t{1} << n_qubits_; }
  std::size_t dim() const noexcept { return qubit_dim() * static_cast<std::size_t>(fock_cutoff_); }

  /// Flat index of |q_1 ... q_L, n> with q = 0 for up, 1 for down.
  std::size_t index(std::size_t qubit_bits, int phonons) const noexcept {
    return qubit_bits * static_cast<std::size_t>(fock_cutoff_) + static_cast<std::size_t>(phonons);
  }

  friend bool operator==(const HilbertLayout&, const HilbertLayout&) = default;

  std::string describe() const {
    return "{qubits=" + std::to_string(n_qubits_) + ", cutoff=" + std::to_string(fock_cutoff_) + "}";
  }

 private:
  int n_qubits_;
  int fock_cutoff_;
};

/// Tensor factor selector for embed().
class Slot {
 public:
  static Slot qubit(int index) { return Slot(index); }
  static Slot mode() { return Slot(-1); }
  bool is_mode() const noexcept { return index_ < 0; }
  int qubit_index() const noexcept { return index_; }

 private:
  explicit Slot(int index) : index_(index) {}
  int index_;
};

namespace detail {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Absolute Hermiticity tolerance scaled to the operator norm (entries are in rad/s).
inline double hermitian_tolerance(const Matrix& m) { return 1e-12 * std::max(1.0, max_abs(m)); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace detail

class Operator {
 public:
  /// Hermitian operator; throws ContractViolation when the entries are not.
  static Operator hermitian(HilbertLayout layout, Matrix entries) {
    Operator op(layout, std::move(entries), true);
    const double dev = detail::max_abs(op.entries_ - op.entries_.adjoint());
    if (dev > detail::hermitian_tolerance(op.entries_))
      throw ContractViolation("operator tagged Hermitian deviates from its adjoint by " + std::to_string(dev));
    return op;
  }
  static Operator general(HilbertLayout layout, Matrix entries) {
    return Operator(layout, std::move(entries), false);
  }
  static Operator identity(HilbertLayout layout) {
    const auto d = static_cast<Eigen::Index>(layout.dim());
    return Operator(layout, Matrix::Identity(d, d), true);
  }
  static Operator zero(HilbertLayout layout) {
    const auto d = static_cast<Eigen::Index>(layout.dim());
    return Operator(layout, Matrix::Zero(d, d), true);
  }

  const HilbertLayout& layout() const noexcept { return layout_; }
  const Matrix& matrix() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return layout_.dim(); }
  bool is_hermitian() const noexcept { return hermitian_; }
  complex operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  Operator adjoint() const { return Operator(layout_, entries_.adjoint(), hermitian_); }

  friend Operator operator+(const Operator& a, const Operator& b) {
    check_same_layout(a, b);
    return Operator(a.layout_, a.entries_ + b.entries_, a.hermitian_ && b.hermitian_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    check_same_layout(a, b);
    return Operator(a.layout_, a.entries_ - b.entries_, a.hermitian_ && b.hermitian_);
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    check_same_layout(a, b);
    return Operator(a.layout_, a.entries_ * b.entries_, false);
  }
  friend Operator operator*(double s, const Operator& a) { return Operator(a.layout_, s * a.entries_, a.hermitian_); }
  friend Operator operator*(complex s, const Operator& a) {
    return Operator(a.layout_, s * a.entries_, a.hermitian_ && s.imag() == 0.0);
  }

  /// Re-tag as Hermitian after verifying it (e.g. for a†a built from a product).
  Operator as_hermitian() const { return hermitian(layout_, entries_); }

 private:
  Operator(HilbertLayout layout, Matrix entries, bool hermitian)
      : layout_(layout), entries_(std::move(entries)), hermitian_(hermitian) {
    const auto d = static_cast<Eigen::Index>(layout_.dim());
    if (entries_.rows() != d || entries_.cols() != d)
      throw LayoutError("matrix of size " + std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()) +
                        " does not match layout " + layout_.describe());
  }

  static void check_same_layout(const Operator& a, const Operator& b) {
    if (!(a.layout_ == b.layout_))
      throw LayoutError("operator layouts differ: " + a.layout_.describe() + " vs " + b.layout_.describe());
  }

  HilbertLayout layout_;
  Matrix entries_;
  bool hermitian_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Density states

enum class QubitState { up, down };

class DensityState {
 public:
  /// Validated construction: Hermitian to 1e-12, unit trace to 1e-10,
  /// eigenvalues >= -1e-10.
  static DensityState from_matrix(HilbertLayout layout, Matrix rho) {
    DensityState s(layout, std::move(rho), false);
    s.validate();
    return s;
  }

  /// |psi><psi| for a normalized state vector.
  static DensityState pure(HilbertLayout layout, const Vector& psi) {
    if (static_cast<std::size_t>(psi.size()) != layout.dim())
      throw LayoutError("state vector length does not match layout " + layout.describe());
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) throw InvalidStateError("state vector is not normalized");
    return DensityState(layout, psi * psi.adjoint(), true);
  }

  /// Basis state |q_1 ... q_L, n>.
  static DensityState basis(HilbertLayout layout, const std::vector<QubitState>& qubits, int phonons) {
    if (static_cast<int>(qubits.size()) != layout.n_qubits())
      throw LayoutError("expected " + std::to_string(layout.n_qubits()) + " qubit states");
    if (phonons < 0 || phonons >= layout.fock_cutoff()) throw InvalidDimensionError("phonon number outside cutoff");
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(layout.dim()));
    psi(static_cast<Eigen::Index>(layout.index(bits_of(qubits), phonons))) = 1.0;
    return pure(layout, psi);
  }

  /// |q_1><q_1| (x) ... (x) |q_L><q_L| (x) rho_mode.
  static DensityState product(const std::vector<QubitState>& qubits, const DensityState& mode) {
    if (mode.layout().n_qubits() != 0) throw LayoutError("product() expects a bare-mode state");
    const HilbertLayout layout(static_cast<int>(qubits.size()), mode.layout().fock_cutoff());
    const auto nq = static_cast<Eigen::Index>(layout.qubit_dim());
    Matrix qproj = Matrix::Zero(nq, nq);
    const auto b = static_cast<Eigen::Index>(bits_of(qubits));
    qproj(b, b) = 1.0;
    return DensityState(layout, detail::kron(qproj, mode.matrix()), mode.is_pure());
  }

  const HilbertLayout& layout() const noexcept { return layout_; }
  const Matrix& matrix() const noexcept { return rho_; }
  bool is_pure() const noexcept { return pure_; }
  double trace() const { return rho_.trace().real(); }
  double purity() const { return (rho_ * rho_).trace().real(); }

  /// Tr(rho O), real part (O is expected Hermitian).
  double expectation(const Operator& op) const {
    if (!(op.layout() == layout_)) throw LayoutError("observable layout mismatch");
    return (rho_.cwiseProduct(op.matrix().transpose())).sum().real();
  }

  /// Reduced state of the mode (trace over all qubits).
  DensityState mode_factor() const {
    const auto nc = static_cast<Eigen::Index>(layout_.fock_cutoff());
    Matrix red = Matrix::Zero(nc, nc);
    for (std::size_t q = 0; q < layout_.qubit_dim(); ++q) {
      const auto off = static_cast<Eigen::Index>(q) * nc;
      red += rho_.block(off, off, nc, nc);
    }
    return DensityState(HilbertLayout::mode(layout_.fock_cutoff()), std::move(red), false);
  }

  /// Unvalidated construction, for states produced by trusted propagators.
  static DensityState unchecked(HilbertLayout layout, Matrix rho) { return DensityState(layout, std::move(rho), false); }

  static std::size_t bits_of(const std::vector<QubitState>& qubits) {
    std::size_t bits = 0;
    for (auto q : qubits) bits = (bits << 1) | (q == QubitState::down ? 1u : 0u);
    return bits;
  }

 private:
  DensityState(HilbertLayout layout, Matrix rho, bool pure) : layout_(layout), rho_(std::move(rho)), pure_(pure) {
    const auto d = static_cast<Eigen::Index>(layout_.dim());
    if (rho_.rows() != d || rho_.cols() != d) throw LayoutError("density matrix does not match layout " + layout_.describe());
  }

  void validate() const {
    if (detail::max_abs(rho_ - rho_.adjoint()) > 1e-12) throw InvalidStateError("density matrix is not Hermitian");
    if (std::abs(trace() - 1.0) > 1e-10) throw InvalidStateError("density matrix trace is " + std::to_string(trace()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw InvalidStateError("density matrix has a negative eigenvalue");
  }

  HilbertLayout layout_;
  Matrix rho_;
  bool pure_;
};

/// Trace distance 0.5 * ||a - b||_1.
inline double trace_distance(const DensityState& a, const DensityState& b) {
  if (!(a.layout() == b.layout())) throw LayoutError("trace distance between different layouts");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Elementary operators

/// Truncated bosonic annihilation operator, a[n-1, n] = sqrt(n).
inline Operator annihilation(int fock_cutoff) {
  if (fock_cutoff < 2) throw InvalidDimensionError("annihilation operator needs fock_cutoff >= 2");
  Matrix a = Matrix::Zero(fock_cutoff, fock_cutoff);
  for (int n = 1; n < fock_cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator::general(HilbertLayout::mode(fock_cutoff), std::move(a));
}

inline Operator creation(int fock_cutoff) { return annihilation(fock_cutoff).adjoint(); }

inline Operator number_operator(int fock_cutoff) {
  const auto a = annihilation(fock_cutoff);
  return (a.adjoint() * a).as_hermitian();
}

enum class Pauli { x, y, z, plus, minus };

/// Pauli matrices in the {|up>, |down>} basis; plus = |up><down|.
inline Operator pauli(Pauli which) {
  Matrix m = Matrix::Zero(2, 2);
  bool herm = true;
  switch (which) {
    case Pauli::x: m << 0, 1, 1, 0; break;
    case Pauli::y: m << 0, complex(0, -1), complex(0, 1), 0; break;
    case Pauli::z: m << 1, 0, 0, -1; break;
    case Pauli::plus: m << 0, 1, 0, 0; herm = false; break;
    case Pauli::minus: m << 0, 0, 1, 0; herm = false; break;
  }
  return herm ? Operator::hermitian(HilbertLayout::qubit(), std::move(m))
              : Operator::general(HilbertLayout::qubit(), std::move(m));
}

/// Places a single-factor operator into `layout`, identity elsewhere.
inline Operator embed(const Operator& op, Slot slot, const HilbertLayout& layout) {
  const auto qd = static_cast<Eigen::Index>(layout.qubit_dim());
  const auto nc = static_cast<Eigen::Index>(layout.fock_cutoff());
  Matrix full;
  if (slot.is_mode()) {
    if (static_cast<Eigen::Index>(op.dim()) != nc)
      throw LayoutError("mode operator of dim " + std::to_string(op.dim()) + " does not fit cutoff " + std::to_string(nc));
    full = detail::kron(Matrix::Identity(qd, qd), op.matrix());
  } else {
    const int q = slot.qubit_index();
    if (q < 0 || q >= layout.n_qubits())
      throw LayoutError("qubit slot " + std::to_string(q) + " outside layout " + layout.describe());
    if (op.dim() != 2) throw LayoutError("qubit operator must be 2x2, got dim " + std::to_string(op.dim()));
    const Eigen::Index before = Eigen::Index{1} << q;
    const Eigen::Index after = (Eigen::Index{1} << (layout.n_qubits() - q - 1)) * nc;
    full = detail::kron(detail::kron(Matrix::Identity(before, before), op.matrix()), Matrix::Identity(after, after));
  }
  return op.is_hermitian() ? Operator::hermitian(layout, std::move(full)) : Operator::general(layout, std::move(full));
}

// ---------------------------------------------------------------------------
// Spectral decomposition

struct Eigenbasis {
  RealVector energies;  // ascending
  Matrix vectors;       // columns are eigenvectors, unitary
};

inline Eigenbasis hermitian_eig(const Operator& op) {
  if (!op.is_hermitian()) throw ContractViolation("hermitian_eig requires a Hermitian-tagged operator");
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.matrix());
  if (es.info() != Eigen::Success) throw ContractViolation("eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

// ---------------------------------------------------------------------------
// Thermal mode states

/// Bose-Einstein occupation 1 / (exp(omega / (kB T / hbar)) - 1); zero at T = 0.
inline double bose_occupation(double omega, double temperature) {
  if (temperature <= 0.0) return 0.0;
  return 1.0 / std::expm1(omega / (constants::kB_over_hbar * temperature));
}

/// Weight of the untruncated Gibbs distribution at or above `fock_cutoff`.
inline double thermal_tail_weight(double omega, double temperature, int fock_cutoff) {
  if (temperature <= 0.0) return 0.0;
  return std::exp(-static_cast<double>(fock_cutoff) * omega / (constants::kB_over_hbar * temperature));
}

inline constexpr double kThermalTruncationWarning = 1e-6;

/// Truncated, renormalized Gibbs state of one mode.
inline DensityState thermal_state(double omega, double temperature, int fock_cutoff, Warnings* warnings = nullptr) {
  if (!(omega > 0.0)) throw ParameterError("thermal_state needs omega > 0");
  if (temperature < 0.0) throw ParameterError("thermal_state needs T >= 0");
  const HilbertLayout layout = HilbertLayout::mode(fock_cutoff);
  Matrix rho = Matrix::Zero(fock_cutoff, fock_cutoff);
  if (temperature == 0.0) {
    rho(0, 0) = 1.0;
    return DensityState::from_matrix(layout, std::move(rho));
  }
  const double x = omega / (constants::kB_over_hbar * temperature);
  double norm = 0.0;
  for (int n = 0; n < fock_cutoff; ++n) norm += std::exp(-x * n);
  for (int n = 0; n < fock_cutoff; ++n) rho(n, n) = std::exp(-x * n) / norm;
  const double lost = thermal_tail_weight(omega, temperature, fock_cutoff);
  if (warnings && lost > kThermalTruncationWarning)
    warnings->push_back("thermal truncation: cutoff " + std::to_string(fock_cutoff) + " discards weight " +
                        std::to_string(lost));
  return DensityState::from_matrix(layout, std::move(rho));
}

}  // namespace rabisim
