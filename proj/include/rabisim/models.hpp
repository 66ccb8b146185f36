#pragma once

// Hamiltonians of the single-mode light-matter models: Jaynes-Cummings,
// quantum Rabi, multi-qubit Dicke and its dispersive Schrieffer-Wolff
// effective model, plus their symmetry operators. Units: hbar = 1, every
// frequency in rad/s.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "rabisim/operator_algebra.hpp"

namespace rabisim {

enum class ModelKind { jc, qrm, dicke, sw_effective };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::jc: return "jc";
    case ModelKind::qrm: return "qrm";
    case ModelKind::dicke: return "dicke";
    case ModelKind::sw_effective: return "sw-effective";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "jc") return ModelKind::jc;
  if (s == "qrm") return ModelKind::qrm;
  if (s == "dicke") return ModelKind::dicke;
  if (s == "sw-effective") return ModelKind::sw_effective;
  throw ModelKindError("unknown model kind '" + std::string(s) + "' (expected jc, qrm, dicke, sw-effective)");
}

struct ModelSpec {
  ModelKind kind = ModelKind::qrm;
  double omega_f = 0.0;             // mode frequency
  std::vector<double> omega_d;      // qubit splittings, one per qubit
  std::vector<double> g;            // qubit-mode couplings, any sign

  int n_qubits() const noexcept { return static_cast<int>(omega_d.size()); }

  ModelSpec with_kind(ModelKind k) const {
    ModelSpec s = *this;
    s.kind = k;
    return s;
  }

  /// Throws SpecError / ModelKindError when the invariants fail.
  void validate() const {
    if (!(omega_f > 0.0) || !std::isfinite(omega_f)) throw SpecError("omega_f must be positive and finite");
    if (omega_d.size() != g.size())
      throw SpecError("omega_d has " + std::to_string(omega_d.size()) + " entries but g has " + std::to_string(g.size()));
    if (omega_d.empty()) throw SpecError("model needs at least one qubit");
    for (double w : omega_d)
      if (!std::isfinite(w)) throw SpecError("omega_d entries must be finite");
    for (double c : g)
      if (!std::isfinite(c)) throw SpecError("g entries must be finite");
    if ((kind == ModelKind::jc || kind == ModelKind::qrm) && omega_d.size() != 1)
      throw ModelKindError(std::string(to_string(kind)) + " is a single-qubit model, got " +
                           std::to_string(omega_d.size()) + " qubits");
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Dispersive-regime quantities of the Schrieffer-Wolff expansion.
struct EffectiveCouplings {
  Eigen::MatrixXd J;                  // symmetric, zero diagonal
  std::vector<double> delta_minus;    // Omega_dn - Omega_f
  std::vector<double> delta_plus;     // Omega_dn + Omega_f
  std::vector<double> dispersive_shift;  // g_n^2 (1/delta_minus + 1/delta_plus)
};

/// Resonance guard, relative to omega_f.
inline constexpr double kResonanceGuard = 1e-6;

namespace detail {

inline void require_kind(const ModelSpec& spec, ModelKind expected) {
  spec.validate();
  if (spec.kind != expected)
    throw ModelKindError("builder for " + std::string(to_string(expected)) + " called with a " +
                         std::string(to_string(spec.kind)) + " spec");
}

inline void require_layout(const ModelSpec& spec, const HilbertLayout& layout) {
  if (layout.n_qubits() != spec.n_qubits())
    throw LayoutError("spec has " + std::to_string(spec.n_qubits()) + " qubits but layout " + layout.describe());
  if (layout.fock_cutoff() < 2) throw InvalidDimensionError("models need fock_cutoff >= 2");
}

inline Operator mode_position(const HilbertLayout& layout) {
  const auto a = annihilation(layout.fock_cutoff());
  return embed((a + a.adjoint()).as_hermitian(), Slot::mode(), layout);
}

/// sum_n (Omega_dn / 2) sigma^z_n + Omega_f a†a
inline Operator free_hamiltonian(const ModelSpec& spec, const HilbertLayout& layout) {
  Operator h = spec.omega_f * embed(number_operator(layout.fock_cutoff()), Slot::mode(), layout);
  const auto sz = pauli(Pauli::z);
  for (int n = 0; n < spec.n_qubits(); ++n) h = h + (0.5 * spec.omega_d[n]) * embed(sz, Slot::qubit(n), layout);
  return h;
}

}  // namespace detail

/// X = a + a† on the full layout; the operator through which the mode couples
/// to both the qubits and the bath.
inline Operator mode_coupling_operator(const HilbertLayout& layout) { return detail::mode_position(layout); }

/// Total excitation number a†a + sum_n sigma^+_n sigma^-_n.
inline Operator excitation_number(const HilbertLayout& layout) {
  Operator n = embed(number_operator(layout.fock_cutoff()), Slot::mode(), layout);
  const auto up = (pauli(Pauli::plus) * pauli(Pauli::minus)).as_hermitian();
  for (int q = 0; q < layout.n_qubits(); ++q) n = n + embed(up, Slot::qubit(q), layout);
  return n;
}

/// (prod_n (-sigma^z_n)) exp(i pi a†a); for one qubit this is -sigma^z e^{i pi a†a}.
inline Operator parity_operator(const HilbertLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.dim());
  Matrix p = Matrix::Zero(d, d);
  for (std::size_t bits = 0; bits < layout.qubit_dim(); ++bits) {
    double qubit_sign = 1.0;
    for (int q = 0; q < layout.n_qubits(); ++q) {
      const bool down = (bits >> (layout.n_qubits() - q - 1)) & 1u;
      qubit_sign *= down ? 1.0 : -1.0;
    }
    for (int n = 0; n < layout.fock_cutoff(); ++n) {
      const auto i = static_cast<Eigen::Index>(layout.index(bits, n));
      p(i, i) = qubit_sign * ((n % 2 == 0) ? 1.0 : -1.0);
    }
  }
  return Operator::hermitian(layout, std::move(p));
}

/// H = (Omega_d/2) sigma^z + Omega_f a†a + g (sigma^+ a + sigma^- a†)
inline Operator build_jc(const ModelSpec& spec, const HilbertLayout& layout) {
  detail::require_kind(spec, ModelKind::jc);
  detail::require_layout(spec, layout);
  const auto a = embed(annihilation(layout.fock_cutoff()), Slot::mode(), layout);
  const auto sp = embed(pauli(Pauli::plus), Slot::qubit(0), layout);
  const auto sm = embed(pauli(Pauli::minus), Slot::qubit(0), layout);
  const Operator coupling = (sp * a + sm * a.adjoint()).as_hermitian();
  return (detail::free_hamiltonian(spec, layout) + spec.g[0] * coupling).as_hermitian();
}

/// H = (Omega_d/2) sigma^z + Omega_f a†a + g sigma^x (a + a†)
inline Operator build_qrm(const ModelSpec& spec, const HilbertLayout& layout) {
  detail::require_kind(spec, ModelKind::qrm);
  detail::require_layout(spec, layout);
  const auto sx = embed(pauli(Pauli::x), Slot::qubit(0), layout);
  const Operator coupling = (sx * detail::mode_position(layout)).as_hermitian();
  return (detail::free_hamiltonian(spec, layout) + spec.g[0] * coupling).as_hermitian();
}

/// H = sum_n (Omega_dn/2) sigma^z_n + Omega_f a†a + sum_n g_n sigma^x_n (a + a†)
inline Operator build_dicke(const ModelSpec& spec, const HilbertLayout& layout) {
  detail::require_kind(spec, ModelKind::dicke);
  detail::require_layout(spec, layout);
  const auto x = detail::mode_position(layout);
  Operator h = detail::free_hamiltonian(spec, layout);
  for (int n = 0; n < spec.n_qubits(); ++n) {
    const auto sx = embed(pauli(Pauli::x), Slot::qubit(n), layout);
    h = h + spec.g[n] * (sx * x).as_hermitian();
  }
  return h.as_hermitian();
}

inline EffectiveCouplings effective_couplings(const ModelSpec& spec) {
  spec.validate();
  const int L = spec.n_qubits();
  EffectiveCouplings out;
  out.J = Eigen::MatrixXd::Zero(L, L);
  for (int n = 0; n < L; ++n) {
    const double dm = spec.omega_d[n] - spec.omega_f;
    const double dp = spec.omega_d[n] + spec.omega_f;
    if (std::abs(dm) <= kResonanceGuard * spec.omega_f)
      throw ResonanceError("qubit " + std::to_string(n + 1) +
                           " is resonant with the mode; the dispersive expansion is invalid");
    if (std::abs(dp) <= kResonanceGuard * spec.omega_f)
      throw ResonanceError("qubit " + std::to_string(n + 1) + " has Omega_d = -Omega_f");
    out.delta_minus.push_back(dm);
    out.delta_plus.push_back(dp);
    out.dispersive_shift.push_back(spec.g[n] * spec.g[n] * (1.0 / dm + 1.0 / dp));
  }
  for (int n = 0; n < L; ++n)
    for (int m = 0; m < L; ++m) {
      if (n == m) continue;
      out.J(n, m) = spec.g[n] * spec.g[m] *
                    (1.0 / out.delta_minus[n] + 1.0 / out.delta_minus[m] - 1.0 / out.delta_plus[n] -
                     1.0 / out.delta_plus[m]);
    }
  return out;
}

/// Constant that the second-order transformation adds on top of the three
/// terms built by build_sw_effective: sum_n (g_n^2 / 2)(1/Delta_n - 1/delta_n).
/// Shifts absolute energies only.
inline double sw_energy_offset(const ModelSpec& spec) {
  const auto c = effective_couplings(spec);
  double offset = 0.0;
  for (int n = 0; n < spec.n_qubits(); ++n)
    offset += 0.5 * spec.g[n] * spec.g[n] * (1.0 / c.delta_minus[n] - 1.0 / c.delta_plus[n]);
  return offset;
}

/// H_eff = Omega_f a†a + sum_n (Omega_dn/2) sigma^z_n
///       + (1/2) sum_n g_n^2 (1/Delta_n + 1/delta_n) (a + a†)^2 sigma^z_n
///       + (1/2) sum_{n>m} J_nm sigma^x_n sigma^x_m
inline Operator build_sw_effective(const ModelSpec& spec, const HilbertLayout& layout) {
  detail::require_kind(spec, ModelKind::sw_effective);
  detail::require_layout(spec, layout);
  const auto c = effective_couplings(spec);
  const auto x = detail::mode_position(layout);
  const Operator x2 = (x * x).as_hermitian();

  Operator h = detail::free_hamiltonian(spec, layout);
  for (int n = 0; n < spec.n_qubits(); ++n) {
    const auto sz = embed(pauli(Pauli::z), Slot::qubit(n), layout);
    h = h + (0.5 * c.dispersive_shift[n]) * (x2 * sz).as_hermitian();
  }
  for (int n = 0; n < spec.n_qubits(); ++n)
    for (int m = 0; m < n; ++m) {
      const auto sxn = embed(pauli(Pauli::x), Slot::qubit(n), layout);
      const auto sxm = embed(pauli(Pauli::x), Slot::qubit(m), layout);
      h = h + (0.5 * c.J(n, m)) * (sxn * sxm).as_hermitian();
    }
  return h.as_hermitian();
}

/// Dispatches on spec.kind.
inline Operator build_hamiltonian(const ModelSpec& spec, const HilbertLayout& layout) {
  switch (spec.kind) {
    case ModelKind::jc: return build_jc(spec, layout);
    case ModelKind::qrm: return build_qrm(spec, layout);
    case ModelKind::dicke: return build_dicke(spec, layout);
    case ModelKind::sw_effective: return build_sw_effective(spec, layout);
  }
  throw ModelKindError("unhandled model kind");
}

}  // namespace rabisim
