#pragma once

// Time evolution of density matrices.
//
// Closed systems use the spectral decomposition H = V diag(E) V†. Open
// systems use the microscopic (dressed-state) master equation: the jump
// operators connect eigenstates of the full Hamiltonian, grouped by Bohr
// frequency, with a flat bath spectral density and secular approximation.
// Both propagators work in the eigenbasis of H, where the coherent part of
// the generator is diagonal, so the Liouvillian is never materialized.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rabisim/models.hpp"
#include "rabisim/operator_algebra.hpp"

namespace rabisim {

struct BathSpec {
  double gamma = 0.0;        // bare decay rate, 1/s
  double temperature = 0.0;  // K

  void validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("bath gamma must be >= 0");
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw ParameterError("bath temperature must be >= 0");
  }
  friend bool operator==(const BathSpec&, const BathSpec&) = default;
};

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  int n_samples = 2;

  void validate() const {
    if (!(t_end > t_start)) throw ParameterError("time grid needs t_end > t_start");
    if (n_samples < 2) throw ParameterError("time grid needs at least 2 samples");
  }
  double spacing() const { return (t_end - t_start) / (n_samples - 1); }
  double time(int i) const { return i == n_samples - 1 ? t_end : t_start + spacing() * i; }
  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Named real trajectories sharing one time axis.
class TimeSeries {
 public:
  std::vector<double> times;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_column(const std::string& name, std::vector<double> values) {
    if (has_column(name)) throw ContractViolation("duplicate observable name '" + name + "'");
    if (values.size() != times.size()) throw ContractViolation("column '" + name + "' length differs from time axis");
    columns_.emplace_back(name, std::move(values));
  }
  bool has_column(const std::string& name) const {
    return std::any_of(columns_.begin(), columns_.end(), [&](const auto& c) { return c.first == name; });
  }
  const std::vector<double>& column(const std::string& name) const {
    for (const auto& c : columns_)
      if (c.first == name) return c.second;
    throw ContractViolation("no column named '" + name + "'");
  }
  const std::vector<std::pair<std::string, std::vector<double>>>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return times.size(); }

  void set_meta(const std::string& key, std::string value) {
    for (auto& kv : metadata)
      if (kv.first == key) {
        kv.second = std::move(value);
        return;
      }
    metadata.emplace_back(key, std::move(value));
  }

 private:
  std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

/// Eigenbasis of a Hamiltonian together with the basis-change helpers.
class DressedFrame {
 public:
  explicit DressedFrame(const Operator& hamiltonian) : hamiltonian_(hamiltonian), basis_(hermitian_eig(hamiltonian)) {}

  const Operator& hamiltonian() const noexcept { return hamiltonian_; }
  const HilbertLayout& layout() const noexcept { return hamiltonian_.layout(); }
  const RealVector& energies() const noexcept { return basis_.energies; }
  const Matrix& vectors() const noexcept { return basis_.vectors; }
  Eigen::Index dim() const noexcept { return basis_.energies.size(); }
  double spectral_spread() const { return energies()(dim() - 1) - energies()(0); }

  Matrix to_dressed(const Matrix& bare) const { return basis_.vectors.adjoint() * bare * basis_.vectors; }
  Matrix to_bare(const Matrix& dressed) const { return basis_.vectors * dressed * basis_.vectors.adjoint(); }

 private:
  Operator hamiltonian_;
  Eigenbasis basis_;
};

using SampleVisitor = std::function<void(int index, double time, const Matrix& rho_dressed)>;

/// Sampled states, stored in the dressed frame of the generating Hamiltonian.
class Trajectory {
 public:
  Trajectory(std::shared_ptr<const DressedFrame> frame) : frame_(std::move(frame)) {}

  void push(double t, Matrix rho_dressed) {
    times_.push_back(t);
    states_.push_back(std::move(rho_dressed));
  }
  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const Matrix& dressed_state(std::size_t i) const { return states_.at(i); }
  DensityState state(std::size_t i) const { return DensityState::unchecked(frame_->layout(), frame_->to_bare(states_.at(i))); }
  const DressedFrame& frame() const noexcept { return *frame_; }
  std::shared_ptr<const DressedFrame> frame_ptr() const noexcept { return frame_; }

 private:
  std::shared_ptr<const DressedFrame> frame_;
  std::vector<double> times_;
  std::vector<Matrix> states_;
};

// ---------------------------------------------------------------------------
// Closed evolution

inline void evolve_closed(const DressedFrame& frame, const DensityState& initial, const TimeGrid& grid,
                          const SampleVisitor& visit) {
  grid.validate();
  if (!(initial.layout() == frame.layout())) throw LayoutError("initial state layout differs from Hamiltonian layout");
  const Matrix rho0 = frame.to_dressed(initial.matrix());
  const auto& e = frame.energies();
  const double e0 = e(0);
  const Eigen::Index d = frame.dim();
  Vector phase(d);
  Matrix rho(d, d);
  for (int i = 0; i < grid.n_samples; ++i) {
    const double tau = grid.time(i) - grid.t_start;
    for (Eigen::Index a = 0; a < d; ++a) phase(a) = std::polar(1.0, -(e(a) - e0) * tau);
    rho = phase.asDiagonal() * rho0 * phase.conjugate().asDiagonal();
    visit(i, grid.time(i), rho);
  }
}

/// rho(t) = U(t) rho(0) U†(t), U(t) = V exp(-i E t) V†.
inline Trajectory evolve_closed(const Operator& hamiltonian, const DensityState& initial, const TimeGrid& grid) {
  auto frame = std::make_shared<const DressedFrame>(hamiltonian);
  Trajectory traj(frame);
  evolve_closed(*frame, initial, grid, [&](int, double t, const Matrix& rho) { traj.push(t, rho); });
  return traj;
}

// ---------------------------------------------------------------------------
// Microscopic dissipator

struct JumpEntry {
  Eigen::Index row;  // dressed index of the final state
  Eigen::Index col;  // dressed index of the initial state
  complex amplitude;
};

enum class JumpDirection { down, up };

/// L = sum_e amplitude_e |row_e><col_e| in the dressed basis, applied with `rate`.
struct JumpChannel {
  JumpDirection direction = JumpDirection::down;
  double frequency = 0.0;  // Bohr frequency of the transition cluster
  double rate = 0.0;       // gamma (nbar + 1) downward, gamma nbar upward
  std::vector<JumpEntry> entries;
};

struct DissipatorOptions {
  /// Transitions closer than this (rad/s) are one Bohr frequency; zero-frequency
  /// pairs below it are dropped. A non-positive value selects 1e-9 x spread / cutoff.
  double omega_floor = 0.0;
  /// Entries with |<j|X|k>|^2 below this, and channels whose effective rate is
  /// below rate_floor x gamma, are pruned.
  double rate_floor = 1e-12;

  static DissipatorOptions for_mode(double omega_f) { return {1e-9 * omega_f, 1e-12}; }
};

class ChannelSet {
 public:
  ChannelSet(std::shared_ptr<const DressedFrame> frame, BathSpec bath, std::vector<JumpChannel> channels)
      : frame_(std::move(frame)), bath_(bath), channels_(std::move(channels)) {}

  const DressedFrame& frame() const noexcept { return *frame_; }
  std::shared_ptr<const DressedFrame> frame_ptr() const noexcept { return frame_; }
  const BathSpec& bath() const noexcept { return bath_; }
  const std::vector<JumpChannel>& channels() const noexcept { return channels_; }
  bool empty() const noexcept { return channels_.empty(); }

  /// Channels as full-layout operators in the bare basis (for checks; O(dim^3) each).
  std::vector<std::pair<double, Operator>> bare_operators() const {
    std::vector<std::pair<double, Operator>> out;
    const Eigen::Index d = frame_->dim();
    for (const auto& c : channels_) {
      Matrix l = Matrix::Zero(d, d);
      for (const auto& e : c.entries) l(e.row, e.col) += e.amplitude;
      out.emplace_back(c.rate, Operator::general(frame_->layout(), frame_->to_bare(l)));
    }
    return out;
  }

 private:
  std::shared_ptr<const DressedFrame> frame_;
  BathSpec bath_;
  std::vector<JumpChannel> channels_;
};

inline ChannelSet build_microscopic_dissipator(std::shared_ptr<const DressedFrame> frame,
                                               const Operator& mode_coupling_op, const BathSpec& bath,
                                               DissipatorOptions opts = {}) {
  bath.validate();
  if (!(mode_coupling_op.layout() == frame->layout()))
    throw LayoutError("mode coupling operator layout differs from Hamiltonian layout");
  if (bath.gamma == 0.0) return ChannelSet(std::move(frame), bath, {});

  const Eigen::Index d = frame->dim();
  const auto& e = frame->energies();
  double omega_floor = opts.omega_floor;
  if (omega_floor <= 0.0) omega_floor = 1e-9 * frame->spectral_spread() / frame->layout().fock_cutoff();

  const Matrix x = frame->to_dressed(mode_coupling_op.matrix());

  struct Transition {
    double omega;
    Eigen::Index lower, upper;
    complex element;  // <lower| X |upper>
  };
  std::vector<Transition> transitions;
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double w = e(k) - e(j);
      if (w <= omega_floor) continue;
      if (std::norm(x(j, k)) < opts.rate_floor) continue;
      transitions.push_back({w, j, k, x(j, k)});
    }
  std::stable_sort(transitions.begin(), transitions.end(), [](const Transition& a, const Transition& b) {
    if (a.omega != b.omega) return a.omega < b.omega;
    if (a.lower != b.lower) return a.lower < b.lower;
    return a.upper < b.upper;
  });

  std::vector<JumpChannel> channels;
  std::size_t begin = 0;
  while (begin < transitions.size()) {
    std::size_t end = begin + 1;
    while (end < transitions.size() && transitions[end].omega - transitions[end - 1].omega <= omega_floor) ++end;
    double omega = 0.0, max_norm = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      omega += transitions[i].omega;
      max_norm = std::max(max_norm, std::norm(transitions[i].element));
    }
    omega /= static_cast<double>(end - begin);
    const double nbar = bose_occupation(omega, bath.temperature);

    JumpChannel down{JumpDirection::down, omega, bath.gamma * (nbar + 1.0), {}};
    JumpChannel up{JumpDirection::up, omega, bath.gamma * nbar, {}};
    for (std::size_t i = begin; i < end; ++i) {
      const auto& t = transitions[i];
      down.entries.push_back({t.lower, t.upper, t.element});
      up.entries.push_back({t.upper, t.lower, std::conj(t.element)});
    }
    const double floor = opts.rate_floor * bath.gamma;
    if (down.rate * max_norm >= floor) channels.push_back(std::move(down));
    if (up.rate * max_norm >= floor) channels.push_back(std::move(up));
    begin = end;
  }
  return ChannelSet(std::move(frame), bath, std::move(channels));
}

/// Convenience overload that diagonalizes H itself.
inline ChannelSet build_microscopic_dissipator(const Operator& hamiltonian, const Operator& mode_coupling_op,
                                               const BathSpec& bath, DissipatorOptions opts = {}) {
  return build_microscopic_dissipator(std::make_shared<const DressedFrame>(hamiltonian), mode_coupling_op, bath, opts);
}

// ---------------------------------------------------------------------------
// Open evolution

struct IntegratorOptions {
  /// Upper bound on the RK4 step in seconds; <= 0 selects 0.5 / generator bound.
  double max_step = 0.0;
  /// Trace drift that aborts the integration.
  double trace_tolerance = 1e-6;
  /// Hard stability bound: step x generator bound never exceeds this. The RK4
  /// stability region contains the left half disk of radius 2.6.
  double stability_limit = 2.5;
};

/// Default RK4 step: 1 / (50 max(Omega_f, |Omega_dn|, |g_n|, gamma)).
inline double default_step(const ModelSpec& spec, const BathSpec& bath) {
  double scale = std::max(spec.omega_f, bath.gamma);
  for (double w : spec.omega_d) scale = std::max(scale, std::abs(w));
  for (double c : spec.g) scale = std::max(scale, std::abs(c));
  return 1.0 / (50.0 * scale);
}

struct IntegrationStats {
  double step = 0.0;         // step actually used
  int substeps = 0;          // RK4 steps per sample interval
  long long total_steps = 0;
  double max_trace_drift = 0.0;
};

namespace detail {

/// Lindblad generator in the dressed basis, split into the pieces that are
/// cheap to apply: elementwise (coherent part + diagonal of sum_c r_c L_c†L_c),
/// population transfers from single-entry channels, general multi-entry
/// channels, and the off-diagonal remainder of sum_c r_c L_c†L_c.
class DressedGenerator {
 public:
  explicit DressedGenerator(const ChannelSet& set) {
    const auto& frame = set.frame();
    const Eigen::Index d = frame.dim();
    const auto& e = frame.energies();

    Matrix k = Matrix::Zero(d, d);
    for (const auto& c : set.channels()) {
      // L†L = sum over entries sharing a row j: conj(x_i) x_i' |col_i><col_i'|
      std::map<Eigen::Index, std::vector<const JumpEntry*>> by_row;
      for (const auto& en : c.entries) by_row[en.row].push_back(&en);
      for (const auto& [row, group] : by_row)
        for (const auto* p : group)
          for (const auto* q : group) k(p->col, q->col) += c.rate * std::conj(p->amplitude) * q->amplitude;

      if (c.entries.size() == 1) {
        const auto& en = c.entries.front();
        transfers_.push_back({en.row, en.col, c.rate * std::norm(en.amplitude)});
      } else {
        multi_.push_back(&c);
      }
    }

    elementwise_.resize(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        elementwise_(a, b) = complex(-0.5 * (k(a, a).real() + k(b, b).real()), -(e(a) - e(b)));

    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        if (a != b && k(a, b) != complex(0.0)) k_off_.push_back({a, b, k(a, b)});

    const double k_row = d == 0 ? 0.0 : k.cwiseAbs().rowwise().sum().maxCoeff();
    bound_ = frame.spectral_spread() + 2.0 * k_row;
  }

  /// Upper estimate of the generator's spectral radius: Bohr spread plus the
  /// Gershgorin radius of the dissipative part.
  double spectral_bound() const noexcept { return bound_; }

  void apply(const Matrix& rho, Matrix& out) const {
    out = elementwise_.cwiseProduct(rho);
    for (const auto& t : transfers_) out(t.row, t.row) += t.weight * rho(t.col, t.col);
    for (const auto* c : multi_)
      for (const auto& p : c->entries)
        for (const auto& q : c->entries)
          out(p.row, q.row) += c->rate * p.amplitude * std::conj(q.amplitude) * rho(p.col, q.col);
    // -1/2 {K_off, rho}
    for (const auto& en : k_off_) {
      out.row(en.row).noalias() -= 0.5 * en.amplitude * rho.row(en.col);
      out.col(en.col).noalias() -= 0.5 * en.amplitude * rho.col(en.row);
    }
  }

 private:
  struct Transfer {
    Eigen::Index row, col;
    double weight;
  };
  Matrix elementwise_;
  std::vector<Transfer> transfers_;
  std::vector<const JumpChannel*> multi_;
  std::vector<JumpEntry> k_off_;
  double bound_ = 0.0;
};

}  // namespace detail

/// Integrates d rho/dt = -i[H, rho] + sum_c r_c (L_c rho L_c† - {L_c†L_c, rho}/2)
/// with fixed-step classical RK4. Every sample interval is split into equal
/// substeps no longer than the requested step; rho is re-symmetrized after
/// each step.
inline IntegrationStats evolve_open(const ChannelSet& channels, const DensityState& initial, const TimeGrid& grid,
                                    const SampleVisitor& visit, IntegratorOptions opts = {}) {
  grid.validate();
  const auto& frame = channels.frame();
  if (!(initial.layout() == frame.layout())) throw LayoutError("initial state layout differs from Hamiltonian layout");

  const detail::DressedGenerator gen(channels);
  const double bound = std::max(gen.spectral_bound(), std::numeric_limits<double>::min());
  double h = opts.max_step > 0.0 ? opts.max_step : 0.5 / bound;
  h = std::min(h, opts.stability_limit / bound);

  const double interval = grid.spacing();
  const int substeps = std::max(1, static_cast<int>(std::ceil(interval / h * (1.0 - 1e-12))));
  const double dt = interval / substeps;

  const Eigen::Index d = frame.dim();
  Matrix rho = frame.to_dressed(initial.matrix());
  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);

  IntegrationStats stats{dt, substeps, 0, 0.0};
  visit(0, grid.time(0), rho);
  for (int i = 1; i < grid.n_samples; ++i) {
    for (int s = 0; s < substeps; ++s) {
      gen.apply(rho, k1);
      tmp = rho + (0.5 * dt) * k1;
      gen.apply(tmp, k2);
      tmp = rho + (0.5 * dt) * k2;
      gen.apply(tmp, k3);
      tmp = rho + dt * k3;
      gen.apply(tmp, k4);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      tmp = 0.5 * (rho + rho.adjoint());
      rho.swap(tmp);
      ++stats.total_steps;
    }
    const double drift = std::abs(rho.trace().real() - 1.0);
    stats.max_trace_drift = std::max(stats.max_trace_drift, drift);
    if (!(drift <= opts.trace_tolerance))
      throw IntegrationError("trace drifted by " + std::to_string(drift) + " at t = " + std::to_string(grid.time(i)) +
                             " s; reduce the integration step");
    // Unstable coherences can grow without moving the trace; |rho_ab| <= 1 for any state.
    const double largest = rho.cwiseAbs().maxCoeff();
    if (!(largest <= 1.0 + opts.trace_tolerance))
      throw IntegrationError("density matrix entry of magnitude " + std::to_string(largest) + " at t = " +
                             std::to_string(grid.time(i)) + " s; reduce the integration step");
    visit(i, grid.time(i), rho);
  }
  return stats;
}

inline Trajectory evolve_open(const Operator& hamiltonian, const ChannelSet& channels, const DensityState& initial,
                              const TimeGrid& grid, IntegratorOptions opts = {}) {
  const auto& h = channels.frame().hamiltonian();
  if (!(hamiltonian.layout() == h.layout()) || hamiltonian.matrix() != h.matrix())
    throw ContractViolation("channel set was built for a different Hamiltonian");
  Trajectory traj(channels.frame_ptr());
  evolve_open(channels, initial, grid, [&](int, double t, const Matrix& rho) { traj.push(t, rho); }, opts);
  return traj;
}

// ---------------------------------------------------------------------------
// Observables

/// n_ph, sz (or sz_1..sz_L), parity and, for one qubit, p_down0.
class ObservableSet {
 public:
  ObservableSet(const DressedFrame& frame, std::size_t n_samples) {
    const auto& layout = frame.layout();
    auto add = [&](std::string name, const Operator& op) {
      names_.push_back(std::move(name));
      // Tr(rho O) = sum(rho .* O^T); store the transposed dressed operator.
      dressed_.push_back(frame.to_dressed(op.matrix()).transpose());
      values_.emplace_back(n_samples, 0.0);
    };
    add("n_ph", embed(number_operator(layout.fock_cutoff()), Slot::mode(), layout));
    for (int q = 0; q < layout.n_qubits(); ++q)
      add(layout.n_qubits() == 1 ? "sz" : "sz_" + std::to_string(q + 1), embed(pauli(Pauli::z), Slot::qubit(q), layout));
    add("parity", parity_operator(layout));
    if (layout.n_qubits() == 1) {
      const auto d = static_cast<Eigen::Index>(layout.dim());
      Matrix proj = Matrix::Zero(d, d);
      const auto i = static_cast<Eigen::Index>(layout.index(1, 0));
      proj(i, i) = 1.0;
      add("p_down0", Operator::hermitian(layout, std::move(proj)));
    }
    times_.resize(n_samples, 0.0);
  }

  void record(int index, double t, const Matrix& rho_dressed) {
    times_.at(index) = t;
    for (std::size_t c = 0; c < names_.size(); ++c) values_[c][index] = rho_dressed.cwiseProduct(dressed_[c]).sum().real();
  }

  SampleVisitor visitor() {
    return [this](int i, double t, const Matrix& rho) { record(i, t, rho); };
  }

  TimeSeries series() const {
    TimeSeries ts;
    ts.times = times_;
    for (std::size_t c = 0; c < names_.size(); ++c) ts.add_column(names_[c], values_[c]);
    return ts;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> dressed_;
  std::vector<std::vector<double>> values_;
  std::vector<double> times_;
};

inline TimeSeries observables(const Trajectory& trajectory, const HilbertLayout& layout) {
  if (!(trajectory.frame().layout() == layout)) throw LayoutError("trajectory layout mismatch");
  ObservableSet obs(trajectory.frame(), trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i)
    obs.record(static_cast<int>(i), trajectory.times()[i], trajectory.dressed_state(i));
  return obs.series();
}

}  // namespace rabisim
