#pragma once

// Run configuration documents.
//
// A document is a flat list of `section.key = value` assignments separated by
// newlines or ';'. '#' starts a comment. Lists are comma separated. Several
// documents may share one file, separated by a line containing only `---`.
// See README.md for the full key reference.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rabisim/dynamics.hpp"
#include "rabisim/models.hpp"
#include "rabisim/physical_mapping.hpp"

namespace rabisim {

/// Model given through condensate parameters; Omega_f and g are derived.
struct CondensateModel {
  ModelKind kind = ModelKind::qrm;
  std::vector<double> omega_d;
  CondensateParams params;
  friend bool operator==(const CondensateModel&, const CondensateModel&) = default;
};

struct InitialSpec {
  std::vector<QubitState> qubits;  // one per qubit
  double mode_temperature = 0.0;   // K
  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct QuenchSpec {
  double time = 0.0;      // s
  double g_before = 0.0;  // rad/s
  friend bool operator==(const QuenchSpec&, const QuenchSpec&) = default;
};

struct RunConfig {
  std::variant<ModelSpec, CondensateModel> model;
  BathSpec bath;
  InitialSpec initial;
  TimeGrid grid;
  int fock_cutoff = 100;
  double max_step = 0.0;  // 0 -> default_step()
  bool check_cutoff = false;
  bool check_step_halving = false;
  std::optional<QuenchSpec> quench;
  std::string output_file = "run.csv";

  /// The ModelSpec the run simulates (maps condensate parameters when needed).
  ModelSpec model_spec() const {
    if (const auto* m = std::get_if<ModelSpec>(&model)) return *m;
    const auto& c = std::get<CondensateModel>(model);
    return to_model_spec(c.params, c.kind, c.omega_d);
  }
  int n_qubits() const {
    if (const auto* m = std::get_if<ModelSpec>(&model)) return m->n_qubits();
    return static_cast<int>(std::get<CondensateModel>(model).omega_d.size());
  }

  void validate() const {
    if (const auto* m = std::get_if<ModelSpec>(&model)) {
      m->validate();
    } else {
      const auto& c = std::get<CondensateModel>(model);
      c.params.validate();
      model_spec();
    }
    bath.validate();
    grid.validate();
    if (fock_cutoff < 2) throw ValidationError("numerics.fock_cutoff must be >= 2");
    if (max_step < 0.0) throw ValidationError("numerics.max_step must be >= 0");
    if (static_cast<int>(initial.qubits.size()) != n_qubits())
      throw ValidationError("initial.qubits lists " + std::to_string(initial.qubits.size()) + " states for " +
                            std::to_string(n_qubits()) + " qubits");
    if (!(initial.mode_temperature >= 0.0)) throw ValidationError("initial.mode_temperature must be >= 0");
    if (quench && !(quench->time > 0.0)) throw ValidationError("quench.time must be positive");
    if (output_file.empty() || output_file.find_first_of(";#\n") != std::string::npos)
      throw ValidationError("output.file must be a non-empty name without ';' or '#'");
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  std::string value;
  int line;
  bool used = false;
};

class EntryTable {
 public:
  void add(const std::string& key, std::string value, int line) {
    if (entries_.count(key)) throw ConfigParseError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    entries_.emplace(key, Entry{std::move(value), line});
  }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  bool has_prefix(const std::string& prefix) const {
    for (const auto& [k, e] : entries_)
      if (k.rfind(prefix, 0) == 0) return true;
    return false;
  }

  std::optional<std::string> str(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }
  std::string required_str(const std::string& key) {
    auto v = str(key);
    if (!v) throw ValidationError("missing required key '" + key + "'");
    return *v;
  }
  std::optional<double> number(const std::string& key) {
    auto v = str(key);
    if (!v) return std::nullopt;
    return to_number(key, *v);
  }
  double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }
  double required_number(const std::string& key) {
    auto v = number(key);
    if (!v) throw ValidationError("missing required key '" + key + "'");
    return *v;
  }
  std::optional<std::vector<double>> numbers(const std::string& key) {
    auto v = str(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_number(key, trim(item)));
    return out;
  }
  std::vector<double> required_numbers(const std::string& key) {
    auto v = numbers(key);
    if (!v) throw ValidationError("missing required key '" + key + "'");
    return *v;
  }
  bool flag(const std::string& key, bool fallback) {
    auto v = str(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ConfigParseError(where(key) + "expected true or false, got '" + *v + "'");
  }

  void reject_unused() const {
    for (const auto& [k, e] : entries_)
      if (!e.used) throw ConfigParseError("line " + std::to_string(e.line) + ": unknown key '" + k + "'");
  }

  std::string where(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? key + ": " : "line " + std::to_string(it->second.line) + ", key '" + key + "': ";
  }

 private:
  double to_number(const std::string& key, const std::string& text) const {
    if (text.empty()) throw ConfigParseError(where(key) + "empty number");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
      throw ConfigParseError(where(key) + "'" + text + "' is not a finite number");
    return v;
  }

  std::map<std::string, Entry> entries_;
};

inline std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

}  // namespace detail

/// Parses and validates one document.
inline RunConfig parse_config(std::string_view text) {
  detail::EntryTable t;
  std::vector<std::pair<std::string, int>> statements;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::stringstream parts(line);
      std::string part;
      while (std::getline(parts, part, ';')) statements.emplace_back(detail::trim(part), line_no);
    }
  }
  for (const auto& [stmt, this_line] : statements) {
    if (stmt.empty()) continue;
    if (stmt == "---") throw ConfigParseError("line " + std::to_string(this_line) + ": unexpected document separator");
    const auto eq = stmt.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("line " + std::to_string(this_line) + ": expected 'key = value', got '" + stmt + "'");
    const std::string key = detail::trim(stmt.substr(0, eq));
    const std::string value = detail::trim(stmt.substr(eq + 1));
    if (key.empty()) throw ConfigParseError("line " + std::to_string(this_line) + ": empty key");
    t.add(key, value, this_line);
  }

  RunConfig cfg;
  const ModelKind kind = parse_model_kind(t.required_str("model.kind"));
  const auto omega_d = t.required_numbers("model.omega_d");
  const bool direct = t.has("model.omega_f") || t.has("model.g");
  const bool condensate = t.has_prefix("condensate.");
  if (direct && condensate)
    throw ValidationError("both a model spec (model.omega_f / model.g) and condensate.* parameters are given; "
                          "use exactly one");
  if (!direct && !condensate)
    throw ValidationError("no model parameters: give model.omega_f and model.g, or a condensate.* block");
  if (direct) {
    cfg.model = ModelSpec{kind, t.required_number("model.omega_f"), omega_d, t.required_numbers("model.g")};
  } else {
    CondensateModel c{kind, omega_d, {}};
    c.params.atom_mass = t.number_or("condensate.atom_mass", constants::mass_rb87);
    c.params.scattering_aa = t.required_number("condensate.scattering_aa");
    c.params.scattering_ab = t.required_number("condensate.scattering_ab");
    c.params.density = t.required_number("condensate.density");
    c.params.box_length = t.required_number("condensate.box_length");
    c.params.radial_length = t.number("condensate.radial_length");
    c.params.raman_rabi = t.number("condensate.raman_rabi");
    c.params.raman_detuning = t.number("condensate.raman_detuning");
    c.params.scattering_bb = t.number("condensate.scattering_bb");
    cfg.model = c;
  }

  cfg.bath.gamma = t.number_or("bath.gamma", 0.0);
  cfg.bath.temperature = t.number_or("bath.temperature", 0.0);

  const auto n_qubits = omega_d.size();
  if (auto q = t.str("initial.qubits")) {
    std::stringstream ss(*q);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (item == "up") cfg.initial.qubits.push_back(QubitState::up);
      else if (item == "down") cfg.initial.qubits.push_back(QubitState::down);
      else throw ConfigParseError(t.where("initial.qubits") + "qubit state must be up or down, got '" + item + "'");
    }
  } else {
    cfg.initial.qubits.assign(n_qubits, QubitState::up);
  }
  cfg.initial.mode_temperature = t.number_or("initial.mode_temperature", cfg.bath.temperature);

  cfg.grid.t_start = t.number_or("grid.t_start", 0.0);
  cfg.grid.t_end = t.required_number("grid.t_end");
  const double n_samples = t.number_or("grid.n_samples", 201);
  if (n_samples != std::floor(n_samples) || n_samples < 2 || n_samples > 1e7)
    throw ValidationError("grid.n_samples must be an integer >= 2");
  cfg.grid.n_samples = static_cast<int>(n_samples);

  const double cutoff = t.number_or("numerics.fock_cutoff", 100);
  if (cutoff != std::floor(cutoff) || cutoff < 2 || cutoff > 5000)
    throw ValidationError("numerics.fock_cutoff must be an integer >= 2");
  cfg.fock_cutoff = static_cast<int>(cutoff);
  cfg.max_step = t.number_or("numerics.max_step", 0.0);

  cfg.check_cutoff = t.flag("check.cutoff", false);
  cfg.check_step_halving = t.flag("check.step_halving", false);

  if (t.has_prefix("quench.")) cfg.quench = QuenchSpec{t.required_number("quench.time"), t.number_or("quench.g_before", 0.0)};
  if (auto o = t.str("output.file")) cfg.output_file = *o;

  t.reject_unused();
  cfg.validate();
  return cfg;
}

/// Splits a file on `---` lines and parses each document.
inline std::vector<RunConfig> parse_config_documents(std::string_view text) {
  std::vector<RunConfig> out;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  int first_line = 1, line_no = 0;
  auto flush = [&] {
    if (current.find('=') == std::string::npos) return;  // blank or comment-only
    try {
      out.push_back(parse_config(current));
    } catch (const ConfigParseError& e) {
      throw ConfigParseError("document starting at line " + std::to_string(first_line) + ": " + e.what());
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line) == "---") {
      flush();
      current.clear();
      first_line = line_no + 1;
    } else {
      current += line + '\n';
    }
  }
  flush();
  if (out.empty()) throw ConfigParseError("no configuration document found");
  return out;
}

/// Full document with every default spelled out; parse_config(emit_config(c)) == c.
inline std::string emit_config(const RunConfig& c) {
  using detail::format_double;
  std::ostringstream o;
  if (const auto* m = std::get_if<ModelSpec>(&c.model)) {
    o << "model.kind = " << to_string(m->kind) << '\n'
      << "model.omega_f = " << format_double(m->omega_f) << '\n'
      << "model.omega_d = " << detail::join_numbers(m->omega_d) << '\n'
      << "model.g = " << detail::join_numbers(m->g) << '\n';
  } else {
    const auto& cm = std::get<CondensateModel>(c.model);
    const auto& p = cm.params;
    o << "model.kind = " << to_string(cm.kind) << '\n'
      << "model.omega_d = " << detail::join_numbers(cm.omega_d) << '\n'
      << "condensate.atom_mass = " << format_double(p.atom_mass) << '\n'
      << "condensate.scattering_aa = " << format_double(p.scattering_aa) << '\n'
      << "condensate.scattering_ab = " << format_double(p.scattering_ab) << '\n'
      << "condensate.density = " << format_double(p.density) << '\n'
      << "condensate.box_length = " << format_double(p.box_length) << '\n';
    if (p.radial_length) o << "condensate.radial_length = " << format_double(*p.radial_length) << '\n';
    if (p.raman_rabi) o << "condensate.raman_rabi = " << format_double(*p.raman_rabi) << '\n';
    if (p.raman_detuning) o << "condensate.raman_detuning = " << format_double(*p.raman_detuning) << '\n';
    if (p.scattering_bb) o << "condensate.scattering_bb = " << format_double(*p.scattering_bb) << '\n';
  }
  o << "bath.gamma = " << format_double(c.bath.gamma) << '\n'
    << "bath.temperature = " << format_double(c.bath.temperature) << '\n';
  o << "initial.qubits = ";
  for (std::size_t i = 0; i < c.initial.qubits.size(); ++i)
    o << (i ? ", " : "") << (c.initial.qubits[i] == QubitState::up ? "up" : "down");
  o << '\n' << "initial.mode_temperature = " << format_double(c.initial.mode_temperature) << '\n';
  o << "grid.t_start = " << format_double(c.grid.t_start) << '\n'
    << "grid.t_end = " << format_double(c.grid.t_end) << '\n'
    << "grid.n_samples = " << c.grid.n_samples << '\n';
  o << "numerics.fock_cutoff = " << c.fock_cutoff << '\n'
    << "numerics.max_step = " << format_double(c.max_step) << '\n';
  o << "check.cutoff = " << (c.check_cutoff ? "true" : "false") << '\n'
    << "check.step_halving = " << (c.check_step_halving ? "true" : "false") << '\n';
  if (c.quench)
    o << "quench.time = " << format_double(c.quench->time) << '\n'
      << "quench.g_before = " << format_double(c.quench->g_before) << '\n';
  o << "output.file = " << c.output_file << '\n';
  return o.str();
}

/// emit_config on one line, statements joined by "; ".
inline std::string emit_config_line(const RunConfig& c) {
  std::string doc = emit_config(c), out;
  std::istringstream in(doc);
  std::string line;
  while (std::getline(in, line)) out += (out.empty() ? "" : "; ") + line;
  return out;
}

}  // namespace rabisim
