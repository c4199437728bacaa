#include "spinotto/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spinotto {

namespace {

const std::vector<std::string>& axis_whitelist() {
  static const std::vector<std::string> names = {"gamma", "tau", "T_H", "t_h", "B_H"};
  return names;
}

// Lazily evaluated per-point caches so related quantities share the same
// propagators and cycle run.
class PointContext {
 public:
  explicit PointContext(const CycleConfig& cfg) : cfg_(cfg) {}

  const CycleConfig& cfg() const { return cfg_; }

  const CycleResult& cycle() {
    if (!cycle_) cycle_ = run_cycle_numeric(cfg_);
    return *cycle_;
  }

  const QuasistaticResult& quasi() {
    if (!quasi_) quasi_ = quasistatic_closed_form(cfg_);
    return *quasi_;
  }

  const TransitionProbabilities& probs() {
    if (!probs_) {
      if (cfg_.adiabatic_ramps())
        throw InvalidFields("sweep: transition probabilities need a finite tau");
      probs_ = transition_probabilities(cfg_.B_L, cfg_.B_H, cfg_.tau, cfg_.low_params(),
                                        cfg_.unitary_steps);
    }
    return *probs_;
  }

  const FiniteTimeResult& finite_time() {
    if (!finite_) finite_ = finite_time_closed_form(cfg_, probs().xi);
    return *finite_;
  }

  const LocalCycleResult& local_quasi() {
    if (!local_q_) local_q_ = local_quasistatic(cfg_);
    return *local_q_;
  }

  const LocalCycleResult& local_ft() {
    if (!local_ft_) local_ft_ = local_finite_time(cfg_, probs());
    return *local_ft_;
  }

  const ThermalizationSample& therm() {
    if (!therm_) {
      if (std::isinf(cfg_.t_h))
        throw InvalidFields("sweep: thermalization quantities need a finite t_h");
      therm_ = thermalization_profile(cfg_, {cfg_.t_h}).front();
    }
    return *therm_;
  }

  double lambda_inf() {
    const double K = cfg_.high_params().k();
    return (K - cfg_.B_H) / K / 2.0;
  }

  double delta_inf() {
    const double K = cfg_.low_params().k();
    return (K - cfg_.B_L) / K / 2.0;
  }

 private:
  CycleConfig cfg_;
  std::optional<CycleResult> cycle_;
  std::optional<QuasistaticResult> quasi_;
  std::optional<TransitionProbabilities> probs_;
  std::optional<FiniteTimeResult> finite_;
  std::optional<LocalCycleResult> local_q_;
  std::optional<LocalCycleResult> local_ft_;
  std::optional<ThermalizationSample> therm_;
};

using Evaluator = Cell (*)(PointContext&);

const std::map<std::string, Evaluator>& output_registry() {
  static const std::map<std::string, Evaluator> reg = {
      {"E_A", [](PointContext& p) -> Cell { return p.cycle().E_A; }},
      {"E_B", [](PointContext& p) -> Cell { return p.cycle().E_B; }},
      {"E_C", [](PointContext& p) -> Cell { return p.cycle().E_C; }},
      {"E_D", [](PointContext& p) -> Cell { return p.cycle().E_D; }},
      {"W", [](PointContext& p) -> Cell { return p.cycle().W; }},
      {"W1", [](PointContext& p) -> Cell { return p.cycle().W1; }},
      {"W2", [](PointContext& p) -> Cell { return p.cycle().W2; }},
      {"Q_H", [](PointContext& p) -> Cell { return p.cycle().Q_H; }},
      {"Q_L", [](PointContext& p) -> Cell { return p.cycle().Q_L; }},
      {"eta", [](PointContext& p) -> Cell { return p.cycle().eta; }},
      {"regime",
       [](PointContext& p) -> Cell { return std::string(regime_name(p.cycle().regime)); }},
      {"xi", [](PointContext& p) -> Cell { return p.probs().xi; }},
      {"lambda", [](PointContext& p) -> Cell { return p.probs().lambda; }},
      {"delta", [](PointContext& p) -> Cell { return p.probs().delta; }},
      {"lambda_inf", [](PointContext& p) -> Cell { return p.lambda_inf(); }},
      {"delta_inf", [](PointContext& p) -> Cell { return p.delta_inf(); }},
      {"W_tau", [](PointContext& p) -> Cell { return p.finite_time().W_tau; }},
      {"Q_tau", [](PointContext& p) -> Cell { return p.finite_time().Q_tau; }},
      {"eta_tau", [](PointContext& p) -> Cell { return p.finite_time().eta_tau; }},
      {"W_irr",
       [](PointContext& p) -> Cell { return p.finite_time().W_tau - p.quasi().W; }},
      {"W_qs", [](PointContext& p) -> Cell { return p.quasi().W; }},
      {"Q_H_qs", [](PointContext& p) -> Cell { return p.quasi().Q_H; }},
      {"eta_qs", [](PointContext& p) -> Cell { return p.quasi().eta; }},
      {"work_gap", [](PointContext& p) -> Cell { return work_gap(p.cfg()); }},
      {"eta_S",
       [](PointContext& p) -> Cell {
         return single_spin_otto_eff(p.cfg().B_L, p.cfg().B_H);
       }},
      {"eta_Lq", [](PointContext& p) -> Cell { return p.local_quasi().eta_L; }},
      {"W_Lq", [](PointContext& p) -> Cell { return p.local_quasi().W_L; }},
      {"Q_HLq", [](PointContext& p) -> Cell { return p.local_quasi().Q_HL; }},
      {"eta_Ltau", [](PointContext& p) -> Cell { return p.local_ft().eta_L; }},
      {"W_Ltau", [](PointContext& p) -> Cell { return p.local_ft().W_L; }},
      {"Q_HLtau", [](PointContext& p) -> Cell { return p.local_ft().Q_HL; }},
      {"P_L", [](PointContext& p) -> Cell { return p.local_ft().P_L; }},
      {"Q_Ht", [](PointContext& p) -> Cell { return p.therm().Q_Ht; }},
      {"W_t", [](PointContext& p) -> Cell { return p.therm().W_t; }},
      {"D", [](PointContext& p) -> Cell { return p.therm().D; }},
      {"eta_t", [](PointContext& p) -> Cell { return p.therm().eta_t; }},
  };
  return reg;
}

void set_axis_value(CycleConfig& cfg, const std::string& name, double value) {
  if (name == "gamma")
    cfg.gamma = value;
  else if (name == "tau")
    cfg.tau = value;
  else if (name == "T_H")
    cfg.T_H = value;
  else if (name == "t_h")
    cfg.t_h = value;
  else if (name == "B_H")
    cfg.B_H = value;
  else
    throw InvalidFields("sweep: unknown axis '" + name + "'");
}

SweepRow evaluate_point(const SweepSpec& spec, const std::vector<double>& axis_values) {
  SweepRow row;
  row.axis_values = axis_values;
  CycleConfig cfg = spec.base;
  for (size_t a = 0; a < spec.axes.size(); ++a)
    set_axis_value(cfg, spec.axes[a].name, axis_values[a]);

  PointContext ctx(cfg);
  row.cells.reserve(spec.outputs.size());
  for (const std::string& name : spec.outputs) {
    try {
      row.cells.push_back(output_registry().at(name)(ctx));
    } catch (const SpinOttoError& err) {
      row.cells.push_back(kNaN);
      if (row.error.empty()) row.error = name + ": " + err.what();
    }
  }
  return row;
}

std::vector<std::vector<double>> grid_points(const SweepSpec& spec) {
  std::vector<std::vector<double>> pts;
  if (spec.axes.size() == 1) {
    for (double v : spec.axes[0].values) pts.push_back({v});
  } else {
    for (double v1 : spec.axes[0].values)
      for (double v2 : spec.axes[1].values) pts.push_back({v1, v2});
  }
  return pts;
}

RunRecord assemble_record(const SweepSpec& spec, std::vector<SweepRow> rows, double seconds,
                          int threads) {
  RunRecord rec;
  rec.config_hash = config_digest(spec);
  for (const AxisSpec& a : spec.axes) rec.columns.push_back(a.name);
  for (const std::string& o : spec.outputs) rec.columns.push_back(o);
  rec.columns.push_back("error");
  rec.rows = std::move(rows);
  rec.wall_time_s = seconds;
  rec.threads = threads;
  {
    std::ostringstream note;
    note << "ramp_steps=";
    if (spec.base.unitary_steps == 0)
      note << "auto";
    else
      note << spec.base.unitary_steps;
    note << " lindblad_dt=";
    if (spec.base.lindblad_dt == 0.0)
      note << "auto";
    else
      note << format_double(spec.base.lindblad_dt);
    rec.integrator_note = note.str();
  }
  return rec;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> v;
  for (int i = 0;; ++i) {
    const double x = lo + step * i;
    if (x > hi + 1e-12) break;
    v.push_back(x);
  }
  return v;
}

std::vector<double> concat(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

double parse_value(const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), [](char c) { return std::isspace(c); }), t.end());
  if (t == "inf" || t == "infinity" || t == "Inf") return kInf;
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw InvalidOverride("cannot parse numeric value '" + text + "'");
  }
  if (pos != t.size()) throw InvalidOverride("trailing characters in value '" + text + "'");
  return v;
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_value(item));
  }
  return out;
}

struct ParsedDocument {
  std::map<std::string, std::string> kv;
};

ParsedDocument parse_document(std::istream& in) {
  ParsedDocument doc;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw IoError("config: expected 'key = value', got '" + line + "'");
      continue;
    }
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    doc.kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return doc;
}

}  // namespace

bool is_sweep_axis(const std::string& name) {
  const auto& wl = axis_whitelist();
  return std::find(wl.begin(), wl.end(), name) != wl.end();
}

bool is_sweep_output(const std::string& name) {
  return output_registry().count(name) > 0;
}

void SweepSpec::validate() const {
  base.validate();
  if (axes.empty() || axes.size() > 2)
    throw InvalidFields("SweepSpec: need one or two axes");
  for (const AxisSpec& a : axes) {
    if (!is_sweep_axis(a.name))
      throw InvalidFields("SweepSpec: axis '" + a.name + "' not in the whitelist");
    if (a.values.empty()) throw InvalidFields("SweepSpec: axis '" + a.name + "' is empty");
    for (size_t i = 1; i < a.values.size(); ++i)
      if (!(a.values[i] > a.values[i - 1]))
        throw InvalidFields("SweepSpec: axis '" + a.name + "' must be strictly increasing");
  }
  if (outputs.empty()) throw InvalidFields("SweepSpec: no outputs requested");
  for (const std::string& o : outputs)
    if (!is_sweep_output(o)) throw InvalidFields("SweepSpec: unknown output '" + o + "'");
}

int effective_threads() {
  int n = 1;
#ifdef _OPENMP
  n = omp_get_max_threads();
#endif
  if (const char* env = std::getenv("SPIN_OTTO_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      // ignore malformed values, keep the default
    }
  }
  return n;
}

RunRecord run_sweep_serial(const SweepSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = grid_points(spec);
  std::vector<SweepRow> rows(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) rows[i] = evaluate_point(spec, pts[i]);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return assemble_record(spec, std::move(rows), secs, 1);
}

RunRecord run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = grid_points(spec);
  std::vector<SweepRow> rows(pts.size());
  const int threads = effective_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (long i = 0; i < static_cast<long>(pts.size()); ++i)
    rows[static_cast<size_t>(i)] = evaluate_point(spec, pts[static_cast<size_t>(i)]);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return assemble_record(spec, std::move(rows), secs, threads);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const RunRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_csv: cannot open '" + path + "'");
  for (size_t i = 0; i < record.columns.size(); ++i)
    out << (i ? "," : "") << record.columns[i];
  out << "\n";
  for (const SweepRow& row : record.rows) {
    bool first = true;
    for (double v : row.axis_values) {
      out << (first ? "" : ",") << format_double(v);
      first = false;
    }
    for (const Cell& c : row.cells) {
      out << (first ? "" : ",");
      first = false;
      if (std::holds_alternative<double>(c))
        out << format_double(std::get<double>(c));
      else
        out << std::get<std::string>(c);
    }
    out << "," << row.error << "\n";
  }
  if (!out) throw IoError("write_csv: failed writing '" + path + "'");
}

void write_sidecar_json(const RunRecord& record, const SweepSpec& spec,
                        const std::string& path) {
  nlohmann::json j;
  j["config_hash"] = record.config_hash;
  j["tool_version"] = record.tool_version;
  j["columns"] = record.columns;
  j["row_count"] = record.rows.size();
  j["wall_time_s"] = record.wall_time_s;
  j["threads"] = record.threads;
  j["integrator"] = record.integrator_note;
  nlohmann::json axes = nlohmann::json::array();
  for (const AxisSpec& a : spec.axes)
    axes.push_back({{"name", a.name}, {"points", a.values.size()}});
  j["axes"] = axes;
  j["base_config"] = {
      {"B_L", spec.base.B_L},     {"B_H", spec.base.B_H},   {"J", spec.base.J},
      {"gamma", spec.base.gamma}, {"T_L", spec.base.T_L},   {"T_H", spec.base.T_H},
      {"tau", format_double(spec.base.tau)},
      {"t_h", format_double(spec.base.t_h)},
      {"t_c", format_double(spec.base.t_c)},
      {"Gamma", spec.base.Gamma},
  };
  std::ofstream out(path);
  if (!out) throw IoError("write_sidecar_json: cannot open '" + path + "'");
  out << j.dump(2) << "\n";
}

std::string config_digest(const SweepSpec& spec) {
  std::ostringstream canon;
  canon << "B_L=" << format_double(spec.base.B_L) << ";B_H=" << format_double(spec.base.B_H)
        << ";J=" << format_double(spec.base.J) << ";gamma=" << format_double(spec.base.gamma)
        << ";T_L=" << format_double(spec.base.T_L) << ";T_H=" << format_double(spec.base.T_H)
        << ";tau=" << format_double(spec.base.tau) << ";t_h=" << format_double(spec.base.t_h)
        << ";t_c=" << format_double(spec.base.t_c)
        << ";Gamma=" << format_double(spec.base.Gamma)
        << ";steps=" << spec.base.unitary_steps
        << ";ldt=" << format_double(spec.base.lindblad_dt);
  for (const AxisSpec& a : spec.axes) {
    canon << ";axis:" << a.name << "=";
    for (double v : a.values) canon << format_double(v) << ",";
  }
  canon << ";out=";
  for (const std::string& o : spec.outputs) canon << o << ",";

  // FNV-1a, 64 bit.
  const std::string s = canon.str();
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

void apply_override(CycleConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "B_L")
    cfg.B_L = parse_value(value);
  else if (key == "B_H")
    cfg.B_H = parse_value(value);
  else if (key == "J")
    cfg.J = parse_value(value);
  else if (key == "gamma")
    cfg.gamma = parse_value(value);
  else if (key == "T_L")
    cfg.T_L = parse_value(value);
  else if (key == "T_H")
    cfg.T_H = parse_value(value);
  else if (key == "tau")
    cfg.tau = parse_value(value);
  else if (key == "t_h")
    cfg.t_h = parse_value(value);
  else if (key == "t_c")
    cfg.t_c = parse_value(value);
  else if (key == "Gamma")
    cfg.Gamma = parse_value(value);
  else if (key == "unitary_steps")
    cfg.unitary_steps = static_cast<long>(parse_value(value));
  else if (key == "lindblad_dt")
    cfg.lindblad_dt = parse_value(value);
  else
    throw InvalidOverride("unknown config field '" + key + "'");
}

CycleConfig parse_cycle_config(std::istream& in) {
  CycleConfig cfg;
  for (const auto& [key, value] : parse_document(in).kv) apply_override(cfg, key, value);
  cfg.validate();
  return cfg;
}

CycleConfig parse_cycle_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_cycle_config(in);
}

SweepSpec parse_sweep_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep file '" + path + "'");
  ParsedDocument doc = parse_document(in);

  SweepSpec spec;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = doc.kv.find(key);
    if (it == doc.kv.end()) return std::nullopt;
    std::string v = it->second;
    doc.kv.erase(it);
    return v;
  };

  for (int axis = 1; axis <= 2; ++axis) {
    const std::string base = "axis" + std::to_string(axis);
    auto name = take(base);
    auto values = take(base + "_values");
    if (!name && !values) continue;
    if (!name || !values)
      throw IoError("sweep file: " + base + " needs both a name and a value list");
    spec.axes.push_back({*name, parse_value_list(*values)});
  }
  if (auto outputs = take("outputs")) {
    std::stringstream ss(*outputs);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const size_t b = item.find_first_not_of(" \t");
      const size_t e = item.find_last_not_of(" \t");
      if (b != std::string::npos) spec.outputs.push_back(item.substr(b, e - b + 1));
    }
  }
  for (const auto& [key, value] : doc.kv) apply_override(spec.base, key, value);
  spec.validate();
  return spec;
}

std::vector<std::string> preset_names() {
  return {"quasistatic-eff",   "regimes-vs-TH",     "finite-time-xi-wirr",
          "thermalization",    "local-workgap",     "local-eff-vs-tau",
          "local-eff-vs-gamma", "power-surface"};
}

SweepSpec make_preset(const std::string& name) {
  SweepSpec spec;  // base defaults are the standard parameter set

  if (name == "quasistatic-eff") {
    spec.axes = {{"gamma", linspace(0.0, 1.0, 101)}};
    spec.outputs = {"W", "Q_H", "eta"};
  } else if (name == "regimes-vs-TH") {
    spec.axes = {{"T_H", concat(arange(1.05, 3.0, 0.05), arange(3.2, 20.0, 0.2))}};
    spec.outputs = {"Q_H", "Q_L", "W", "regime"};
  } else if (name == "finite-time-xi-wirr") {
    spec.axes = {{"gamma", {0.0, 0.25, 0.5, 0.75, 1.0}},
                 {"tau", concat(arange(0.05, 2.0, 0.05), arange(2.2, 20.0, 0.2))}};
    spec.outputs = {"xi", "W_tau", "eta_tau", "W_irr"};
  } else if (name == "thermalization") {
    spec.axes = {{"gamma", {0.0, 1.0}}, {"t_h", arange(0.0, 200.0, 2.5)}};
    spec.outputs = {"Q_Ht", "W_t", "D", "eta_t"};
  } else if (name == "local-workgap") {
    spec.axes = {{"gamma", linspace(0.0, 1.0, 101)}};
    spec.outputs = {"work_gap", "eta_Lq", "eta_S"};
  } else if (name == "local-eff-vs-tau") {
    spec.axes = {{"tau", arange(0.05, 3.0, 0.05)}};
    spec.outputs = {"lambda", "delta", "eta_Ltau", "lambda_inf", "delta_inf", "eta_Lq"};
  } else if (name == "local-eff-vs-gamma") {
    spec.axes = {{"gamma", arange(0.0, 1.0, 0.05)}, {"tau", {0.3, 20.0}}};
    spec.outputs = {"eta_Ltau", "eta_Lq"};
  } else if (name == "power-surface") {
    spec.base.t_h = 100.0;
    spec.base.t_c = 220.0;
    spec.axes = {{"tau", arange(0.05, 3.0, 0.05)}};
    spec.outputs = {"P_L", "eta_Ltau", "W_Ltau"};
  } else {
    throw UnknownPreset("unknown preset '" + name + "'");
  }
  return spec;
}

RunRecord run_preset(const std::string& name,
                     const std::vector<std::pair<std::string, std::string>>& overrides,
                     const std::string& out_dir) {
  SweepSpec spec = make_preset(name);
  for (const auto& [key, value] : overrides) {
    // Overriding a parameter that the preset sweeps collapses that axis to
    // the single requested value.
    bool is_axis = false;
    for (AxisSpec& a : spec.axes)
      if (a.name == key) {
        a.values = {parse_value(value)};
        is_axis = true;
      }
    if (!is_axis) apply_override(spec.base, key, value);
  }
  spec.validate();
  RunRecord rec = run_sweep(spec);
  const std::string stem = out_dir.empty() ? name : out_dir + "/" + name;
  write_csv(rec, stem + ".csv");
  write_sidecar_json(rec, spec, stem + ".json");
  return rec;
}

}  // namespace spinotto
