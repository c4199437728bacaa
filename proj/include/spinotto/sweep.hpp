#pragma once

// Parameter-sweep engine and the named experiment presets.
//
// A sweep evaluates a grid of cycle configurations (one or two axes over a
// fixed whitelist of parameters) and records the requested quantities.  Grid
// points are independent, so the production path fans them out across an
// OpenMP worker pool; run_sweep_serial is the reference implementation kept
// for testing and benchmarking.  Rows are stored in axis order regardless of
// scheduling, and identical specs reproduce byte-identical CSV output.

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spinotto/thermo.hpp"

namespace spinotto {

inline constexpr const char* kToolVersion = "0.1.0";

// Parameters that may serve as sweep axes.
bool is_sweep_axis(const std::string& name);

// Quantities that may be recorded.  Numeric except "regime".
bool is_sweep_output(const std::string& name);

struct AxisSpec {
  std::string name;
  std::vector<double> values;  // non-empty, strictly increasing
};

struct SweepSpec {
  CycleConfig base;
  std::vector<AxisSpec> axes;  // one or two
  std::vector<std::string> outputs;

  void validate() const;
};

using Cell = std::variant<double, std::string>;

struct SweepRow {
  std::vector<double> axis_values;
  std::vector<Cell> cells;
  std::string error;  // per-point failure message; numeric cells become NaN
};

struct RunRecord {
  std::string config_hash;
  std::vector<std::string> columns;  // axes, outputs, then "error"
  std::vector<SweepRow> rows;
  std::string tool_version = kToolVersion;
  std::string integrator_note;
  double wall_time_s = 0.0;
  int threads = 1;
};

// Worker count: SPIN_OTTO_THREADS caps it, default is available parallelism.
int effective_threads();

RunRecord run_sweep_serial(const SweepSpec& spec);
RunRecord run_sweep(const SweepSpec& spec);  // OpenMP over grid points

// Full-precision CSV (17 significant digits, "nan" for missing cells) and a
// JSON sidecar with the config hash and run metadata.
void write_csv(const RunRecord& record, const std::string& path);
void write_sidecar_json(const RunRecord& record, const SweepSpec& spec,
                        const std::string& path);

std::string format_double(double v);  // %.17g serialisation used everywhere

// Stable FNV-1a digest of the fully-resolved spec.
std::string config_digest(const SweepSpec& spec);

// Key-value config documents (lines of "key = value", '#' comments).
CycleConfig parse_cycle_config(std::istream& in);
CycleConfig parse_cycle_config_file(const std::string& path);
SweepSpec parse_sweep_spec_file(const std::string& path);

// Apply "field=value" overrides to a cycle config; unknown fields throw
// InvalidOverride.
void apply_override(CycleConfig& cfg, const std::string& key, const std::string& value);

// Named presets reproducing the standard experiments.
std::vector<std::string> preset_names();
SweepSpec make_preset(const std::string& name);

// Builds the preset, applies overrides, runs it, and writes <name>.csv plus
// <name>.json under out_dir.  Returns the record.
RunRecord run_preset(const std::string& name,
                     const std::vector<std::pair<std::string, std::string>>& overrides,
                     const std::string& out_dir);

}  // namespace spinotto
