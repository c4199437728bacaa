// Batch driver for the two-spin Otto cycle library.
//
//   spin_otto preset <name> [--set k=v ...] [--outdir DIR]
//   spin_otto sweep <spec-file> [--out out.csv]
//   spin_otto cycle <config-file>        (prints the cycle result as JSON)
//   spin_otto validate                   (runs the invariant suite)

#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinotto/sweep.hpp"

namespace {

using namespace spinotto;

nlohmann::json as_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

int cmd_cycle(const std::string& config_path) {
  const CycleConfig cfg = parse_cycle_config_file(config_path);
  const CycleResult r = run_cycle_numeric(cfg);
  nlohmann::json j;
  j["E_A"] = r.E_A;
  j["E_B"] = r.E_B;
  j["E_C"] = r.E_C;
  j["E_D"] = r.E_D;
  j["W1"] = r.W1;
  j["W2"] = r.W2;
  j["W"] = r.W;
  j["Q_H"] = r.Q_H;
  j["Q_L"] = r.Q_L;
  j["eta"] = as_json(r.eta);
  j["W_irr"] = as_json(r.W_irr);
  j["regime"] = regime_name(r.regime);
  j["cyclic"] = r.cyclic;
  j["closure_distance"] = r.closure_distance;
  std::cout << j.dump(2) << std::endl;
  return 0;
}

std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& item : raw) {
    const size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw InvalidOverride("override '" + item + "' is not of the form key=value");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

// Compact self-checks over the library's stated invariants; each prints one
// PASS/FAIL line.
int cmd_validate() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
    if (!ok) ++failures;
  };

  {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> fb(0.05, 6.0), fg(0.0, 1.0);
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
      const SpinParams p{fb(rng), 1.0, fg(rng)};
      const Spectrum s = spectrum(p);
      Mat4 rebuilt = Mat4::Zero();
      for (int j = 0; j < 4; ++j)
        rebuilt += s.energy(j) * (s.state(j) * s.state(j).adjoint());
      ok = (rebuilt - build_hamiltonian(p)).cwiseAbs().maxCoeff() < 1e-10;
      Eigen::SelfAdjointEigenSolver<Mat4> es(build_hamiltonian(p));
      Eigen::Vector4d expect(-2 * s.k, -2 * p.J, 2 * p.J, 2 * s.k);
      std::sort(expect.data(), expect.data() + 4);
      ok = ok && (es.eigenvalues() - expect).cwiseAbs().maxCoeff() < 1e-10;
    }
    check("spectrum round-trip and eigenvalue formula (100 random params)", ok);
  }
  {
    const SpinParams p{1.0, 1.0, 1.0};
    const GibbsState g = gibbs_state(build_hamiltonian(p), 1.0);
    const double z_closed = 2 * std::cosh(2 * p.k()) + 2 * std::cosh(2 * p.J);
    const bool ok = std::abs(g.rho.trace().real() - 1.0) < 1e-12 &&
                    std::abs(g.partition - z_closed) / z_closed < 1e-10;
    check("Gibbs normalisation and closed-form partition function", ok);
  }
  {
    const SpinParams p{1.0, 1.0, 1.0};
    const Propagator u = propagate_unitary(FieldProtocol::expansion(1, 4, 1), p);
    const Propagator u2 =
        propagate_unitary(FieldProtocol::expansion(1, 4, 1), p, 2 * u.steps);
    const bool ok = is_unitary(u.U, 1e-10) &&
                    (u.U - u2.U).cwiseAbs().maxCoeff() < 1e-8;
    check("propagator unitarity and step-doubling certificate", ok);
  }
  {
    bool ok = true;
    for (double g : {0.25, 0.5, 1.0})
      for (double tau : {0.3, 1.0, 5.0}) {
        const SpinParams p{1.0, 1.0, g};
        try {
          transition_probabilities(1.0, 4.0, tau, p);
        } catch (const SpinOttoError&) {
          ok = false;
        }
      }
    check("microreversibility equalities over a (gamma, tau) grid", ok);
  }
  {
    CycleConfig cfg;
    cfg.tau = 0.5;
    const CycleResult r = run_cycle_numeric(cfg);
    check("first-law closure for the complete-thermalization cycle",
          std::abs(r.W + r.Q_H + r.Q_L) < 1e-8);
  }
  {
    bool ok = true;
    for (double g : {0.0, 0.5, 1.0}) {
      CycleConfig cfg;
      cfg.gamma = g;
      const CycleResult num = run_cycle_numeric(cfg);
      const QuasistaticResult cl = quasistatic_closed_form(cfg);
      ok = ok && std::abs(num.W - cl.W) < 1e-8 && std::abs(num.eta - cl.eta) < 1e-8;
    }
    check("closed-form vs numeric quasistatic cycle", ok);
  }
  {
    SweepSpec spec = make_preset("quasistatic-eff");
    spec.axes[0].values = {0.0, 0.25, 0.5, 0.75, 1.0};
    const RunRecord r = run_sweep(spec);
    bool ok = true;
    for (const SweepRow& row : r.rows) {
      const double eta = std::get<double>(row.cells[2]);
      if (!std::isnan(eta)) ok = ok && eta <= 1.0 - 1.0 / 10.0 + 1e-10;
    }
    check("Carnot bound over the efficiency sweep", ok);
  }
  {
    SweepSpec spec = make_preset("local-workgap");
    spec.axes[0].values = {0.0, 0.5, 1.0};
    const RunRecord a = run_sweep(spec);
    const RunRecord b = run_sweep_serial(spec);
    bool ok = a.rows.size() == b.rows.size();
    for (size_t i = 0; ok && i < a.rows.size(); ++i)
      for (size_t c = 0; ok && c < a.rows[i].cells.size(); ++c)
        ok = std::get<double>(a.rows[i].cells[c]) == std::get<double>(b.rows[i].cells[c]);
    check("parallel sweep matches the serial reference bit-for-bit", ok);
  }

  std::printf("%s\n", failures == 0 ? "all invariants hold" : "invariant failures detected");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Otto cycle simulator for an anisotropic two-spin working medium"};
  app.require_subcommand(1);

  std::string preset_name, outdir = ".";
  std::vector<std::string> overrides;
  CLI::App* preset = app.add_subcommand("preset", "run a named experiment preset");
  preset->add_option("name", preset_name, "preset identifier")->required();
  preset->add_option("--set", overrides, "config overrides, key=value");
  preset->add_option("--outdir", outdir, "output directory");

  std::string spec_path, out_csv;
  CLI::App* sweep = app.add_subcommand("sweep", "run a sweep specification file");
  sweep->add_option("spec", spec_path, "sweep spec file")->required();
  sweep->add_option("--out", out_csv, "output CSV path (default <spec>.csv)");

  std::string cycle_path;
  CLI::App* cycle = app.add_subcommand("cycle", "run one cycle, print JSON result");
  cycle->add_option("config", cycle_path, "cycle config file")->required();

  app.add_subcommand("validate", "run the invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (preset->parsed()) {
      const RunRecord rec = run_preset(preset_name, split_overrides(overrides), outdir);
      std::printf("%s: %zu rows, hash %s, %.2fs (%d threads)\n", preset_name.c_str(),
                  rec.rows.size(), rec.config_hash.c_str(), rec.wall_time_s, rec.threads);
      return 0;
    }
    if (sweep->parsed()) {
      const SweepSpec spec = parse_sweep_spec_file(spec_path);
      const RunRecord rec = run_sweep(spec);
      const std::string csv = out_csv.empty() ? spec_path + ".csv" : out_csv;
      write_csv(rec, csv);
      write_sidecar_json(rec, spec, csv + ".json");
      std::printf("%zu rows -> %s, hash %s, %.2fs (%d threads)\n", rec.rows.size(),
                  csv.c_str(), rec.config_hash.c_str(), rec.wall_time_s, rec.threads);
      return 0;
    }
    if (cycle->parsed()) return cmd_cycle(cycle_path);
    return cmd_validate();
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
}
