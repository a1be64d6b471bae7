// isoflow: run scenarios, refinement sweeps and verification suites.
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "isoflow.hpp"

namespace fs = std::filesystem;
using namespace isoflow;

namespace {

enum Exit { ok = 0, config_error = 2, numerical_abort = 3, verification_failure = 4 };

// A path to a .cfg file, or the name of a built-in scenario.
Scenario load(const std::string& ref) {
  if (fs::exists(ref)) return parse_scenario(ref);
  if (find_registered(ref)) return registered_scenario(ref);
  throw ConfigError("no scenario file or built-in scenario named '" + ref + "'");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (suffix.empty()) return path;
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

void emit(const RunResult& res, const std::string& csv_path) {
  for (const auto& mem : res.members) {
    if (csv_path.empty()) {
      write_csv(std::cout, res, mem);
      continue;
    }
    const std::string path = with_suffix(csv_path, member_suffix(res, mem));
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(out, res, mem);
  }
}

int cmd_run(const std::string& ref, std::string csv, std::string snaps) {
  const Scenario sc = load(ref);
  if (csv.empty()) csv = sc.outputs.csv;
  if (snaps.empty()) snaps = sc.outputs.snapshot_dir;
  const RunResult res = run(sc);
  emit(res, csv);
  if (!snaps.empty()) write_snapshots(snaps, res);
  return ok;
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ISOFLOW_THREADS")) {
    const int cap = std::atoi(env);
    if (cap < 1) throw ConfigError("ISOFLOW_THREADS must be a positive integer");
    n = std::min(n, unsigned(cap));
  }
  return unsigned(std::min<std::size_t>(n, jobs));
}

int cmd_sweep(const std::string& ref, const std::string& param, std::string out_dir) {
  const Scenario base = load(ref);
  const auto eq = param.find('=');
  if (eq == std::string::npos) throw ConfigError("--param expects key=v1,v2,...");
  const std::string key = param.substr(0, eq);
  std::vector<std::string> values;
  std::stringstream list(param.substr(eq + 1));
  for (std::string v; std::getline(list, v, ',');)
    if (!v.empty()) values.push_back(v);
  if (values.empty()) throw ConfigError("--param has no values");
  if (out_dir.empty()) out_dir = "sweep-" + base.name;

  std::vector<Scenario> variants;
  for (const auto& v : values) {
    Scenario sc = with_parameter(base, key, v);
    build_setup(sc);
    variants.push_back(std::move(sc));
  }

  std::vector<std::string> summary(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < variants.size();) {
      try {
        const RunResult res = run(variants[i]);
        const std::string dir = out_dir + "/" + key + "=" + values[i];
        emit(res, dir + "/" + variants[i].name + ".csv");
        const auto& d = res.members.back().trajectory.diagnostics.back();
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s=%s t=%.6g mass=%.17g lyapunov_F=%.17g u_at_origin=%.17g", key.c_str(),
                      values[i].c_str(), d.t, d.mass, d.lyapunov_F, d.u_at_origin);
        summary[i] = buf;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < worker_count(variants.size()); ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& s : summary) std::cout << s << "\n";
  return ok;
}

// Residuals of the two Lyapunov identities as dt and the snapshot spacing are halved together.
int cmd_verify_lyapunov(const std::string& ref, int levels) {
  const Scenario sc = load(ref);
  if (!sc.solver.approx_n.empty()) throw ConfigError("verify lyapunov: approximation scenarios are not supported");
  std::cout << "level,dt,delta,derivative_residual,energy_residual,monotonicity_violation,budget_ratio\n";
  bool pass = true;
  double prev_der = INFINITY, prev_int = INFINITY;
  for (int level = 0; level < levels; ++level) {
    Scenario s = sc;
    s.solver.dt = sc.solver.dt / double(1 << level);
    const Setup st = build_setup(s);
    const Integrator integ(st.grid, st.medium, st.stencil, st.solver.boundary, st.solver.scheme, st.solver.dt);
    const Trajectory tr = simulate(st.u0, integ, st.solver.t_end, st.solver.snapshot_every);
    const auto rep = lyapunov_identity_check(tr, integ.rho(), st.stencil, integ.op().mask());
    const auto bud = dissipation_budget(tr, integ.rho(), st.stencil, integ.op().mask());
    std::printf("%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", level, s.solver.dt, s.solver.dt * s.solver.snapshot_every,
                rep.derivative_residual, rep.energy_residual, rep.monotonicity_violation, bud.max_ratio);
    pass = pass && rep.monotonicity_violation <= 1e-12 && rep.derivative_residual < prev_der &&
           rep.energy_residual < prev_int;
    prev_der = rep.derivative_residual;
    prev_int = rep.energy_residual;
  }
  std::cout << verify::format_check({"lyapunov.refinement", pass, prev_der}) << "\n";
  return pass ? ok : verification_failure;
}

int cmd_verify(const std::string& suite) {
  std::vector<std::string> names;
  if (suite == "all")
    names = verify::suite_names();
  else
    names = {suite};
  bool pass = true;
  for (const auto& n : names)
    for (const auto& c : verify::run_suite(n)) {
      std::cout << verify::format_check(c) << "\n" << std::flush;
      pass = pass && c.passed;
    }
  return pass ? ok : verification_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isoflow: nonlocal heat equation simulator"};
  app.require_subcommand(1);

  std::string ref, csv, snaps, param, out_dir, suite, cfg;
  int levels = 3;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario file or built-in scenario");
  run_cmd->add_option("scenario", ref, "scenario .cfg path or built-in name")->required();
  run_cmd->add_option("--csv", csv, "CSV output path (default: [outputs] csv, else stdout)");
  run_cmd->add_option("--snapshots", snaps, "directory for binary snapshots");

  auto* list_cmd = app.add_subcommand("list", "List built-in scenarios");

  auto* show_cmd = app.add_subcommand("show", "Print the canonical form of a scenario");
  show_cmd->add_option("scenario", ref)->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Run one scenario over a list of parameter values");
  sweep_cmd->add_option("scenario", ref)->required();
  sweep_cmd->add_option("--param", param, "key=v1,v2,... (key is section.key or a solver key)")->required();
  sweep_cmd->add_option("--out", out_dir, "output directory (default: sweep-<name>)");

  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  verify_cmd->add_option("suite", suite, "suite name, 'all', or 'lyapunov'")->required();
  verify_cmd->add_option("scenario", cfg, "scenario for 'verify lyapunov'");
  verify_cmd->add_option("--levels", levels, "refinement levels for 'verify lyapunov'")->check(CLI::Range(2, 8));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*run_cmd) return cmd_run(ref, csv, snaps);
    if (*list_cmd) {
      for (const auto& e : registry()) std::cout << e.name << "\n";
      return ok;
    }
    if (*show_cmd) {
      const Scenario sc = load(ref);
      std::cout << "# config hash " << config_hash_hex(sc) << "\n" << emit_scenario(sc);
      return ok;
    }
    if (*sweep_cmd) return cmd_sweep(ref, param, out_dir);
    if (*verify_cmd) {
      if (suite == "lyapunov" && !cfg.empty()) return cmd_verify_lyapunov(cfg, levels);
      if (!cfg.empty()) throw ConfigError("only 'verify lyapunov' takes a scenario");
      return cmd_verify(suite);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return numerical_abort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return ok;
}
