#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dg/config.hpp"
#include "dg/runner.hpp"

namespace {

int log_level() {
  const char* env = std::getenv("DG_LOG");
  return env ? std::atoi(env) : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw dg::config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Overrides {
  int n = -1, m = -1, l = -1, threads = -1;
  double t_end = -1.0, dt = -1.0, cfl = -1.0;
  long long seed = -1;
  std::string form, strategy, flux, mesh, system, initial, out;

  void apply(dg::RunConfig& cfg) const {
    if (n > 0) cfg.n = n;
    if (m > 0) cfg.m = m;
    if (l > 0) cfg.l = l;
    // keep the surface order consistent when only N or M were overridden
    if (l <= 0 && (n > 0 || m > 0) && cfg.l != cfg.n && cfg.l != cfg.m)
      cfg.l = cfg.m > cfg.n ? cfg.m : cfg.n;
    if (threads > 0) cfg.threads = threads;
    if (t_end >= 0.0) cfg.t_end = t_end;
    if (dt > 0.0) {
      cfg.dt = dt;
      cfg.cfl = 0.0;
    }
    if (cfl > 0.0) {
      cfg.cfl = cfl;
      cfg.dt = 0.0;
    }
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    if (!form.empty()) cfg.form = form;
    if (!strategy.empty()) cfg.strategy = strategy;
    if (!flux.empty()) cfg.flux = flux;
    if (!mesh.empty()) {
      cfg.mesh_name = mesh;
      cfg.mesh_file.clear();
      cfg.mesh_params.clear();
    }
    if (!system.empty()) {
      cfg.system_name = system;
      cfg.system_params.clear();
    }
    if (!initial.empty()) {
      cfg.initial_name = initial;
      cfg.initial_params.clear();
    }
    if (!out.empty()) cfg.out_dir = out;
  }
};

void add_override_flags(CLI::App* cmd, Overrides& ov, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file (flags override its values)");
  cmd->add_option("--out", ov.out, "Output directory");
  cmd->add_option("--threads", ov.threads, "Element-parallel worker count (1 = reference mode)");
  cmd->add_option("-N", ov.n, "Solution order");
  cmd->add_option("-M", ov.m, "Volume quadrature order");
  cmd->add_option("-L", ov.l, "Surface quadrature order (N or M)");
  cmd->add_option("--form", ov.form, "W, S1, or S2");
  cmd->add_option("--strategy", ov.strategy, "PN, P2N, or P3N");
  cmd->add_option("--flux", ov.flux, "upwind or central");
  cmd->add_option("--mesh", ov.mesh, "Built-in mesh name");
  cmd->add_option("--system", ov.system, "Built-in system name");
  cmd->add_option("--initial", ov.initial, "Initial condition name");
  cmd->add_option("-T", ov.t_end, "Final time");
  cmd->add_option("--dt", ov.dt, "Fixed time step");
  cmd->add_option("--cfl", ov.cfl, "CFL number (derives dt at startup)");
  cmd->add_option("--seed", ov.seed, "Random seed");
}

int run_kind(const std::string& kind, const std::string& config_path, const Overrides& ov) {
  dg::RunConfig cfg;
  if (!config_path.empty()) {
    cfg = dg::parse_config(read_file(config_path));
    if (cfg.kind != kind)
      throw dg::config_error("config kind '" + cfg.kind + "' does not match subcommand '" +
                             kind + "'");
  } else {
    dg::ordered_json j;
    j["kind"] = kind;
    cfg = dg::config_from_json(j);
  }
  cfg.kind = kind;
  ov.apply(cfg);
  // re-validate after overrides
  cfg = dg::config_from_json(dg::config_to_json(cfg));

  const dg::RunResult res = dg::run(cfg);
  if (log_level() >= 1) {
    std::printf("%s: %s -> %s\n", kind.c_str(), res.summary.value("status", "?").c_str(),
                cfg.out_dir.c_str());
    if (res.summary.contains("verdicts"))
      for (const auto& v : res.summary.at("verdicts"))
        std::printf("  %-14s %-8s max dE/dt / E = % .3e\n",
                    v.at("scheme").get<std::string>().c_str(),
                    v.at("verdict").get<std::string>().c_str(),
                    v.at("max_dEdt_over_E").get<double>());
    if (res.summary.contains("verdict"))
      std::printf("  verdict: %s (max dE/dt / E = % .3e)\n",
                  res.summary.at("verdict").get<std::string>().c_str(),
                  res.summary.at("max_dEdt_over_E").get<double>());
    if (res.summary.contains("checks"))
      for (const auto& c : res.summary.at("checks"))
        std::printf("  %-36s %s (measured %.3e, threshold %.1e)\n",
                    c.at("name").get<std::string>().c_str(),
                    c.at("pass").get<bool>() ? "pass" : "FAIL",
                    c.at("measured").get<double>(), c.at("threshold").get<double>());
  }
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DGSEM overintegration laboratory"};
  app.require_subcommand(1);

  struct Sub {
    const char* cli;
    const char* kind;
    const char* help;
  };
  const Sub subs[] = {
      {"simulate", "simulate", "Run one scheme and record its energy trace"},
      {"compare", "compare-schemes", "Run all scheme variants from identical initial data"},
      {"edge-study", "edge-study", "Reproduce the interface dissipation/aliasing table"},
      {"verify", "verify-operators", "Run the operator verification battery"},
  };

  std::array<Overrides, 4> ovs;
  std::array<std::string, 4> config_paths;
  std::array<CLI::App*, 4> cmds{};
  for (size_t i = 0; i < 4; ++i) {
    cmds[i] = app.add_subcommand(subs[i].cli, subs[i].help);
    add_override_flags(cmds[i], ovs[i], config_paths[i]);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (size_t i = 0; i < 4; ++i)
      if (cmds[i]->parsed()) return run_kind(subs[i].kind, config_paths[i], ovs[i]);
  } catch (const dg::config_error& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 1;
  } catch (const dg::numerical_error& err) {
    std::fprintf(stderr, "numerical abort: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 1;
}
