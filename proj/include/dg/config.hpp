#ifndef DG_CONFIG_HPP
#define DG_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "dg/linalg.hpp"
#include "dg/meshes.hpp"
#include "dg/solver.hpp"
#include "dg/system.hpp"

namespace dg {

using ordered_json = nlohmann::ordered_json;

struct EdgeStudyConfig {
  int q = 18;
  double alpha = 1e-3;
  double beta = 1.0;
  double gamma = -1.0;
  int n_min = 3;
  int n_max = 13;
};

// Fully resolved experiment description. parse_config fills documented
// defaults; serialize writes the resolved form, which round-trips identically.
struct RunConfig {
  std::string kind = "simulate";
  std::string mesh_name = "periodic-2x2";
  std::string mesh_file;  // when set, overrides mesh_name
  std::map<std::string, double> mesh_params;
  std::string system_name = "rotation";
  std::map<std::string, double> system_params;
  int n = 4;
  int m = 4;
  int l = 4;
  std::string form = "W";
  std::string strategy = "P2N";
  std::string flux = "upwind";
  bool divfree = false;
  std::string s1_surface_product = "M";
  double t_end = 1.0;
  double dt = 0.0;  // 0 means: derive from cfl at startup
  double cfl = 0.5;
  std::string initial_name = "smooth-random";
  std::map<std::string, double> initial_params;
  std::map<std::string, std::string> boundary;  // tag -> "zero"
  uint64_t seed = 0;
  std::string out_dir = "out";
  int threads = 1;
  EdgeStudyConfig edge;

  SchemeConfig scheme() const {
    SchemeConfig cfg;
    cfg.n = n;
    cfg.m = m;
    cfg.l = l;
    cfg.strategy = parse_strategy(strategy);
    cfg.form = parse_form(form);
    cfg.flux = flux == "central" ? FluxType::central : FluxType::upwind;
    cfg.divfree = divfree;
    cfg.s1_product = s1_surface_product == "L" ? S1ProductGrid::L : S1ProductGrid::M;
    return cfg;
  }
};

namespace detail {

inline std::map<std::string, double> param_map(const ordered_json& j, const std::string& where,
                                               const std::set<std::string>& skip = {}) {
  std::map<std::string, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (skip.count(it.key())) continue;
    require(it.value().is_number(), where + " parameter '" + it.key() + "' must be a number");
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

inline void check_keys(const ordered_json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw config_error("unknown key in " + where + ": '" + it.key() + "'");
}

}  // namespace detail

inline RunConfig config_from_json(const ordered_json& j) {
  detail::check_keys(j, {"kind", "mesh", "system", "N", "M", "L", "form", "strategy", "flux",
                         "divfree", "s1_surface_product", "T", "dt", "cfl", "initial", "boundary",
                         "seed", "out", "threads", "edge_study"},
                     "config");
  RunConfig cfg;
  if (j.contains("kind")) cfg.kind = j.at("kind").get<std::string>();
  static const std::set<std::string> kinds = {"simulate", "compare-schemes", "edge-study",
                                              "verify-operators"};
  require(kinds.count(cfg.kind) == 1,
          "kind must be one of simulate|compare-schemes|edge-study|verify-operators");

  if (j.contains("mesh")) {
    const ordered_json& m = j.at("mesh");
    if (m.is_string()) {
      cfg.mesh_name = m.get<std::string>();
    } else {
      detail::check_keys(m, {"name", "file", "kappa", "ngeo", "amplitude"}, "mesh");
      if (m.contains("file")) cfg.mesh_file = m.at("file").get<std::string>();
      if (m.contains("name")) cfg.mesh_name = m.at("name").get<std::string>();
      require(!(m.contains("file") && m.contains("name")),
              "mesh takes either a built-in name or a file, not both");
      cfg.mesh_params = detail::param_map(m, "mesh", {"name", "file"});
    }
  }
  if (j.contains("system")) {
    const ordered_json& s = j.at("system");
    if (s.is_string()) {
      cfg.system_name = s.get<std::string>();
    } else {
      require(s.contains("name"), "system needs a name");
      cfg.system_name = s.at("name").get<std::string>();
      cfg.system_params = detail::param_map(s, "system", {"name"});
    }
  }
  if (j.contains("N")) cfg.n = j.at("N").get<int>();
  cfg.m = j.contains("M") ? j.at("M").get<int>() : cfg.n;
  cfg.l = j.contains("L") ? j.at("L").get<int>() : (cfg.m > cfg.n ? cfg.m : cfg.n);
  if (j.contains("form")) cfg.form = j.at("form").get<std::string>();
  if (j.contains("strategy")) cfg.strategy = j.at("strategy").get<std::string>();
  if (j.contains("flux")) cfg.flux = j.at("flux").get<std::string>();
  require(cfg.flux == "upwind" || cfg.flux == "central", "flux must be upwind or central");
  if (j.contains("s1_surface_product"))
    cfg.s1_surface_product = j.at("s1_surface_product").get<std::string>();
  require(cfg.s1_surface_product == "M" || cfg.s1_surface_product == "L",
          "s1_surface_product must be M or L");
  if (j.contains("T")) cfg.t_end = j.at("T").get<double>();
  require(cfg.t_end >= 0.0, "T must be >= 0");
  require(!(j.contains("dt") && j.contains("cfl")), "dt and cfl are mutually exclusive");
  if (j.contains("dt")) {
    cfg.dt = j.at("dt").get<double>();
    require(cfg.dt > 0.0, "dt must be positive");
    cfg.cfl = 0.0;
  } else if (j.contains("cfl")) {
    cfg.cfl = j.at("cfl").get<double>();
    require(cfg.cfl > 0.0, "cfl must be positive");
  }
  if (j.contains("initial")) {
    const ordered_json& ic = j.at("initial");
    if (ic.is_string()) {
      cfg.initial_name = ic.get<std::string>();
    } else {
      require(ic.contains("name"), "initial needs a name");
      cfg.initial_name = ic.at("name").get<std::string>();
      cfg.initial_params = detail::param_map(ic, "initial", {"name"});
    }
  }
  if (j.contains("boundary")) {
    for (auto it = j.at("boundary").begin(); it != j.at("boundary").end(); ++it) {
      const std::string kindstr = it.value().get<std::string>();
      require(kindstr == "zero", "boundary condition must be 'zero' (periodic pairs live in the mesh)");
      cfg.boundary[it.key()] = kindstr;
    }
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  require(cfg.threads >= 1, "threads must be >= 1");
  if (j.contains("edge_study")) {
    const ordered_json& e = j.at("edge_study");
    detail::check_keys(e, {"q", "alpha", "beta", "gamma", "Nmin", "Nmax"}, "edge_study");
    if (e.contains("q")) cfg.edge.q = e.at("q").get<int>();
    if (e.contains("alpha")) cfg.edge.alpha = e.at("alpha").get<double>();
    if (e.contains("beta")) cfg.edge.beta = e.at("beta").get<double>();
    if (e.contains("gamma")) cfg.edge.gamma = e.at("gamma").get<double>();
    if (e.contains("Nmin")) cfg.edge.n_min = e.at("Nmin").get<int>();
    if (e.contains("Nmax")) cfg.edge.n_max = e.at("Nmax").get<int>();
    require(cfg.edge.q % 3 == 0, "q must be divisible by 3");
    require(cfg.edge.n_min >= 1 && cfg.edge.n_max >= cfg.edge.n_min,
            "edge study needs 1 <= Nmin <= Nmax");
  }

  // default the divergence-free construction to the system's capability
  const CoefficientField probe = make_system(cfg.system_name, cfg.system_params);
  cfg.divfree = j.contains("divfree") ? j.at("divfree").get<bool>()
                                      : (probe.has_stream && probe.p == 1);
  if (cfg.divfree)
    require(probe.has_stream && probe.p == 1,
            "divfree construction needs a scalar system with a stream function");

  if (cfg.kind == "simulate" || cfg.kind == "compare-schemes") cfg.scheme().validate();
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    // derive line/column from the byte offset for a usable message
    size_t line = 1, col = 1;
    for (size_t i = 0; i < std::min(text.size(), err.byte); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw config_error("config syntax error at line " + std::to_string(line) + ", column " +
                       std::to_string(col) + ": " + err.what());
  }
  require(j.is_object(), "config must be a JSON object");
  return config_from_json(j);
}

inline ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["kind"] = cfg.kind;
  ordered_json mesh;
  if (!cfg.mesh_file.empty())
    mesh["file"] = cfg.mesh_file;
  else
    mesh["name"] = cfg.mesh_name;
  for (const auto& [k, v] : cfg.mesh_params) mesh[k] = v;
  j["mesh"] = mesh;
  ordered_json sys;
  sys["name"] = cfg.system_name;
  for (const auto& [k, v] : cfg.system_params) sys[k] = v;
  j["system"] = sys;
  j["N"] = cfg.n;
  j["M"] = cfg.m;
  j["L"] = cfg.l;
  j["form"] = cfg.form;
  j["strategy"] = cfg.strategy;
  j["flux"] = cfg.flux;
  j["divfree"] = cfg.divfree;
  j["s1_surface_product"] = cfg.s1_surface_product;
  j["T"] = cfg.t_end;
  if (cfg.dt > 0.0)
    j["dt"] = cfg.dt;
  else
    j["cfl"] = cfg.cfl;
  ordered_json ic;
  ic["name"] = cfg.initial_name;
  for (const auto& [k, v] : cfg.initial_params) ic[k] = v;
  j["initial"] = ic;
  if (!cfg.boundary.empty()) {
    ordered_json b;
    for (const auto& [k, v] : cfg.boundary) b[k] = v;
    j["boundary"] = b;
  }
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  if (cfg.kind == "edge-study") {
    ordered_json e;
    e["q"] = cfg.edge.q;
    e["alpha"] = cfg.edge.alpha;
    e["beta"] = cfg.edge.beta;
    e["gamma"] = cfg.edge.gamma;
    e["Nmin"] = cfg.edge.n_min;
    e["Nmax"] = cfg.edge.n_max;
    j["edge_study"] = e;
  }
  return j;
}

inline std::string serialize_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2); }

inline MeshSpec mesh_spec_from_config(const RunConfig& cfg) {
  if (!cfg.mesh_file.empty()) return parse_mesh_file(cfg.mesh_file);
  return builtin_mesh_spec(cfg.mesh_name, cfg.mesh_params);
}

}  // namespace dg

#endif  // DG_CONFIG_HPP
