#include "dbkit/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dbkit/report.hpp"
#include "dbkit/verifier.hpp"

namespace dbkit {

using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Binding {
  std::string name;
  Int p = 0, q = 1;
};

Binding parse_binding(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw Error("bad --param, expected NAME=RATIONAL: " + s);
  Binding b;
  b.name = s.substr(0, eq);
  std::string val = s.substr(eq + 1);
  auto slash = val.find('/');
  try {
    if (slash == std::string::npos) {
      b.p = std::stoll(val);
    } else {
      b.p = std::stoll(val.substr(0, slash));
      b.q = std::stoll(val.substr(slash + 1));
    }
  } catch (const std::exception&) {
    throw Error("bad rational in --param: " + s);
  }
  if (b.q == 0) throw Error("zero denominator in --param: " + s);
  return b;
}

struct LoadedModel {
  ModelIR model;
  GaugeSpec gauge;
};

LoadedModel load_model(const std::string& model_ref, const std::vector<std::string>& param_args) {
  LoadedModel lm;
  auto names = preset_names();
  if (std::find(names.begin(), names.end(), model_ref) != names.end()) {
    Preset p = preset_model(model_ref);
    lm.model = p.model;
    lm.gauge = p.gauge;
  } else {
    std::string stem = model_ref;
    auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    auto dot = stem.rfind('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    lm.model = parse_model(read_file(model_ref), stem);
  }
  for (auto& pa : param_args) {
    Binding b = parse_binding(pa);
    lm.model = lm.model.bind_parameter(b.name, b.p, b.q);
  }
  return lm;
}

std::vector<std::pair<std::string, std::string>> binding_pairs(
    const std::vector<std::string>& param_args) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& pa : param_args) {
    Binding b = parse_binding(pa);
    std::string v = std::to_string(b.p);
    if (b.q != 1) v += "/" + std::to_string(b.q);
    out.emplace_back(b.name, v);
  }
  return out;
}

int cmd_analyze(const std::string& model_arg, const std::string& gauge_file,
                const std::vector<std::string>& params, const std::string& format,
                std::ostream& out) {
  LoadedModel lm = load_model(model_arg, params);
  if (!gauge_file.empty()) lm.gauge = parse_gauge_file(read_file(gauge_file));
  AnalysisReport rep = analyze_model(lm.model, lm.gauge, binding_pairs(params));
  if (format == "json")
    out << report_json(rep).dump(1) << "\n";
  else
    out << report_text(rep);
  return 0;
}

ordered_json record_json(const CheckRecord& r) {
  return ordered_json{{"check", r.check},   {"model", r.model}, {"params", r.params},
                      {"value", r.value},   {"tolerance", r.tolerance},
                      {"pass", r.pass}};
}

int cmd_verify_ansatz(double a, double e, double k, double tol, std::ostream& out) {
  PlaneWaveConfig cfg;
  cfg.a = a;
  cfg.e = e;
  cfg.k = k;
  AnsatzReport rep = verify_ansatz(cfg, 48, 48, 6.0, 6.0, tol);
  ordered_json j;
  j["schema"] = 1;
  j["suite"] = "ansatz";
  j["m2"] = rep.m2;
  j["omega"] = rep.omega;
  ordered_json recs = ordered_json::array();
  for (auto& r : rep.records) recs.push_back(record_json(r));
  j["records"] = recs;
  j["pass"] = rep.pass;
  out << j.dump(1) << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_verify_oracle(const std::string& preset, const std::vector<std::string>& params, int n,
                      int seeds, double tol, std::ostream& out) {
  LoadedModel lm = load_model(preset, params);
  if (!lm.model.params.empty())
    throw Error("oracle suite needs numeric values for: " +
                [&] {
                  std::string s;
                  for (auto& p : lm.model.params) s += p + " ";
                  return s;
                }());
  AnalysisReport rep = analyze_model(lm.model, lm.gauge, binding_pairs(params));
  const ConstraintSet& cs = rep.cset;
  ordered_json j;
  j["schema"] = 1;
  j["suite"] = "oracle";
  j["model"] = preset;
  ordered_json recs = ordered_json::array();
  bool all = true;
  size_t S = cs.constraints.size();
  for (uint64_t seed = 1; seed <= static_cast<uint64_t>(seeds); ++seed)
    for (size_t a = 0; a < S; ++a)
      for (size_t b = 0; b < S; ++b) {
        OracleResult res = smeared_bracket_oracle(cs.constraints[a].density,
                                                  cs.constraints[b].density, {}, n, seed, tol);
        all = all && res.pass;
        CheckRecord r;
        r.check = "delta[" + cs.constraints[a].name + "," + cs.constraints[b].name + "] seed " +
                  std::to_string(seed);
        r.model = preset;
        r.value = res.error;
        r.tolerance = tol;
        r.pass = res.pass;
        recs.push_back(record_json(r));
      }
  j["records"] = recs;
  j["pass"] = all;
  out << j.dump(1) << "\n";
  return all ? 0 : 1;
}

int cmd_verify_lattice(const std::string& preset, const std::vector<std::string>& params, int n,
                       double dt, double t_end, double free_lambda, uint64_t seed,
                       std::ostream& out) {
  LoadedModel lm = load_model(preset, params);
  AnalysisReport rep = analyze_model(lm.model, lm.gauge, binding_pairs(params));
  const ConstraintSet& cs = rep.cset;
  double dx = 2 * 3.14159265358979323846 / n;
  LatticeState init = project_initial_state(cs, {}, n, dx, seed);
  int steps = static_cast<int>(t_end / dt + 0.5);
  EvolveReport er = evolve_lattice(cs, {}, init, dt, steps, free_lambda);

  ordered_json j;
  j["schema"] = 1;
  j["suite"] = "lattice";
  j["model"] = preset;
  j["n"] = n;
  j["dt"] = dt;
  j["steps"] = steps;
  j["cfl_warning"] = er.cfl_warning;
  ordered_json recs = ordered_json::array();
  bool all = true;
  auto push = [&](const std::string& name, double val, double tol) {
    CheckRecord r;
    r.check = name;
    r.model = preset;
    r.value = val;
    r.tolerance = tol;
    r.pass = val < tol;
    all = all && r.pass;
    recs.push_back(record_json(r));
  };
  push("max-constraint-drift", er.max_constraint_drift, 1e-6);
  push("relative-energy-drift", er.rel_energy_drift, 1e-8);
  if (er.has_current_check) push("current-divergence", er.max_current_div, 1e-3);
  j["records"] = recs;
  j["pass"] = all;
  out << j.dump(1) << "\n";
  return all ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirac-Bergmann constraint analysis of quadratic 1+1d field theories"};
  app.require_subcommand(1);

  std::string model_arg, gauge_file, format = "text";
  std::vector<std::string> params;
  auto* analyze = app.add_subcommand("analyze", "run the constraint analysis of a model");
  analyze->add_option("model", model_arg, "preset name or .lag file")->required();
  analyze->add_option("--gauge", gauge_file, "gauge-fixing density file");
  analyze->add_option("--param", params, "parameter binding NAME=RATIONAL");
  analyze->add_option("--format", format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* verify = app.add_subcommand("verify", "numerical verification suites");
  verify->require_subcommand(1);

  double va = 2.0, ve = 1.0, vk = 0.7, vtol = 1e-10;
  auto* ansatz = verify->add_subcommand("ansatz", "plane-wave solution checks");
  ansatz->add_option("--a", va, "regulator parameter (> 1)");
  ansatz->add_option("--e", ve, "coupling");
  ansatz->add_option("--k", vk, "wavenumber");
  ansatz->add_option("--tol", vtol, "relative residual tolerance");

  std::string opreset = "jr-a1";
  std::vector<std::string> oparams;
  int on = 512, oseeds = 3;
  double otol = 1e-6;
  auto* oracle = verify->add_subcommand("oracle", "smeared-bracket oracle for the delta matrix");
  oracle->add_option("--preset", opreset, "model preset")->required();
  oracle->add_option("--param", oparams, "parameter binding NAME=RATIONAL");
  oracle->add_option("--n", on, "grid size");
  oracle->add_option("--seeds", oseeds, "number of seeded test-function draws");
  oracle->add_option("--tol", otol, "relative tolerance");

  std::string lpreset = "jr-a1";
  std::vector<std::string> lparams;
  int ln = 256;
  double ldt = 1e-3, ltend = 10.0, lfree = 0.0;
  uint64_t lseed = 1;
  auto* lattice = verify->add_subcommand("lattice", "evolve the emitted Hamilton equations");
  lattice->add_option("--preset", lpreset, "model preset")->required();
  lattice->add_option("--param", lparams, "parameter binding NAME=RATIONAL");
  lattice->add_option("--n", ln, "grid size");
  lattice->add_option("--dt", ldt, "time step");
  lattice->add_option("--t-end", ltend, "final time");
  lattice->add_option("--free-multiplier", lfree, "value for undetermined multipliers");
  lattice->add_option("--seed", lseed, "initial data seed");

  std::vector<std::string> argv = args;
  std::vector<const char*> cargs;
  cargs.push_back("dbkit");
  for (auto& a : argv) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::ostringstream os;
      // help output
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*analyze) return cmd_analyze(model_arg, gauge_file, params, format, out);
    if (*ansatz) return cmd_verify_ansatz(va, ve, vk, vtol, out);
    if (*oracle) return cmd_verify_oracle(opreset, oparams, on, oseeds, otol, out);
    if (*lattice) return cmd_verify_lattice(lpreset, lparams, ln, ldt, ltend, lfree, lseed, out);
  } catch (const GaugeIncomplete& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SingularMatrix& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no command\n";
  return 1;
}

}  // namespace dbkit
