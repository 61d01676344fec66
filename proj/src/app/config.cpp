#include "app/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace rivet::app {

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::ToyAm: return "toy-am";
    case Experiment::ToyEm: return "toy-em";
    case Experiment::ToyGlobal: return "toy-global";
    case Experiment::ToyViscous: return "toy-viscous";
    case Experiment::Snap: return "snap";
    case Experiment::Fem: return "fem";
  }
  return "?";
}

KeyValues read_ini(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open config file " + path);
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Config, fmt::format("{}: line {}: {}", path, e.line(), e.message()));
  }
  KeyValues kv;
  for (const auto& [section, child] : pt) {
    if (child.empty()) {
      kv[section] = child.data();  // key outside any section; rejected as unknown later
      continue;
    }
    for (const auto& [key, leaf] : child) kv[section + "." + key] = leaf.data();
  }
  return kv;
}

KeyValues preset_keys(const std::string& name) {
  if (name == "ct") {
    return {{"run.experiment", "fem"},   {"mesh.generator", "ct"},
            {"material.E", "100"},       {"material.nu", "0.3"},
            {"material.gc", "1"},        {"material.l", "0.05"},
            {"material.k", "1e-6"},      {"norm.kind", "lp"},
            {"norm.p", "4"},             {"em.rho", "0.01"},
            {"em.stag_tol", "1e-6"},     {"loading.set", "top"},
            {"loading.component", "y"},  {"loading.u_max", "0.3"},
            {"loading.fixed", "bottom"}, {"loading.fixed_x", "top"}};
  }
  if (name == "lshape") {
    return {{"run.experiment", "fem"},    {"mesh.generator", "lshape"},
            {"material.E", "25840"},      {"material.nu", "0.18"},
            {"material.gc", "0.65"},      {"material.l", "10"},
            {"material.k", "1e-6"},       {"norm.kind", "lp"},
            {"norm.p", "4"},              {"em.rho", "0.08658"},
            {"em.stag_tol", "1e-4"},      {"loading.set", "load"},
            {"loading.component", "y"},   {"loading.u_max", "0.8"},
            {"loading.fixed", "bottom"}};
  }
  throw Error(ErrorKind::Config, "unknown preset '" + name + "' (expected ct or lshape)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  bool has_section(const std::string& section) const {
    const std::string prefix = section + ".";
    auto it = kv_.lower_bound(prefix);
    return it != kv_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
  }

  void get(const std::string& key, double& out) {
    const std::string* v = take(key);
    if (!v) return;
    try {
      size_t pos = 0;
      const double d = std::stod(*v, &pos);
      if (trim(v->substr(pos)).empty() && std::isfinite(d)) {
        out = d;
        return;
      }
    } catch (const std::exception&) {
    }
    errors.push_back(fmt::format("{}: '{}' is not a finite number", key, *v));
  }

  void get(const std::string& key, int& out) {
    const std::string* v = take(key);
    if (!v) return;
    try {
      size_t pos = 0;
      const long n = std::stol(*v, &pos);
      if (trim(v->substr(pos)).empty()) {
        out = static_cast<int>(n);
        return;
      }
    } catch (const std::exception&) {
    }
    errors.push_back(fmt::format("{}: '{}' is not an integer", key, *v));
  }

  void get(const std::string& key, bool& out) {
    const std::string* v = take(key);
    if (!v) return;
    const std::string s = trim(*v);
    if (s == "true" || s == "yes" || s == "1") {
      out = true;
    } else if (s == "false" || s == "no" || s == "0") {
      out = false;
    } else {
      errors.push_back(fmt::format("{}: '{}' is not a boolean", key, *v));
    }
  }

  void get(const std::string& key, std::string& out) {
    if (const std::string* v = take(key)) out = trim(*v);
  }

  void check(bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  }

  void report_unknown() {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) errors.push_back(fmt::format("unknown key '{}'", k));
    }
  }

  std::vector<std::string> errors;

 private:
  const std::string* take(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  const KeyValues& kv_;
  std::set<std::string> used_;
};

int parse_component(Reader& r, const std::string& key, const std::string& v) {
  if (v == "x" || v == "0") return 0;
  if (v == "y" || v == "1") return 1;
  r.errors.push_back(fmt::format("{}: '{}' must be x or y", key, v));
  return 1;
}

// Validation that throws InvalidArgument is folded into the error list.
template <class F>
void collect(Reader& r, const std::string& what, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    const std::string msg = e.what();
    r.errors.push_back(msg.rfind(what, 0) == 0 ? msg : what + ": " + msg);
  }
}

}  // namespace

RunConfig parse_config(const KeyValues& input) {
  KeyValues kv = input;
  std::vector<std::string> pre_errors;
  if (auto it = input.find("run.preset"); it != input.end()) {
    try {
      for (const auto& [k, v] : preset_keys(trim(it->second))) kv.emplace(k, v);
    } catch (const Error& e) {
      pre_errors.push_back(e.what());
    }
  }

  Reader r(kv);
  r.errors = pre_errors;
  RunConfig c;
  r.get("run.preset", c.preset);

  std::string exp = "toy-em";
  r.get("run.experiment", exp);
  const std::map<std::string, Experiment> names = {
      {"toy-am", Experiment::ToyAm},         {"toy-em", Experiment::ToyEm},
      {"toy-global", Experiment::ToyGlobal}, {"toy-viscous", Experiment::ToyViscous},
      {"snap", Experiment::Snap},            {"fem", Experiment::Fem}};
  if (auto it = names.find(exp); it != names.end()) {
    c.experiment = it->second;
  } else {
    r.errors.push_back(fmt::format("run.experiment: unknown experiment '{}'", exp));
  }
  r.get("run.output_dir", c.output_dir);
  r.check(!c.output_dir.empty(), "run.output_dir must not be empty");

  const bool toy = c.experiment == Experiment::ToyAm || c.experiment == Experiment::ToyEm ||
                   c.experiment == Experiment::ToyGlobal ||
                   c.experiment == Experiment::ToyViscous;
  const bool is_fem = c.experiment == Experiment::Fem;
  if (toy) {
    c.em.rho = 0.001;
    c.em.t_end = 1.4;
  } else if (c.experiment == Experiment::Snap) {
    c.em.rho = 0.01;
    c.em.t_end = 1.6;
  }

  // em
  r.get("em.rho", c.em.rho);
  const bool t_end_given = r.has("em.t_end");
  r.get("em.t_end", c.em.t_end);
  if (is_fem && !t_end_given) c.em.t_end = 100.0 * c.em.rho;
  r.get("em.stag_tol", c.em.stag_tol);
  r.get("em.max_am_iters", c.em.max_am_iters);
  r.get("em.max_steps", c.em.max_steps);
  r.get("em.snapshot_every", c.em.snapshot_every);
  r.get("em.snapshot_zero_dt", c.em.snapshot_zero_dt);
  collect(r, "em", [&] { c.em.validate(); });

  // toy
  r.get("toy.z0", c.toy.z0);
  r.get("toy.dt", c.toy.dt);
  r.get("toy.n_am", c.toy.n_am);
  r.get("toy.epsilon", c.toy.epsilon);
  r.get("toy.load", c.toy.load);
  r.get("toy.reduced_energy_t", c.toy.reduced_energy_t);
  r.get("toy.stable_set", c.toy.stable_set);
  r.get("toy.stable_nt", c.toy.stable_nt);
  r.get("toy.stable_nz", c.toy.stable_nz);
  r.check(c.toy.dt > 0.0, "toy.dt must be positive");
  r.check(c.toy.n_am >= 1, "toy.n_am must be >= 1");
  r.check(c.toy.epsilon > 0.0, "toy.epsilon must be positive");
  r.check(c.toy.stable_nt >= 2 && c.toy.stable_nz >= 2, "toy.stable_nt and toy.stable_nz must be >= 2");

  // snap
  r.get("snap.variant", c.snap.variant);
  r.get("snap.dt", c.snap.dt);
  r.get("snap.f0", c.snap.f0);
  r.get("snap.rate", c.snap.rate);
  c.snap.u0_given = r.has("snap.u0");
  r.get("snap.u0", c.snap.u0);
  r.check(c.snap.variant == "em" || c.snap.variant == "local" || c.snap.variant == "global",
          fmt::format("snap.variant: '{}' must be em, local or global", c.snap.variant));
  r.check(c.snap.dt > 0.0, "snap.dt must be positive");

  // fem
  FemSettings& f = c.fem;
  if (is_fem) {
    for (const char* s : {"material", "loading"}) {
      if (!r.has_section(s)) r.errors.push_back(fmt::format("missing section [{}] for fem", s));
    }
    if (!r.has("mesh.file") && !r.has("mesh.generator")) {
      r.errors.push_back("missing section [mesh]: set mesh.file or mesh.generator");
    }
  }
  r.get("mesh.file", f.mesh_file);
  r.get("mesh.generator", f.generator);
  if (!f.mesh_file.empty() && !std::filesystem::is_regular_file(f.mesh_file)) {
    r.errors.push_back(fmt::format("mesh.file: no such file '{}'", f.mesh_file));
  }
  if (!f.generator.empty()) {
    r.check(f.generator == "ct" || f.generator == "lshape",
            fmt::format("mesh.generator: '{}' must be ct or lshape", f.generator));
  }
  r.get("material.E", f.material.E);
  r.get("material.nu", f.material.nu);
  r.get("material.gc", f.material.gc);
  r.get("material.l", f.material.l);
  r.get("material.k", f.material.k);
  collect(r, "material", [&] { f.material.validate(); });

  std::string kind = "lp";
  r.get("norm.kind", kind);
  int p = 4;
  r.get("norm.p", p);
  if (kind == "lp") {
    f.norm = norms::NormSpec::lp(p);
  } else if (kind == "h1") {
    f.norm = norms::NormSpec::h1();
  } else {
    r.errors.push_back(fmt::format("norm.kind: '{}' must be lp or h1", kind));
  }
  r.get("norm.s_floor", f.norm.s_floor);
  collect(r, "norm", [&] { f.norm.validate(); });

  if (c.em.rho > 0.0) f.auglag.kkt_tol_feas_global = 1e-10 * c.em.rho;
  r.get("auglag.alpha1_init", f.auglag.alpha1_init);
  r.get("auglag.alpha2_init", f.auglag.alpha2_init);
  r.get("auglag.growth", f.auglag.growth);
  r.get("auglag.sufficient_decrease", f.auglag.sufficient_decrease);
  r.get("auglag.alpha_max", f.auglag.alpha_max);
  r.get("auglag.kkt_tol_feas_nodal", f.auglag.kkt_tol_feas_nodal);
  r.get("auglag.kkt_tol_feas_global", f.auglag.kkt_tol_feas_global);
  r.get("auglag.kkt_tol_comp", f.auglag.kkt_tol_comp);
  r.get("auglag.max_outer", f.auglag.max_outer);
  collect(r, "auglag", [&] { f.auglag.validate(); });

  r.get("newton.max_iters_u", f.newton_max_iters_u);
  r.get("newton.max_iters_z", f.newton_max_iters_z);
  if (f.newton_max_iters_u < 1 || f.newton_max_iters_z < 1)
    r.errors.push_back("newton: max_iters_u and max_iters_z must be at least 1");

  std::string set, comp = "y", fixed, fixed_x, fixed_y, traction_set;
  double u_max = 0.0, t_ref = c.em.t_end;
  Eigen::Vector2d traction = Eigen::Vector2d::Zero();
  r.get("loading.set", set);
  r.get("loading.component", comp);
  const bool u_max_given = r.has("loading.u_max");
  r.get("loading.u_max", u_max);
  r.get("loading.t_ref", t_ref);
  r.get("loading.fixed", fixed);
  r.get("loading.fixed_x", fixed_x);
  r.get("loading.fixed_y", fixed_y);
  r.get("loading.traction_set", traction_set);
  r.get("loading.traction_x", traction[0]);
  r.get("loading.traction_y", traction[1]);
  r.get("loading.reaction_set", f.reaction_set);
  if (is_fem) {
    r.check(!set.empty(), "loading.set is required for fem");
    r.check(u_max_given, "loading.u_max is required for fem");
    r.check(!r.has("loading.t_ref") || t_ref > 0.0, "loading.t_ref must be positive");
  }
  f.reaction_component = parse_component(r, "loading.component", comp);
  if (!set.empty()) {
    f.loading.dirichlet.push_back(
        {set, f.reaction_component, fem::Amplitude::linear(u_max, t_ref > 0.0 ? t_ref : 1.0)});
    if (f.reaction_set.empty()) f.reaction_set = set;
  }
  for (const auto& s : split_list(fixed)) {
    f.loading.dirichlet.push_back({s, 0, fem::Amplitude::constant(0.0)});
    f.loading.dirichlet.push_back({s, 1, fem::Amplitude::constant(0.0)});
  }
  for (const auto& s : split_list(fixed_x)) f.loading.dirichlet.push_back({s, 0, fem::Amplitude::constant(0.0)});
  for (const auto& s : split_list(fixed_y)) f.loading.dirichlet.push_back({s, 1, fem::Amplitude::constant(0.0)});
  if (!traction_set.empty()) f.loading.neumann.push_back({traction_set, traction, fem::Amplitude::constant(1.0)});

  r.report_unknown();
  if (!r.errors.empty()) {
    std::string msg = fmt::format("{} configuration error(s):", r.errors.size());
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw Error(ErrorKind::Config, msg);
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) { return parse_config(read_ini(path)); }

}  // namespace rivet::app
