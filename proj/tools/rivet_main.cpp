#include <rivet/rivet.h>

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace {

struct Handle {
  rivet_config* c = nullptr;
  ~Handle() { rivet_config_free(c); }
};

int report(rivet_status s) {
  std::fprintf(stderr, "rivet: error (status %d): %s\n", static_cast<int>(s), rivet_last_error());
  return rivet_exit_code(s);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_with(Handle& h, const std::vector<std::pair<std::string, std::string>>& overrides) {
  for (const auto& [k, v] : overrides) {
    if (rivet_status s = rivet_config_set(h.c, k.c_str(), v.c_str()); s != RIVET_OK) return report(s);
  }
  int steps = 0;
  if (rivet_status s = rivet_run(h.c, &steps); s != RIVET_OK) return report(s);
  char out[4096];
  if (rivet_config_get(h.c, "run.output_dir", out, sizeof out) != RIVET_OK) std::snprintf(out, sizeof out, "out");
  std::printf("rivet: %d steps, outputs in %s\n", steps, out);
  return 0;
}

void add_double(std::vector<std::pair<std::string, std::string>>& ov, const char* key,
                const std::optional<double>& v) {
  if (v) ov.emplace_back(key, num(*v));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rivet: rate-independent evolutions with the time-adaptive E&M scheme"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rivet_version()));

  std::string config_path, out_override;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_override, "override run.output_dir");

  std::string preset_name, preset_out = "out", norm_kind;
  std::optional<double> preset_rho, preset_t_end;
  std::optional<int> preset_p, preset_max_steps;
  auto* preset = app.add_subcommand("preset", "run a built-in fracture benchmark");
  preset->add_option("name", preset_name, "ct or lshape")
      ->required()
      ->check(CLI::IsMember({"ct", "lshape"}));
  preset->add_option("--rho", preset_rho, "arc-length parameter");
  preset->add_option("--t-end", preset_t_end, "final time (default 100 rho)");
  preset->add_option("--norm", norm_kind, "lp or h1")->check(CLI::IsMember({"lp", "h1"}));
  preset->add_option("--p", preset_p, "exponent of the Lp norm");
  preset->add_option("--max-steps", preset_max_steps, "step cap");
  preset->add_option("--out", preset_out, "output directory");

  std::string toy_variant, toy_out = "out";
  std::optional<double> toy_rho, toy_dt, toy_z0, toy_t_end;
  auto* toy = app.add_subcommand("toy", "two-degree-of-freedom conceptual problem");
  toy->add_option("variant", toy_variant, "am, em, global or viscous")
      ->required()
      ->check(CLI::IsMember({"am", "em", "global", "viscous"}));
  toy->add_option("--rho", toy_rho, "arc-length parameter (em)");
  toy->add_option("--dt", toy_dt, "time step (am, global, viscous)");
  toy->add_option("--z0", toy_z0, "initial internal variable");
  toy->add_option("--t-end", toy_t_end, "final time");
  toy->add_option("--out", toy_out, "output directory");

  std::string snap_variant, snap_out = "out";
  std::optional<double> snap_rho, snap_dt, snap_t_end;
  auto* snap = app.add_subcommand("snap", "snap-through truss");
  snap->add_option("variant", snap_variant, "em, local or global")
      ->required()
      ->check(CLI::IsMember({"em", "local", "global"}));
  snap->add_option("--rho", snap_rho, "arc-length parameter (em)");
  snap->add_option("--dt", snap_dt, "time step (local, global)");
  snap->add_option("--t-end", snap_t_end, "final time");
  snap->add_option("--out", snap_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Handle h;
  std::vector<std::pair<std::string, std::string>> ov;
  if (*run) {
    if (rivet_status s = rivet_config_load(config_path.c_str(), &h.c); s != RIVET_OK) return report(s);
    if (!out_override.empty()) ov.emplace_back("run.output_dir", out_override);
    return run_with(h, ov);
  }
  if (*preset) {
    if (rivet_status s = rivet_config_from_preset(preset_name.c_str(), &h.c); s != RIVET_OK) {
      return report(s);
    }
    ov.emplace_back("run.output_dir", preset_out);
    add_double(ov, "em.rho", preset_rho);
    add_double(ov, "em.t_end", preset_t_end);
    if (!norm_kind.empty()) ov.emplace_back("norm.kind", norm_kind);
    if (preset_p) ov.emplace_back("norm.p", std::to_string(*preset_p));
    if (preset_max_steps) ov.emplace_back("em.max_steps", std::to_string(*preset_max_steps));
    return run_with(h, ov);
  }
  if (rivet_status s = rivet_config_new(&h.c); s != RIVET_OK) return report(s);
  if (*toy) {
    ov.emplace_back("run.experiment", "toy-" + toy_variant);
    ov.emplace_back("run.output_dir", toy_out);
    add_double(ov, "em.rho", toy_rho);
    add_double(ov, "toy.dt", toy_dt);
    add_double(ov, "toy.z0", toy_z0);
    add_double(ov, "em.t_end", toy_t_end);
    return run_with(h, ov);
  }
  ov.emplace_back("run.experiment", "snap");
  ov.emplace_back("run.output_dir", snap_out);
  ov.emplace_back("snap.variant", snap_variant);
  add_double(ov, "em.rho", snap_rho);
  add_double(ov, "snap.dt", snap_dt);
  add_double(ov, "em.t_end", snap_t_end);
  return run_with(h, ov);
}
