#pragma once

#include <map>
#include <string>
#include <vector>

#include "auglag/auglag.hpp"
#include "emdriver/em_driver.hpp"
#include "fem/material.hpp"
#include "fem/model.hpp"
#include "norms/norms.hpp"

namespace rivet::app {

enum class Experiment { ToyAm, ToyEm, ToyGlobal, ToyViscous, Snap, Fem };

std::string experiment_name(Experiment e);

/// Flat "section.key" -> value map, as read from the config file.
using KeyValues = std::map<std::string, std::string>;

struct ToySettings {
  double z0 = 33.5;
  double dt = 0.001;
  int n_am = 20;
  double epsilon = 1e-2;
  double load = 2000.0;
  double reduced_energy_t = 0.001;
  bool stable_set = true;
  int stable_nt = 141;
  int stable_nz = 701;
};

struct SnapSettings {
  std::string variant = "em";  ///< em | local | global
  double dt = 0.0025;
  double f0 = -0.1;
  double rate = 0.25;
  double u0 = 0.0;
  bool u0_given = false;  ///< otherwise the equilibrium at f0
};

struct FemSettings {
  std::string mesh_file;
  std::string generator;  ///< ct | lshape, used when no file is given
  fem::MaterialParams material;
  norms::NormSpec norm = norms::NormSpec::lp(4);
  auglag::Config auglag;
  int newton_max_iters_u = 25;
  int newton_max_iters_z = 200;
  fem::Loading loading;
  std::string reaction_set;
  int reaction_component = 1;
};

struct RunConfig {
  Experiment experiment = Experiment::ToyEm;
  std::string output_dir = "out";
  std::string preset;
  em::Config em;
  ToySettings toy;
  SnapSettings snap;
  FemSettings fem;
};

/// Sectioned key = value file. Comments start with ';' or '#'.
KeyValues read_ini(const std::string& path);

/// Baked-in keys for the named preset (ct, lshape).
KeyValues preset_keys(const std::string& name);

/// Validates every key and collects all violations into one config error.
/// A `run.preset` entry is expanded first; explicit keys override it.
RunConfig parse_config(const KeyValues& kv);
RunConfig parse_config_file(const std::string& path);

}  // namespace rivet::app
