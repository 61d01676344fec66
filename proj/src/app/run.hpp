#pragma once

#include <functional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "core/error.hpp"
#include "fem/mesh.hpp"

namespace rivet::app {

/// Per-step quantities of a FEM run beyond the driver record.
struct FemStep {
  em::StepRecord record;
  double u_bar = 0.0;  ///< prescribed displacement of the loaded set
  double force = 0.0;  ///< reaction on the loaded set
  double z_min = 0.0;
};

struct RunSummary {
  std::vector<std::string> files;  ///< outputs written, relative to the output directory
  int steps = 0;
};

using FemStepObserver = std::function<void(const FemStep&, const em::EvolutionState&)>;

fem::Mesh build_mesh(const FemSettings& settings);

/// Runs the configured experiment and writes its outputs into cfg.output_dir.
/// Partial CSV output is flushed before a solver error is rethrown.
RunSummary run(const RunConfig& cfg, const FemStepObserver& observer = {});

/// 0 ok, 2 input (config, mesh, argument), 3 solver, 4 I/O.
int exit_code(ErrorKind kind);

}  // namespace rivet::app
