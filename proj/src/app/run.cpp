#include "app/run.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fem/fem_problem.hpp"
#include "fem/generators.hpp"
#include "fem/vtk.hpp"
#include "toy/toy.hpp"

namespace rivet::app {

namespace fs = std::filesystem;

namespace {

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw Error(ErrorKind::Io, fmt::format("cannot create output directory {}", dir));
    }
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream os(path(name), std::ios::binary | std::ios::trunc);
    os << content;
    os.close();
    if (!os) throw Error(ErrorKind::Io, "cannot write " + path(name));
    record(name);
  }

  void record(const std::string& name) { files.push_back(name); }

  std::vector<std::string> files;

 private:
  fs::path dir_;
};

std::string toy_csv(const toy::ToyTrajectory& tr) {
  std::string s = "step,t,z,u1,u2,F_red\n";
  for (const auto& r : tr) {
    s += fmt::format("{},{:.15g},{:.15g},{:.15g},{:.15g},{:.15g}\n", r.step, r.t, r.z, r.u1, r.u2,
                     r.f_red);
  }
  return s;
}

void run_toy(const RunConfig& cfg, OutputDir& out, RunSummary& summary) {
  const ToySettings& ts = cfg.toy;
  toy::ToyTrajectory tr;
  switch (cfg.experiment) {
    case Experiment::ToyAm:
      tr = toy::run_toy_am(ts.z0, ts.dt, ts.n_am, cfg.em.t_end, ts.load);
      break;
    case Experiment::ToyEm:
      tr = toy::run_toy_em(ts.z0, cfg.em.rho, cfg.em.t_end, ts.n_am, ts.load);
      break;
    case Experiment::ToyGlobal:
      tr = toy::run_toy_global(ts.z0, ts.dt, cfg.em.t_end, {}, ts.load);
      break;
    default:
      tr = toy::viscous_oracle(ts.z0, ts.epsilon, ts.dt, cfg.em.t_end, ts.load);
      break;
  }
  out.write("toy-trajectory.csv", toy_csv(tr));
  summary.steps = static_cast<int>(tr.size());

  const toy::GlobalSearch window;
  if (ts.stable_set) {
    const auto map = toy::stable_set_scan(0.0, cfg.em.t_end, ts.stable_nt, window.lo, 40.0,
                                          ts.stable_nz, ts.load);
    std::string s = "t,z,flag\n";
    for (size_t i = 0; i < map.t.size(); ++i) {
      for (size_t k = 0; k < map.z.size(); ++k) {
        s += fmt::format("{:.15g},{:.15g},{}\n", map.t[i], map.z[k], map.stable(i, k) ? 1 : 0);
      }
    }
    out.write("stable-set.csv", s);
  }

  std::string s = "z,F_red\n";
  const int n = ts.stable_nz;
  for (int k = 0; k < n; ++k) {
    const double z = window.lo + (40.0 - window.lo) * k / (n - 1);
    s += fmt::format("{:.15g},{:.15g}\n", z, toy::reduced_energy(ts.reduced_energy_t, z, ts.load));
  }
  out.write("reduced-energy.csv", s);
}

void run_snap(const RunConfig& cfg, OutputDir& out, RunSummary& summary) {
  const SnapSettings& ss = cfg.snap;
  const toy::SnapSchedule schedule{ss.f0, ss.rate};
  const double u0 = ss.u0_given ? ss.u0 : toy::snap_equilibrium(ss.f0);
  toy::SnapTrajectory tr;
  if (ss.variant == "em") {
    tr = toy::run_snap_em(schedule, cfg.em.rho, u0, cfg.em.t_end);
  } else if (ss.variant == "local") {
    tr = toy::run_snap_local(schedule, ss.dt, u0, cfg.em.t_end);
  } else {
    tr = toy::run_snap_global(schedule, ss.dt, u0, cfg.em.t_end);
  }
  std::string s = "step,t,u,F,newton_iters\n";
  for (const auto& r : tr) {
    s += fmt::format("{},{:.15g},{:.15g},{:.15g},{}\n", r.step, r.t, r.u, r.F, r.newton_iters);
  }
  out.write("snap-trajectory.csv", s);
  summary.steps = static_cast<int>(tr.size());
}

fem::Amplitude loaded_amplitude(const FemSettings& fs) {
  for (const auto& bc : fs.loading.dirichlet) {
    if (bc.set == fs.reaction_set && bc.component == fs.reaction_component) return bc.amplitude;
  }
  return fem::Amplitude::constant(0.0);
}

void run_fem(const RunConfig& cfg, OutputDir& out, RunSummary& summary,
             const FemStepObserver& observer) {
  const FemSettings& fs = cfg.fem;
  fem::Mesh mesh = build_mesh(fs);
  const fem::PhaseFieldModel model(std::move(mesh), fs.material, fs.loading);
  model.mesh().node_set(fs.reaction_set);

  fem::FemSolverSettings settings;
  settings.norm = fs.norm;
  settings.auglag = fs.auglag;
  settings.newton_u.max_iters = fs.newton_max_iters_u;
  settings.newton_z.max_iters = fs.newton_max_iters_z;
  fem::FemProblem problem(model, settings);
  const em::EvolutionState init = problem.initial_state();
  const fem::Amplitude ubar = loaded_amplitude(fs);

  std::string traj =
      "step,t,dt,dz_norm,am_sweeps,newton_max,auglag_iters,energy,dissipation_increment,"
      "stag_residual,u_bar,F,z_min\n";
  std::string fd = "u_bar,F\n";
  const auto flush = [&] {
    out.write("trajectory.csv", traj);
    out.write("force-displacement.csv", fd);
  };

  em::Trajectory result;
  try {
    result = em::run_em(problem, cfg.em, init.u, init.z,
                        [&](const em::StepRecord& r, const em::EvolutionState& st) {
                          FemStep step;
                          step.record = r;
                          step.u_bar = ubar.at(r.t);
                          step.force = model.reaction_force(st.u, st.z, fs.reaction_set,
                                                            fs.reaction_component);
                          step.z_min = st.z.minCoeff();
                          traj += fmt::format(
                              "{},{:.15g},{:.15g},{:.15g},{},{},{},{:.15g},{:.15g},{:.6e},{:.15g},"
                              "{:.15g},{:.15g}\n",
                              r.step, r.t, r.dt, r.dz_norm, r.am_sweeps, r.newton_max,
                              r.auglag_iters, r.energy, r.dissipation_increment, r.stag_residual,
                              step.u_bar, step.force, step.z_min);
                          fd += fmt::format("{:.15g},{:.15g}\n", step.u_bar, step.force);
                          if (r.snapshot) {
                            const std::string name = fmt::format("snapshot_{:05d}.vtk", r.step);
                            fem::write_vtk_file(out.path(name), model.mesh(), st.u, st.z,
                                                fmt::format("step {} t {:.15g}", r.step, r.t));
                            out.record(name);
                          }
                          if (observer) observer(step, st);
                        });
  } catch (const Error&) {
    flush();
    throw;
  }
  flush();
  const auto& fin = result.final_state;
  fem::write_vtk_file(out.path("final.vtk"), model.mesh(), fin.u, fin.z,
                      fmt::format("final step {}", fin.j));
  out.record("final.vtk");
  summary.steps = static_cast<int>(result.steps.size());
}

}  // namespace

fem::Mesh build_mesh(const FemSettings& settings) {
  fem::Mesh m;
  if (!settings.mesh_file.empty()) {
    m = fem::read_mesh_file(settings.mesh_file);
  } else if (settings.generator == "ct") {
    m = fem::ct_mesh();
  } else if (settings.generator == "lshape") {
    m = fem::lshape_mesh();
  } else {
    throw Error(ErrorKind::Config, "no mesh given: set mesh.file or mesh.generator");
  }
  m.validate();
  return m;
}

RunSummary run(const RunConfig& cfg, const FemStepObserver& observer) {
  OutputDir out(cfg.output_dir);
  RunSummary summary;
  switch (cfg.experiment) {
    case Experiment::Snap:
      run_snap(cfg, out, summary);
      break;
    case Experiment::Fem:
      run_fem(cfg, out, summary, observer);
      break;
    default:
      run_toy(cfg, out, summary);
      break;
  }
  summary.files = out.files;
  return summary;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Config:
    case ErrorKind::Mesh:
      return 2;
    case ErrorKind::NonConvergence:
    case ErrorKind::ConstraintViolation:
    case ErrorKind::Solver:
      return 3;
    case ErrorKind::Io:
      return 4;
  }
  return 3;
}

}  // namespace rivet::app
