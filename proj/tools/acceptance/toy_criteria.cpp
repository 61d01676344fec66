#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "criteria.hpp"
#include "toy/toy.hpp"

namespace rivet::acceptance {

using namespace rivet::toy;

namespace {

constexpr double kZ0 = 33.5;
constexpr double kRho = 0.001;
constexpr double kEnd = 1.4;

struct Jump {
  size_t first = 0;  ///< first record of the frozen block
  size_t last = 0;   ///< last record of the frozen block
  double t = -1.0;
  double z_before = 0.0;
  double z_after = 0.0;
};

// Longest run of consecutive records with no time advance.
Jump frozen_block(const ToyTrajectory& tr) {
  Jump best;
  size_t best_len = 0;
  for (size_t i = 0; i < tr.size();) {
    if (tr[i].dt > 1e-12) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < tr.size() && tr[j + 1].dt <= 1e-12) ++j;
    if (j - i + 1 > best_len) {
      best_len = j - i + 1;
      // The record right after the block is still solved at the frozen time and
      // finishes the jump with an increment below rho.
      const size_t land = j + 1 < tr.size() ? j + 1 : j;
      best = {i, j, tr[i].t, i > 0 ? tr[i - 1].z : tr[i].z, tr[land].z};
    }
    i = j + 1;
  }
  return best;
}

// First record whose z dropped by more than `size` from the previous one
// (from z0 for the first record).
long first_big_drop(const ToyTrajectory& tr, double size, double z0 = kZ0) {
  for (size_t i = 0; i < tr.size(); ++i)
    if ((i ? tr[i - 1].z : z0) - tr[i].z > size) return static_cast<long>(i);
  return -1;
}

// Record after which z stops dropping by more than `size` per step.
size_t landing(const ToyTrajectory& tr, size_t from, double size) {
  size_t k = from;
  while (k + 1 < tr.size() && tr[k].z - tr[k + 1].z > size) ++k;
  return k;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Outcome Checklist::outcome() const {
  Outcome o;
  o.pass = failed_.empty();
  o.detail = notes_;
  if (!failed_.empty()) {
    o.detail += "; failed:";
    for (const auto& f : failed_) o.detail += " [" + f + "]";
  }
  return o;
}

Outcome criterion_toy_trajectory() {
  const auto t0 = std::chrono::steady_clock::now();
  const ToyTrajectory tr = run_toy_em(kZ0, kRho, kEnd, 20);
  Checklist c;

  double t_leave = -1.0;
  for (const auto& r : tr) {
    if (r.z < kZ0) {
      t_leave = r.t;
      break;
    }
  }
  c.note(fmt::format("z leaves {} at t = {:.4f}", kZ0, t_leave));
  c.add("hold until t = 1.16 +- 0.02", std::abs(t_leave - 1.16) <= 0.02);

  const Jump j = frozen_block(tr);
  c.note(fmt::format("frozen block of {} steps at t = {:.5f}, z {:.4f} -> {:.4f}", j.last - j.first + 1,
                     j.t, j.z_before, j.z_after));
  c.add("plateau time 1.2756 +- 0.0010", std::abs(j.t - 1.2756) <= 1e-3);

  // Between leaving and the jump every step advances time and moves z by less than rho.
  bool continuous = true;
  for (size_t i = 0; i < j.first; ++i) continuous = continuous && tr[i].dt > 0.0;
  c.add("continuous evolution before the jump", continuous && t_leave < j.t);

  // The whole jump happens inside the frozen block: the steps right before and after it move z by less than rho.
  const bool resolved = j.first > 0 && j.last + 1 < tr.size() && tr[j.first - 1].dz < kRho &&
                        tr[j.last + 1].dz < kRho && j.z_before - j.z_after > 10.0;
  // Time may only drift by round-off across the block.
  const double drift = j.last + 1 < tr.size() ? tr[j.last + 1].t - j.t : 1.0;
  c.note(fmt::format("time drift across the block {:.1e}", drift));
  c.add("jump resolved at frozen time", resolved && drift <= 1e-9);

  const double target = nearest_stable_below(j.t, j.z_before);
  c.note(fmt::format("nearest stable state below {:.4f} is {:.4f}", j.z_before, target));
  c.add("lands on the nearest locally stable state", std::abs(j.z_after - target) <= 2.0 * kRho);
  c.add("landing is locally stable", reduced_energy_dz(j.t, j.z_after) <= 1e-6);

  const double secs = seconds_since(t0);
  c.note(fmt::format("{:.2f} s", secs));
  c.add("runtime < 60 s", secs < 60.0);
  return c.outcome();
}

Outcome criterion_toy_schemes() {
  Checklist c;
  const ToyTrajectory em = run_toy_em(kZ0, kRho, kEnd, 20);
  const ToyTrajectory am = run_toy_am(kZ0, 0.001, 20, kEnd);
  const ToyTrajectory gl = run_toy_global(kZ0, 0.001, kEnd);

  const Jump j = frozen_block(em);
  const double z_em = j.z_after;

  const long ia = first_big_drop(am, 1.0);
  const long ig = first_big_drop(gl, 1.0);
  if (ia < 0 || ig < 0) {
    c.add("both AM and global minimization jump", false);
    return c.outcome();
  }
  const double t_am = am[ia].t;
  const double t_gl = gl[ig].t;
  const size_t la = landing(am, ia, 1e-3);
  const double z_am = am[la].z;
  const double z_gl = gl[ig].z;
  const double z_glob = global_z_min(am[la].t, ia > 0 ? am[ia - 1].z : kZ0);
  c.note(fmt::format("jump times: global {:.3f}, AM {:.3f}, E&M {:.4f}", t_gl, t_am, j.t));
  c.note(fmt::format("endpoints: global {:.3f}, AM {:.3f}, E&M {:.3f}", z_gl, z_am, z_em));

  c.add("global jumps at the first step", ig == 0);
  c.add("AM jumps at the E&M time", std::abs(t_am - j.t) <= 0.005);
  c.add("ordering global < AM = E&M", t_gl < t_am && t_gl < j.t);
  c.add("AM lands at the global minimizer", std::abs(z_am - z_glob) <= 1e-3);
  // AM passes over the stable E&M endpoint on its way down.
  c.add("AM crosses locally stable states",
        z_am < z_em && locally_stable(j.t, z_em, 1e-6) && reduced_energy(j.t, z_am) < reduced_energy(j.t, z_em));
  c.add("three distinct endpoints", std::abs(z_em - z_am) > 1.0 && std::abs(z_em - z_gl) > 1.0 &&
                                        std::abs(z_am - z_gl) > 1e-2);
  return c.outcome();
}

Outcome criterion_bv_condition() {
  Checklist c;
  const ToyTrajectory em = run_toy_em(kZ0, kRho, kEnd, 20);
  const Jump j = frozen_block(em);
  double worst = std::numeric_limits<double>::infinity();
  for (size_t i = j.first; i < j.last; ++i) worst = std::min(worst, reduced_energy_dz(j.t, em[i].z));
  c.note(fmt::format("min dF_red along {} intermediate states = {:.3e}", j.last - j.first, worst));
  c.add("dF_red >= -1e-6 along the jump path", worst >= -1e-6);

  // Viscous regularizations: the flow arrests at the end of the fast
  // transition. Its arrest point is the viscous jump endpoint.
  const double dt = 1e-6;
  const size_t land = j.last + 1;
  std::vector<double> gaps;
  for (double eps : {1e-2, 1e-3}) {
    const ToyTrajectory v = viscous_oracle(kZ0, eps, dt, j.t + 0.01);
    double t_end = -1.0, z_end = v.back().z;
    bool moving = false;
    for (const auto& r : v) {
      moving = moving || r.z < 0.5 * (j.z_before + j.z_after);
      if (moving && r.dz == 0.0) {
        t_end = r.t;
        z_end = r.z;
        break;
      }
    }
    gaps.push_back(std::hypot(z_end - em[land].z, t_end - em[land].t));
    c.note(fmt::format("eps {:g}: arrest at t = {:.5f}, z = {:.6f}, distance to the E&M endpoint {:.2e}",
                       eps, t_end, z_end, gaps.back()));
    c.add(fmt::format("eps {:g} gap in z < 0.5", eps), std::abs(z_end - em[land].z) < 0.5);
  }
  c.add("distance decreases with eps", gaps[1] < gaps[0]);
  return c.outcome();
}

Outcome criterion_snap() {
  const auto t0 = std::chrono::steady_clock::now();
  Checklist c;
  c.add("E(0, 0) = 0", std::abs(snap_energy(0.0, 0.0)) <= 1e-12);
  c.add("E(2, 0) = 0", std::abs(snap_energy(2.0, 0.0)) <= 1e-12);

  const double u_near = snap_equilibrium(-0.1);
  const SnapSchedule hold{1e-4, 0.0};
  const auto gl = run_snap_global(hold, 0.01, u_near, 0.02);
  const auto lo = run_snap_local(hold, 0.01, u_near, 0.02);
  const auto em0 = run_snap_em(hold, 0.01, u_near, 0.05);
  c.note(fmt::format("F = 1e-4: global u = {:.3f}, local u = {:.3e}, E&M u = {:.3e}", gl.back().u,
                     lo.back().u, em0.back().u));
  c.add("global snaps at F = 1e-4", gl.back().u > 1.9);
  c.add("local and E&M hold at F = 1e-4", lo.back().u < 0.01 && em0.back().u < 0.01);

  const SnapSchedule ramp;
  const double u0 = snap_equilibrium(ramp(0.0));
  const auto em = run_snap_em(ramp, 0.01, u0, 1.6);
  const auto naive = run_snap_local(ramp, 0.01, u0, 1.6);
  int em_max = 0, naive_max = 0;
  bool naive_diverged = false, em_ok = true;
  for (const auto& r : em) {
    em_max = std::max(em_max, r.newton_iters);
    em_ok = em_ok && r.converged;
  }
  for (const auto& r : naive) {
    naive_max = std::max(naive_max, r.newton_iters);
    naive_diverged = naive_diverged || !r.converged;
  }
  c.note(fmt::format("max Newton: E&M {}, naive {}{}", em_max, naive_max, naive_diverged ? " (diverged)" : ""));
  c.add("E&M Newton <= 15", em_ok && em_max <= 15);
  c.add("naive Newton >= 50 or diverges", naive_max >= 50 || naive_diverged);

  // Frozen steps: exactly the steps that cross from the near to the far branch.
  const Fold fold = snap_fold();
  std::vector<size_t> frozen;
  for (size_t i = 0; i < em.size(); ++i)
    if (em[i].dt <= 1e-12) frozen.push_back(i);
  const bool contiguous = !frozen.empty() && frozen.back() - frozen.front() + 1 == frozen.size();
  bool snapping = contiguous;
  if (contiguous) {
    const size_t a = frozen.front(), b = frozen.back();
    // Near branch before, far branch after, load held beyond the fold in between.
    snapping = a > 0 && b + 1 < em.size() && em[a - 1].u < fold.u && em[b + 1].u > 2.0;
    for (size_t i = a; i <= b + 1; ++i) snapping = snapping && std::abs(em[i].F - em[a].F) <= 1e-12 && em[i].F > fold.F;
    for (size_t i = 0; i < a; ++i) snapping = snapping && em[i].u < fold.u;
  }
  c.note(fmt::format("{} frozen steps, fold at F = {:.5f}", frozen.size(), fold.F));
  c.add("frozen steps exactly during the snap", contiguous && snapping);

  const double secs = seconds_since(t0);
  c.note(fmt::format("{:.2f} s", secs));
  c.add("runtime < 10 s", secs < 10.0);
  return c.outcome();
}

}  // namespace rivet::acceptance
