#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>

#include "app/config.hpp"
#include "app/run.hpp"
#include "criteria.hpp"
#include "fem/element.hpp"
#include "norms/norms.hpp"

namespace rivet::acceptance {

namespace {

struct CtRun {
  std::vector<double> t, dt_record, dz, dissipation, u_bar, force;
  double max_step_gap = 0.0;  ///< max |dt + ||dz|| - rho| with both measured from the states
  double max_z_increase = 0.0;
  double seconds = 0.0;
  int longest_frozen = 0;
  std::string error;
};

struct RunKey {
  double rho;
  std::string norm;
  bool operator<(const RunKey& o) const { return std::tie(rho, norm) < std::tie(o.rho, o.norm); }
};

std::map<RunKey, CtRun>& cache() {
  static std::map<RunKey, CtRun> c;
  return c;
}

std::string out_root() {
  const char* env = std::getenv("RIVET_ACCEPTANCE_OUT");
  return env ? env : "acceptance-out";
}

// norm: "l2", "l4", "l6" or "h1".
const CtRun& ct_run(double rho, const std::string& norm) {
  auto& c = cache();
  if (auto it = c.find({rho, norm}); it != c.end()) return it->second;

  app::KeyValues kv = {{"run.preset", "ct"},
                       {"em.rho", fmt::format("{}", rho)},
                       {"run.output_dir", fmt::format("{}/ct_{}_{}", out_root(), norm, rho)}};
  if (norm == "h1") {
    kv["norm.kind"] = "h1";
  } else {
    kv["norm.p"] = norm.substr(1);
  }
  const app::RunConfig cfg = app::parse_config(kv);
  const fem::Discretization disc(app::build_mesh(cfg.fem));

  CtRun run;
  std::optional<Eigen::VectorXd> z_prev;
  std::optional<double> t_prev;
  int frozen = 0;
  const auto t0 = std::chrono::steady_clock::now();
  const auto observe = [&](const app::FemStep& s, const em::EvolutionState& st) {
    const auto& r = s.record;
    const Eigen::VectorXd zp = z_prev ? *z_prev : Eigen::VectorXd::Ones(st.z.size());
    const double dz = norms::norm_value(st.z - zp, disc, cfg.fem.norm);
    run.max_z_increase = std::max(run.max_z_increase, (st.z - zp).maxCoeff());
    if (t_prev) {
      // Previous step's time increment is only known now.
      const double gap = std::abs((r.t - *t_prev) + run.dz.back() - rho);
      run.max_step_gap = std::max(run.max_step_gap, gap);
    }
    run.t.push_back(r.t);
    run.dt_record.push_back(r.dt);
    run.dz.push_back(dz);
    run.dissipation.push_back(r.dissipation_increment);
    run.u_bar.push_back(s.u_bar);
    run.force.push_back(s.force);
    frozen = r.dt <= 1e-6 ? frozen + 1 : 0;
    run.longest_frozen = std::max(run.longest_frozen, frozen);
    z_prev = st.z;
    t_prev = r.t;
  };
  try {
    app::run(cfg, observe);
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c.emplace(RunKey{rho, norm}, std::move(run)).first->second;
}

struct Point {
  double x, y;
};

double point_segment(const Point& p, const Point& a, const Point& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double s = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(p.x - a.x - s * vx, p.y - a.y - s * vy);
}

double one_sided(const std::vector<Point>& P, const std::vector<Point>& Q) {
  double worst = 0.0;
  for (const auto& p : P) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k + 1 < Q.size(); ++k) best = std::min(best, point_segment(p, Q[k], Q[k + 1]));
    worst = std::max(worst, best);
  }
  return worst;
}

// Graph distance between two force-displacement polylines in coordinates
// scaled by the largest displacement and the reference peak force,
// restricted to the common displacement range.
double curve_distance(const CtRun& ref, const CtRun& other) {
  const double u_hi = std::min(ref.u_bar.back(), other.u_bar.back());
  const double f_peak = *std::max_element(ref.force.begin(), ref.force.end());
  auto scaled = [&](const CtRun& r) {
    std::vector<Point> pts;
    for (size_t i = 0; i < r.u_bar.size(); ++i)
      if (r.u_bar[i] <= u_hi * (1 + 1e-12)) pts.push_back({r.u_bar[i] / u_hi, r.force[i] / f_peak});
    return pts;
  };
  const auto P = scaled(ref), Q = scaled(other);
  return std::max(one_sided(P, Q), one_sided(Q, P));
}

std::string describe(const std::string& name, const CtRun& r) {
  const double peak = r.force.empty() ? 0.0 : *std::max_element(r.force.begin(), r.force.end());
  return fmt::format("{}: {} steps, peak F {:.4f}, longest frozen block {}, {:.0f} s", name, r.t.size(),
                     peak, r.longest_frozen, r.seconds);
}

}  // namespace

Outcome criterion_ct_run() {
  Checklist c;
  const CtRun& a = ct_run(0.01, "l4");
  const CtRun& b = ct_run(0.005, "l4");
  c.note(describe("rho 0.01", a));
  c.note(describe("rho 0.005", b));
  c.add("runs complete", a.error.empty() && b.error.empty());
  if (!a.error.empty()) c.note("rho 0.01 error: " + a.error);
  if (!b.error.empty()) c.note("rho 0.005 error: " + b.error);
  if (!a.error.empty() || a.t.empty()) return c.outcome();

  c.note(fmt::format("max |dt + |dz| - rho| = {:.2e}", a.max_step_gap));
  c.add("dt + |dz| = rho to 1e-10", a.max_step_gap <= 1e-10);
  c.note(fmt::format("max nodal increase of z = {:.2e}", a.max_z_increase));
  c.add("z non-increasing", a.max_z_increase <= 1e-10);
  c.add("frozen block of >= 5 steps", a.longest_frozen >= 5);
  const double dmin = *std::min_element(a.dissipation.begin(), a.dissipation.end());
  c.note(fmt::format("min dissipation increment {:.2e}", dmin));
  c.add("dissipation increments >= -1e-10", dmin >= -1e-10);
  if (b.error.empty() && !b.t.empty()) {
    const double d = curve_distance(a, b);
    c.note(fmt::format("scaled graph distance rho vs rho/2 = {:.4f}", d));
    c.add("halving rho changes the curve by < 2%", d < 0.02);
  }
  c.add("runtime < 15 min", a.seconds + b.seconds < 900.0);
  return c.outcome();
}

Outcome criterion_norm_robustness() {
  Checklist c;
  const CtRun& ref = ct_run(0.01, "l4");
  std::vector<size_t> steps = {ref.t.size()};
  for (const std::string n : {"l2", "l6", "h1"}) {
    const CtRun& r = ct_run(0.01, n);
    c.note(describe(n, r));
    if (!r.error.empty()) {
      c.note(n + " error: " + r.error);
      c.add(n + " run completes", false);
      continue;
    }
    const double d = curve_distance(ref, r);
    c.note(fmt::format("{} vs l4 distance {:.4f}", n, d));
    c.add(n + " agrees with l4 within 2%", d < 0.02);
    steps.push_back(r.t.size());
  }
  std::sort(steps.begin(), steps.end());
  c.add("step counts differ across norms", std::unique(steps.begin(), steps.end()) - steps.begin() > 1);
  return c.outcome();
}

}  // namespace rivet::acceptance
