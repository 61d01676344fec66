#pragma once

#include <Eigen/Core>

namespace rivet::auglag {

/// Value and first two derivatives of one augmented-Lagrangian term
///   L(c) = 1/(2 alpha) * (max{0, lambda + alpha c}^2 - lambda^2)
/// with respect to the constraint value c.
struct TermValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

struct Config {
  double alpha1_init = 10.0;
  double alpha2_init = 10.0;
  double growth = 10.0;
  double sufficient_decrease = 0.25;
  double alpha_max = 1e12;
  double kkt_tol_feas_nodal = 1e-10;
  double kkt_tol_feas_global = 1e-10;  // absolute, in norm units
  double kkt_tol_comp = 1e-9;
  int max_outer = 30;

  void validate() const;
};

/// Multipliers and penalties for the nodal irreversibility family and the
/// single global norm-ball constraint.
struct State {
  Eigen::VectorXd lambda1;
  Eigen::VectorXd alpha1;
  double lambda2 = 0.0;
  double alpha2 = 1.0;
  int outer_iter = 0;

  /// Zero multipliers, initial penalties.
  static State fresh(Eigen::Index n_nodes, const Config& cfg);
};

/// Heaviside with H(0) = 1: the constraint counts as active on the kink.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

TermValue nodal_term(double c, double lambda, double alpha);
TermValue global_term(double g, double lambda2, double alpha2);

double hestenes_powell(double lambda, double alpha, double c);

double penalty_update(double alpha, double violation, double prev_violation, const Config& cfg);

/// Feasibility plus complementary slackness for one constraint family.
bool kkt_satisfied(const Eigen::Ref<const Eigen::VectorXd>& c,
                   const Eigen::Ref<const Eigen::VectorXd>& lambda, double tol_feas,
                   double tol_comp);

}  // namespace rivet::auglag
