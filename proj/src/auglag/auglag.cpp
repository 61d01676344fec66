#include "auglag/auglag.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace rivet::auglag {

void Config::validate() const {
  if (!(alpha1_init > 0.0 && alpha2_init > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "auglag: initial penalties must be positive");
  }
  if (!(growth > 1.0)) throw Error(ErrorKind::InvalidArgument, "auglag: growth must exceed 1");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "auglag: sufficient_decrease must lie in (0,1)");
  }
  if (!(alpha_max >= alpha1_init && alpha_max >= alpha2_init)) {
    throw Error(ErrorKind::InvalidArgument, "auglag: alpha_max below initial penalty");
  }
  if (!(kkt_tol_feas_nodal > 0.0 && kkt_tol_feas_global > 0.0 && kkt_tol_comp > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "auglag: KKT tolerances must be positive");
  }
  if (max_outer < 1) throw Error(ErrorKind::InvalidArgument, "auglag: max_outer must be >= 1");
}

State State::fresh(Eigen::Index n_nodes, const Config& cfg) {
  State s;
  s.lambda1 = Eigen::VectorXd::Zero(n_nodes);
  s.alpha1 = Eigen::VectorXd::Constant(n_nodes, cfg.alpha1_init);
  s.lambda2 = 0.0;
  s.alpha2 = cfg.alpha2_init;
  s.outer_iter = 0;
  return s;
}

namespace {

TermValue term(double c, double lambda, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "auglag: penalty must be positive");
  const double shifted = lambda + alpha * c;
  const double active = std::max(0.0, shifted);
  return {(active * active - lambda * lambda) / (2.0 * alpha), active, alpha * heaviside(shifted)};
}

}  // namespace

TermValue nodal_term(double c, double lambda, double alpha) { return term(c, lambda, alpha); }

TermValue global_term(double g, double lambda2, double alpha2) { return term(g, lambda2, alpha2); }

double hestenes_powell(double lambda, double alpha, double c) {
  return std::max(0.0, lambda + alpha * c);
}

double penalty_update(double alpha, double violation, double prev_violation, const Config& cfg) {
  double next = alpha;
  if (violation > cfg.sufficient_decrease * prev_violation) next = alpha * cfg.growth;
  return std::min(next, std::max(alpha, cfg.alpha_max));
}

bool kkt_satisfied(const Eigen::Ref<const Eigen::VectorXd>& c,
                   const Eigen::Ref<const Eigen::VectorXd>& lambda, double tol_feas,
                   double tol_comp) {
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c[i] > tol_feas) return false;
    if (std::abs(lambda[i] * c[i]) > tol_comp) return false;
  }
  return true;
}

}  // namespace rivet::auglag
