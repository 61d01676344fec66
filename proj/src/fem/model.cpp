#include "fem/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "fem/parallel.hpp"

namespace rivet::fem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

template <class T, class Init, class Body>
std::vector<T> per_chunk(int n, Init&& init, Body&& body) {
  const int workers = std::max(1, std::min(assembly_threads(), n));
  std::vector<T> buf(workers);
  for (auto& b : buf) init(b);
  for_each_chunk(n, [&](int c, int b, int e) { body(buf[c], b, e); });
  return buf;
}

Eigen::VectorXd sum_chunks(const std::vector<Eigen::VectorXd>& parts) {
  Eigen::VectorXd out = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) out += parts[i];
  return out;
}

double sum_chunks(const std::vector<double>& parts) {
  double s = 0.0;
  for (double v : parts) s += v;
  return s;
}

Triplets join_chunks(std::vector<Triplets>& parts) {
  size_t n = 0;
  for (const auto& p : parts) n += p.size();
  Triplets out;
  out.reserve(n);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Eigen::Matrix2d qp_strain(const QuadPoint& q, const Element& el, int nen,
                          const Eigen::VectorXd& u) {
  double e11 = 0.0, e22 = 0.0, g12 = 0.0;
  for (int a = 0; a < nen; ++a) {
    const double ux = u[2 * el.nodes[a]], uy = u[2 * el.nodes[a] + 1];
    e11 += q.dNdx[a] * ux;
    e22 += q.dNdy[a] * uy;
    g12 += q.dNdy[a] * ux + q.dNdx[a] * uy;
  }
  Eigen::Matrix2d eps;
  eps << e11, 0.5 * g12, 0.5 * g12, e22;
  return eps;
}

double qp_value(const QuadPoint& q, const Element& el, int nen, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (int a = 0; a < nen; ++a) s += q.N[a] * v[el.nodes[a]];
  return s;
}

Eigen::Vector2d qp_grad(const QuadPoint& q, const Element& el, int nen, const Eigen::VectorXd& v) {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int a = 0; a < nen; ++a) {
    g[0] += q.dNdx[a] * v[el.nodes[a]];
    g[1] += q.dNdy[a] * v[el.nodes[a]];
  }
  return g;
}

// Columns 2a and 2a+1 of the strain-displacement matrix.
Eigen::Matrix<double, 3, 8> b_matrix(const QuadPoint& q, int nen) {
  Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
  for (int a = 0; a < nen; ++a) {
    B(0, 2 * a) = q.dNdx[a];
    B(1, 2 * a + 1) = q.dNdy[a];
    B(2, 2 * a) = q.dNdy[a];
    B(2, 2 * a + 1) = q.dNdx[a];
  }
  return B;
}

void check_sizes(const PhaseFieldModel& m, const Eigen::VectorXd& u, const Eigen::VectorXd& z) {
  if (u.size() != m.num_u_dofs() || z.size() != m.num_nodes()) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("field sizes ({}, {}) do not match the mesh ({}, {})", u.size(),
                            z.size(), m.num_u_dofs(), m.num_nodes()));
  }
}

}  // namespace

PhaseFieldModel::PhaseFieldModel(Mesh mesh, MaterialParams mp, Loading loading)
    : disc_(std::move(mesh)), mp_(mp), loading_(std::move(loading)) {
  mp_.validate();
  fixed_.assign(num_u_dofs(), 0);
  for (const auto& bc : loading_.dirichlet) {
    if (bc.component != 0 && bc.component != 1) {
      throw Error(ErrorKind::Config, fmt::format("dirichlet set '{}': component must be 0 or 1",
                                                 bc.set));
    }
    for (int n : disc_.mesh.node_set(bc.set)) fixed_[2 * n + bc.component] = 1;
  }
  for (const auto& nb : loading_.neumann) {
    if (disc_.mesh.set_edges(nb.set).empty()) {
      throw Error(ErrorKind::Mesh, fmt::format("neumann set '{}' has no element edges", nb.set));
    }
  }

  qp_offset_.assign(1, 0);
  for (const auto& g : disc_.elements) {
    qp_offset_.push_back(qp_offset_.back() + static_cast<int>(g.qp.size()));
  }

  kz_diag_ = Eigen::VectorXd::Zero(num_nodes());
  lumped_ = Eigen::VectorXd::Zero(num_nodes());
  const double gl = mp_.gc / mp_.l, glr = mp_.gc * mp_.l;
  for (int e = 0; e < disc_.mesh.num_elements(); ++e) {
    const auto& el = disc_.mesh.elements[e];
    const auto& geo = disc_.elements[e];
    for (const auto& q : geo.qp) {
      for (int a = 0; a < geo.nen; ++a) {
        kz_diag_[el.nodes[a]] +=
            q.w * (gl * q.N[a] * q.N[a] + glr * (q.dNdx[a] * q.dNdx[a] + q.dNdy[a] * q.dNdy[a]));
        lumped_[el.nodes[a]] += q.w * q.N[a];
      }
    }
  }
}

void PhaseFieldModel::apply_dirichlet(double t, Eigen::VectorXd& u) const {
  if (u.size() != num_u_dofs()) throw Error(ErrorKind::InvalidArgument, "u has the wrong size");
  for (const auto& bc : loading_.dirichlet) {
    const double v = bc.amplitude.at(t);
    for (int n : disc_.mesh.node_set(bc.set)) u[2 * n + bc.component] = v;
  }
}

Eigen::VectorXd PhaseFieldModel::external_force(double t) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(num_u_dofs());
  for (const auto& nb : loading_.neumann) {
    const Eigen::Vector2d tr = nb.traction * nb.scale.at(t);
    for (const auto& edge : disc_.mesh.set_edges(nb.set)) {
      const double len = (disc_.mesh.nodes[edge[1]] - disc_.mesh.nodes[edge[0]]).norm();
      for (int n : edge) {
        f[2 * n] += 0.5 * len * tr[0];
        f[2 * n + 1] += 0.5 * len * tr[1];
      }
    }
  }
  return f;
}

Eigen::VectorXd PhaseFieldModel::internal_force(const Eigen::VectorXd& u,
                                                const Eigen::VectorXd& z) const {
  check_sizes(*this, u, z);
  auto parts = per_chunk<Eigen::VectorXd>(
      disc_.mesh.num_elements(), [&](Eigen::VectorXd& v) { v.setZero(num_u_dofs()); },
      [&](Eigen::VectorXd& f, int b, int e_end) {
        for (int e = b; e < e_end; ++e) {
          const auto& el = disc_.mesh.elements[e];
          const auto& geo = disc_.elements[e];
          for (const auto& q : geo.qp) {
            const auto r =
                point_response(qp_strain(q, el, geo.nen, u), qp_value(q, el, geo.nen, z), mp_, false);
            const Eigen::Matrix<double, 8, 1> fe = q.w * b_matrix(q, geo.nen).transpose() * r.sigma;
            for (int a = 0; a < geo.nen; ++a) {
              f[2 * el.nodes[a]] += fe[2 * a];
              f[2 * el.nodes[a] + 1] += fe[2 * a + 1];
            }
          }
        }
      });
  return sum_chunks(parts);
}

Eigen::VectorXd PhaseFieldModel::residual_u(double t, const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& z) const {
  Eigen::VectorXd r = internal_force(u, z) - external_force(t);
  for (int i = 0; i < num_u_dofs(); ++i)
    if (fixed_[i]) r[i] = 0.0;
  return r;
}

SparseMatrix PhaseFieldModel::tangent_uu(const Eigen::VectorXd& u, const Eigen::VectorXd& z) const {
  check_sizes(*this, u, z);
  auto parts = per_chunk<Triplets>(
      disc_.mesh.num_elements(), [](Triplets&) {},
      [&](Triplets& trip, int b, int e_end) {
        for (int e = b; e < e_end; ++e) {
          const auto& el = disc_.mesh.elements[e];
          const auto& geo = disc_.elements[e];
          const int nd = 2 * geo.nen;
          Eigen::Matrix<double, 8, 8> ke = Eigen::Matrix<double, 8, 8>::Zero();
          for (const auto& q : geo.qp) {
            const auto r =
                point_response(qp_strain(q, el, geo.nen, u), qp_value(q, el, geo.nen, z), mp_, true);
            const auto B = b_matrix(q, geo.nen);
            ke.noalias() += q.w * B.transpose() * r.C * B;
          }
          for (int i = 0; i < nd; ++i) {
            const int gi = 2 * el.nodes[i / 2] + i % 2;
            if (fixed_[gi]) continue;
            for (int j = 0; j < nd; ++j) {
              const int gj = 2 * el.nodes[j / 2] + j % 2;
              if (!fixed_[gj]) trip.emplace_back(gi, gj, ke(i, j));
            }
          }
        }
      });
  Triplets trip = join_chunks(parts);
  for (int i = 0; i < num_u_dofs(); ++i)
    if (fixed_[i]) trip.emplace_back(i, i, 1.0);
  SparseMatrix K(num_u_dofs(), num_u_dofs());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

double PhaseFieldModel::stored_energy(const Eigen::VectorXd& u, const Eigen::VectorXd& z) const {
  check_sizes(*this, u, z);
  auto parts = per_chunk<double>(
      disc_.mesh.num_elements(), [](double& v) { v = 0.0; },
      [&](double& s, int b, int e_end) {
        for (int e = b; e < e_end; ++e) {
          const auto& el = disc_.mesh.elements[e];
          const auto& geo = disc_.elements[e];
          for (const auto& q : geo.qp) {
            s += q.w * point_response(qp_strain(q, el, geo.nen, u), qp_value(q, el, geo.nen, z),
                                      mp_, false)
                           .psi_total;
          }
        }
      });
  return sum_chunks(parts);
}

double PhaseFieldModel::surface_energy(const Eigen::VectorXd& z) const {
  if (z.size() != num_nodes()) throw Error(ErrorKind::InvalidArgument, "z has the wrong size");
  double s = 0.0;
  for (int e = 0; e < disc_.mesh.num_elements(); ++e) {
    const auto& el = disc_.mesh.elements[e];
    const auto& geo = disc_.elements[e];
    for (const auto& q : geo.qp) {
      const double zq = qp_value(q, el, geo.nen, z);
      s += q.w * ((1.0 - zq) * (1.0 - zq) / mp_.l + mp_.l * qp_grad(q, el, geo.nen, z).squaredNorm());
    }
  }
  return 0.5 * mp_.gc * s;
}

double PhaseFieldModel::external_work(double t, const Eigen::VectorXd& u) const {
  return external_force(t).dot(u);
}

double PhaseFieldModel::total_energy(double t, const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& z) const {
  return stored_energy(u, z) + surface_energy(z) - external_work(t, u);
}

Eigen::VectorXd PhaseFieldModel::psi_plus(const Eigen::VectorXd& u) const {
  if (u.size() != num_u_dofs()) throw Error(ErrorKind::InvalidArgument, "u has the wrong size");
  Eigen::VectorXd psi(num_qp());
  for_each_chunk(disc_.mesh.num_elements(), [&](int, int b, int e_end) {
    for (int e = b; e < e_end; ++e) {
      const auto& el = disc_.mesh.elements[e];
      const auto& geo = disc_.elements[e];
      for (size_t k = 0; k < geo.qp.size(); ++k) {
        psi[qp_offset_[e] + static_cast<int>(k)] =
            point_response(qp_strain(geo.qp[k], el, geo.nen, u), 1.0, mp_, false).psi_plus;
      }
    }
  });
  return psi;
}

ZProblem PhaseFieldModel::z_problem(const Eigen::VectorXd& u, const Eigen::VectorXd& z_prev,
                                    const norms::NormSpec& norm, double rho) const {
  if (z_prev.size() != num_nodes()) {
    throw Error(ErrorKind::InvalidArgument, "z_prev has the wrong size");
  }
  return {psi_plus(u), z_prev, norm, rho};
}

ZEvaluation PhaseFieldModel::residual_z(const ZProblem& zp, const Eigen::VectorXd& z,
                                        const auglag::State& al) const {
  const int n = num_nodes();
  if (z.size() != n) throw Error(ErrorKind::InvalidArgument, "z has the wrong size");
  const double gl = mp_.gc / mp_.l, glr = mp_.gc * mp_.l;
  auto parts = per_chunk<Eigen::VectorXd>(
      disc_.mesh.num_elements(), [&](Eigen::VectorXd& v) { v.setZero(n); },
      [&](Eigen::VectorXd& r, int b, int e_end) {
        for (int e = b; e < e_end; ++e) {
          const auto& el = disc_.mesh.elements[e];
          const auto& geo = disc_.elements[e];
          for (size_t k = 0; k < geo.qp.size(); ++k) {
            const auto& q = geo.qp[k];
            const double zq = qp_value(q, el, geo.nen, z);
            const Eigen::Vector2d gz = qp_grad(q, el, geo.nen, z);
            const double src = 2.0 * zq * zp.psi_plus[qp_offset_[e] + static_cast<int>(k)] +
                               gl * (zq - 1.0);
            for (int a = 0; a < geo.nen; ++a) {
              r[el.nodes[a]] +=
                  q.w * (src * q.N[a] + glr * (gz[0] * q.dNdx[a] + gz[1] * q.dNdy[a]));
            }
          }
        }
      });
  ZEvaluation out;
  out.r = sum_chunks(parts);
  for (int a = 0; a < n; ++a) {
    out.r[a] += auglag::nodal_term(z[a] - zp.z_prev[a], al.lambda1[a], al.alpha1[a]).d1;
  }
  out.nq = norms::quantities(z - zp.z_prev, disc_, zp.norm, al.lambda2, al.alpha2, zp.rho);
  out.r += out.nq.residual_scale * out.nq.fz;
  return out;
}

SparseMatrix PhaseFieldModel::Kzz_sparse(const ZProblem& zp, const Eigen::VectorXd& z,
                                         const auglag::State& al,
                                         const norms::NormQuantities& nq) const {
  const int n = num_nodes();
  const double gl = mp_.gc / mp_.l, glr = mp_.gc * mp_.l;
  auto parts = per_chunk<Triplets>(
      disc_.mesh.num_elements(), [](Triplets&) {},
      [&](Triplets& trip, int b, int e_end) {
        for (int e = b; e < e_end; ++e) {
          const auto& el = disc_.mesh.elements[e];
          const auto& geo = disc_.elements[e];
          double ke[4][4] = {};
          for (size_t k = 0; k < geo.qp.size(); ++k) {
            const auto& q = geo.qp[k];
            const double m = 2.0 * zp.psi_plus[qp_offset_[e] + static_cast<int>(k)] + gl;
            for (int a = 0; a < geo.nen; ++a)
              for (int c = 0; c < geo.nen; ++c)
                ke[a][c] += q.w * (m * q.N[a] * q.N[c] +
                                   glr * (q.dNdx[a] * q.dNdx[c] + q.dNdy[a] * q.dNdy[c]));
          }
          for (int a = 0; a < geo.nen; ++a)
            for (int c = 0; c < geo.nen; ++c) trip.emplace_back(el.nodes[a], el.nodes[c], ke[a][c]);
        }
      });
  Triplets trip = join_chunks(parts);
  // Nodes within round-off of the kink take the active branch.
  for (int a = 0; a < n; ++a) {
    const double c = z[a] - zp.z_prev[a];
    trip.emplace_back(a, a, auglag::nodal_term(std::max(c, c + 1e-12), al.lambda1[a], al.alpha1[a]).d2);
  }
  norms::add_sparse_tangent(trip, z - zp.z_prev, disc_, zp.norm, nq.ksp_scale);
  SparseMatrix K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

double PhaseFieldModel::augmented_energy_z(const ZProblem& zp, const Eigen::VectorXd& z,
                                           const auglag::State& al) const {
  const int n = num_nodes();
  if (z.size() != n) throw Error(ErrorKind::InvalidArgument, "z has the wrong size");
  double bulk = 0.0;
  for (int e = 0; e < disc_.mesh.num_elements(); ++e) {
    const auto& el = disc_.mesh.elements[e];
    const auto& geo = disc_.elements[e];
    for (size_t k = 0; k < geo.qp.size(); ++k) {
      const double zq = qp_value(geo.qp[k], el, geo.nen, z);
      bulk += geo.qp[k].w * (zq * zq + mp_.k) * zp.psi_plus[qp_offset_[e] + static_cast<int>(k)];
    }
  }
  double pen = 0.0;
  for (int a = 0; a < n; ++a) {
    pen += auglag::nodal_term(z[a] - zp.z_prev[a], al.lambda1[a], al.alpha1[a]).value;
  }
  const double g = norms::norm_value(z - zp.z_prev, disc_, zp.norm) - zp.rho;
  pen += auglag::global_term(g, al.lambda2, al.alpha2).value;
  return bulk + surface_energy(z) + pen;
}

double PhaseFieldModel::augmented_lagrangian(double t, const Eigen::VectorXd& u,
                                             const Eigen::VectorXd& z,
                                             const Eigen::VectorXd& z_prev,
                                             const auglag::State& al,
                                             const norms::NormSpec& norm, double rho) const {
  double pen = 0.0;
  for (int a = 0; a < num_nodes(); ++a) {
    pen += auglag::nodal_term(z[a] - z_prev[a], al.lambda1[a], al.alpha1[a]).value;
  }
  const double g = norms::norm_value(z - z_prev, disc_, norm) - rho;
  pen += auglag::global_term(g, al.lambda2, al.alpha2).value;
  return total_energy(t, u, z) + pen;
}

double PhaseFieldModel::reaction_force(const Eigen::VectorXd& u, const Eigen::VectorXd& z,
                                       const std::string& set, int component) const {
  if (component != 0 && component != 1) {
    throw Error(ErrorKind::InvalidArgument, "reaction component must be 0 or 1");
  }
  const auto& nodes = disc_.mesh.node_set(set);
  const Eigen::VectorXd f = internal_force(u, z);
  double r = 0.0;
  for (int n : nodes) r += f[2 * n + component];
  return r;
}

double PhaseFieldModel::dissipation_increment(const Eigen::VectorXd& z,
                                              const Eigen::VectorXd& z_prev) const {
  return mp_.gc / mp_.l * lumped_.dot(z_prev - z);
}

}  // namespace rivet::fem
