#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

#include "fem/mesh.hpp"

namespace rivet::fem {

/// Legacy ASCII unstructured grid with point data z and vector u.
void write_vtk(std::ostream& os, const Mesh& mesh, const Eigen::VectorXd& u,
               const Eigen::VectorXd& z, const std::string& title = "rivet");
void write_vtk_file(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& z, const std::string& title = "rivet");

}  // namespace rivet::fem
