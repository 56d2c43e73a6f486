#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace perstab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CSparse = Eigen::SparseMatrix<Complex>;

// Resonance threshold shared by diagnostics and the periodic solver:
// sigma_min(shifted matrix) below this times ||A|| counts as "in the spectrum".
inline constexpr double kResonanceTol = 1e-12;

}  // namespace perstab
