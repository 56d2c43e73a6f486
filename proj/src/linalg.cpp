#include "perstab/linalg.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace perstab::linalg {

double sigma_min_svd(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double sigma_max_svd(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double sigma_min_inverse_iteration(const CMatrix& m, int max_iter, double rtol) {
  const Eigen::Index n = m.rows();
  Eigen::PartialPivLU<CMatrix> lu(m);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) return 0.0;

  // Deterministic start vector with all components nonzero.
  CVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = Complex(1.0 + 0.1 * std::sin(1.0 + i), 0.3 * std::cos(2.0 + i));
  x.normalize();

  const CMatrix mh = m.adjoint();
  Eigen::PartialPivLU<CMatrix> luh(mh);
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    // y = (M^* M)^{-1} x = M^{-1} M^{-*} x
    CVector y = lu.solve(luh.solve(x));
    const double ny = y.norm();
    if (!std::isfinite(ny)) return 0.0;
    const double next = ny;
    x = y / ny;
    if (it > 0 && std::abs(next - lambda) <= rtol * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return 1.0 / std::sqrt(lambda);
}

double sigma_min(const CMatrix& m, Eigen::Index dense_limit) {
  if (m.rows() <= dense_limit) return sigma_min_svd(m);
  return sigma_min_inverse_iteration(m);
}

CMatrix expm(const CMatrix& m) { return m.exp(); }

}  // namespace perstab::linalg
