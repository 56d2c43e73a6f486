#pragma once

#include "perstab/types.hpp"

namespace perstab::linalg {

// Dense SVD is used up to this order; larger matrices go through inverse iteration.
inline constexpr Eigen::Index kDenseSvdLimit = 2000;

double sigma_min_svd(const CMatrix& m);
double sigma_max_svd(const CMatrix& m);

// Smallest singular value by inverse iteration on (M^* M)^{-1}, using one LU of M.
// Returns 0 when M is exactly singular.
double sigma_min_inverse_iteration(const CMatrix& m, int max_iter = 500, double rtol = 1e-13);

// Dispatches on size: SVD for order <= dense_limit, inverse iteration above.
double sigma_min(const CMatrix& m, Eigen::Index dense_limit = kDenseSvdLimit);

// Matrix exponential (scaling and squaring with Pade approximants).
CMatrix expm(const CMatrix& m);

}  // namespace perstab::linalg
