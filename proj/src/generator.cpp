#include "perstab/generator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "perstab/errors.hpp"
#include "perstab/linalg.hpp"

namespace perstab {

namespace {

CVector compute_eigenvalues(const CMatrix& a, bool real) {
  if (a.rows() == 0) return CVector();
  if (real) {
    // The real solver returns exact conjugate pairs.
    Eigen::EigenSolver<RMatrix> es(a.real(), false);
    return es.eigenvalues();
  }
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  return es.eigenvalues();
}

}  // namespace

Generator::Generator(CMatrix a, RMatrix gram, std::string label, Metadata metadata,
                     std::set<std::string> flags) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw DimensionMismatch("generator matrix must be square and nonempty");
  }
  if (gram.rows() != a.rows() || gram.cols() != a.cols()) {
    throw DimensionMismatch("Gram matrix order " + std::to_string(gram.rows()) +
                            " does not match generator order " + std::to_string(a.rows()));
  }
  const double gscale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-13 * gscale) {
    throw InvalidSpec("Gram matrix is not symmetric");
  }
  if (!a.allFinite() || !gram.allFinite()) throw InvalidSpec("non-finite matrix entries");

  auto d = std::make_shared<Data>();
  Eigen::LLT<RMatrix> llt(gram);
  if (llt.info() != Eigen::Success || (llt.matrixL().toDenseMatrix().diagonal().array() <= 0.0).any()) {
    throw InvalidSpec("Gram matrix is not positive definite");
  }
  d->chol = llt.matrixL();
  d->real = a.imag().cwiseAbs().maxCoeff() == 0.0;
  d->a = std::move(a);
  d->gram = std::move(gram);
  d->label = std::move(label);
  d->metadata = std::move(metadata);
  d->flags = std::move(flags);
  if (d->real) d->flags.insert("real");

  // A_w = L^T A L^{-T}:  A_w^T = L^{-1} (L^T A)^T.
  const CMatrix lc = d->chol.cast<Complex>();
  const CMatrix lta = lc.transpose() * d->a;
  const CMatrix xt = lc.triangularView<Eigen::Lower>().solve(CMatrix(lta.transpose()));
  d->weighted = xt.transpose();

  d->norm = linalg::sigma_max_svd(d->weighted);
  d->sigma_min0 = linalg::sigma_min(d->weighted);
  d->eigenvalues = compute_eigenvalues(d->a, d->real);
  d->abscissa = d->eigenvalues.real().maxCoeff();
  d->sparse = d->a.sparseView(Complex(0.0), 0.0);
  d->sparse.makeCompressed();
  data_ = std::move(d);
}

bool Generator::has_flag(std::string_view flag) const {
  return data_->flags.find(std::string(flag)) != data_->flags.end();
}

double Generator::metadata_or(const std::string& key, double fallback) const {
  auto it = data_->metadata.find(key);
  return it == data_->metadata.end() ? fallback : it->second;
}

bool Generator::invertible() const noexcept {
  return data_->sigma_min0 > kResonanceTol * data_->norm;
}

CVector Generator::to_energy(const CVector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("state length does not match generator dim");
  return data_->chol.transpose().cast<Complex>() * x;
}

CVector Generator::from_energy(const CVector& y) const {
  if (y.size() != dim()) throw DimensionMismatch("state length does not match generator dim");
  const CMatrix lc = data_->chol.cast<Complex>();
  return lc.transpose().triangularView<Eigen::Upper>().solve(y);
}

CMatrix Generator::to_energy(const CMatrix& b) const {
  if (b.rows() != dim() || b.cols() != dim()) throw DimensionMismatch("operator order mismatch");
  const CMatrix lc = data_->chol.cast<Complex>();
  const CMatrix ltb = lc.transpose() * b;
  const CMatrix xt = lc.triangularView<Eigen::Lower>().solve(CMatrix(ltb.transpose()));
  return xt.transpose();
}

double Generator::dissipativity_defect() const {
  const CMatrix ga = data_->gram.cast<Complex>() * data_->a;
  const CMatrix sym = ga + ga.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
  const double scale = std::max(linalg::sigma_max_svd(ga), 1e-300);
  return es.eigenvalues().maxCoeff() / scale;
}

double energy_norm(const Generator& g, const CVector& x) {
  if (x.size() != g.dim()) {
    throw DimensionMismatch("state of length " + std::to_string(x.size()) +
                            " for generator of dim " + std::to_string(g.dim()));
  }
  const double q = (x.adjoint() * g.gram().cast<Complex>() * x)(0).real();
  return std::sqrt(std::max(q, 0.0));
}

CVector apply_inverse(const Generator& g, const CVector& b) {
  if (b.size() != g.dim()) throw DimensionMismatch("right-hand side length does not match generator dim");
  if (!g.invertible()) {
    throw SingularGenerator("0 is numerically in the spectrum of " + g.label() +
                            " (sigma_min=" + std::to_string(g.sigma_min_at_zero()) + ")");
  }
  Eigen::PartialPivLU<CMatrix> lu(g.matrix());
  CVector x = lu.solve(b);
  // One step of iterative refinement keeps the residual at the backward-error level.
  const CVector r = b - g.matrix() * x;
  x += lu.solve(r);
  return x;
}

}  // namespace perstab
