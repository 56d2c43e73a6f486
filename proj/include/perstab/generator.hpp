#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "perstab/types.hpp"

namespace perstab {

using Metadata = std::map<std::string, double>;

// A generator A of U_t = A U + F on C^N, together with the Gram matrix G of the
// energy inner product <x, y>_H = y^* G x.
//
// Construction factors G = L L^T once and caches the energy-coordinate matrix
// A_w = L^T A L^{-T}. Every H-operator norm reduces to a spectral norm of a
// matrix built from A_w, since ||B||_H = ||L^T B L^{-T}||_2.
//
// Immutable after construction; copies share the cached state.
class Generator {
 public:
  Generator(CMatrix a, RMatrix gram, std::string label, Metadata metadata = {},
            std::set<std::string> flags = {});

  Eigen::Index dim() const noexcept { return data_->a.rows(); }
  const CMatrix& matrix() const noexcept { return data_->a; }
  const RMatrix& gram() const noexcept { return data_->gram; }
  const std::string& label() const noexcept { return data_->label; }
  const Metadata& metadata() const noexcept { return data_->metadata; }
  const std::set<std::string>& flags() const noexcept { return data_->flags; }
  bool has_flag(std::string_view flag) const;
  double metadata_or(const std::string& key, double fallback) const;

  // True when A has no imaginary part.
  bool is_real() const noexcept { return data_->real; }

  const CMatrix& weighted() const noexcept { return data_->weighted; }
  // ||A||_H (spectral norm of the weighted matrix).
  double operator_norm() const noexcept { return data_->norm; }
  // Smallest singular value of the weighted A; 0 in the spectrum when tiny.
  double sigma_min_at_zero() const noexcept { return data_->sigma_min0; }
  bool invertible() const noexcept;

  const CVector& eigenvalues() const noexcept { return data_->eigenvalues; }
  // max Re sigma(A)
  double abscissa() const noexcept { return data_->abscissa; }

  const CSparse& sparse() const noexcept { return data_->sparse; }

  // x -> L^T x, so that ||x||_H = ||L^T x||_2.
  CVector to_energy(const CVector& x) const;
  // y -> L^{-T} y, inverse of to_energy.
  CVector from_energy(const CVector& y) const;
  // B -> L^T B L^{-T}
  CMatrix to_energy(const CMatrix& b) const;

  // Largest eigenvalue of the G-symmetrized part G A + A^* G, relative to ||G A||.
  // Nonpositive (up to roundoff) iff Re<Ax, x>_H <= 0 for all x.
  double dissipativity_defect() const;

 private:
  struct Data {
    CMatrix a;
    RMatrix gram;
    std::string label;
    Metadata metadata;
    std::set<std::string> flags;
    bool real = true;
    Eigen::MatrixXd chol;  // lower factor L
    CMatrix weighted;
    double norm = 0.0;
    double sigma_min0 = 0.0;
    CVector eigenvalues;
    double abscissa = 0.0;
    CSparse sparse;
  };
  std::shared_ptr<const Data> data_;
};

// sqrt(x^* G x)
double energy_norm(const Generator& g, const CVector& x);

// Solves A x = b. Throws SingularGenerator when 0 is numerically in sigma(A).
CVector apply_inverse(const Generator& g, const CVector& b);

}  // namespace perstab
