#pragma once

// Brute-force references, independent of the eigenbasis kernels: every
// operator integral is summed term by term over explicit projections.

#include "opint/opint.hpp"

#include <vector>

namespace oracle {

using opint::Complex;
using opint::Matrix;
using opint::SpectralMeasure;

template <class Phi>
Matrix double_integral(const Phi& phi, const SpectralMeasure& ea, const Matrix& q, const SpectralMeasure& eb) {
  const auto pa = ea.projections();
  const auto pb = eb.projections();
  Matrix acc = Matrix::Zero(q.rows(), q.cols());
  for (std::size_t j = 0; j < pa.size(); ++j)
    for (std::size_t k = 0; k < pb.size(); ++k) acc += phi(ea.point(j), eb.point(k)) * pa[j] * q * pb[k];
  return acc;
}

template <class Psi>
Matrix triple_first(const Psi& psi, const SpectralMeasure& e1, const Matrix& t, const SpectralMeasure& e2,
                    const SpectralMeasure& e3) {
  const auto p1 = e1.projections();
  const auto p2 = e2.projections();
  const auto p3 = e3.projections();
  Matrix acc = Matrix::Zero(t.rows(), t.cols());
  for (std::size_t j = 0; j < p1.size(); ++j)
    for (std::size_t k = 0; k < p2.size(); ++k)
      for (std::size_t l = 0; l < p3.size(); ++l)
        acc += psi(e1.point(j), e2.point(k), e3.point(l)) * p1[j] * t * p2[k] * p3[l];
  return acc;
}

template <class Psi>
Matrix triple_second(const Psi& psi, const SpectralMeasure& e1, const SpectralMeasure& e2, const Matrix& t,
                     const SpectralMeasure& e3) {
  const auto p1 = e1.projections();
  const auto p2 = e2.projections();
  const auto p3 = e3.projections();
  Matrix acc = Matrix::Zero(t.rows(), t.cols());
  for (std::size_t j = 0; j < p1.size(); ++j)
    for (std::size_t k = 0; k < p2.size(); ++k)
      for (std::size_t l = 0; l < p3.size(); ++l)
        acc += psi(e1.point(j), e2.point(k), e3.point(l)) * p1[j] * p2[k] * t * p3[l];
  return acc;
}

// g(H) for a scalar function via the Hermitian eigendecomposition.
template <class G>
Matrix one_variable_calculus(const G& g, const opint::HermitianMatrix& h) {
  const auto eig = opint::eigendecompose(h);
  opint::Vector d(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = g(eig.eigenvalues[i]);
  return eig.eigenvectors * d.asDiagonal() * eig.eigenvectors.adjoint();
}

inline Matrix random_complex(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = Complex(n(rng), n(rng));
  return m;
}

// Central finite difference of a complex function of one real variable.
template <class F>
Complex central_difference(const F& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle
