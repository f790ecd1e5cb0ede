#pragma once

// Double and triple operator integrals over finite spectral measures,
// functions of noncommuting pairs f(A,B), and Schur multiplier norm bounds.
//
// All integrals are exact finite sums over spectral points. They are
// evaluated in the eigenbases of the measures: with P_j = V_j V_j*,
//
//   Σ_{j,k} Φ(x_j, y_k) P_j Q R_k = V (G ∘ (V* Q W)) W*,
//
// where G expands Φ over basis columns. Triple integrals use the same idea
// with one contracted index.

#include "opint/core.hpp"
#include "opint/function.hpp"
#include "opint/spectral.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace opint {

enum class OperatorIntegralKind { double_integral, triple_first, triple_second };

inline std::string to_string(OperatorIntegralKind k) {
  switch (k) {
    case OperatorIntegralKind::double_integral: return "double";
    case OperatorIntegralKind::triple_first: return "triple-first";
    case OperatorIntegralKind::triple_second: return "triple-second";
  }
  return "?";
}

struct OperatorIntegralResult {
  Matrix value;
  OperatorIntegralKind kind;
  std::string integrand_id;
  std::vector<std::size_t> spectra_sizes;
};

namespace detail {

inline void require_dims(const char* op, std::initializer_list<Eigen::Index> dims) {
  const Eigen::Index d0 = *dims.begin();
  for (auto d : dims) {
    if (d != d0) {
      std::ostringstream os;
      os << op << ": dimension mismatch (";
      bool first = true;
      for (auto e : dims) {
        os << (first ? "" : ", ") << e;
        first = false;
      }
      os << ")";
      throw ValidationError(os.str());
    }
  }
}

// Cluster index of every basis column.
inline std::vector<std::size_t> column_clusters(const SpectralMeasure& e) {
  std::vector<std::size_t> out(e.dim());
  for (std::size_t i = 0; i < e.size(); ++i)
    for (Eigen::Index c = e.offset(i); c < e.offset(i) + e.rank(i); ++c) out[c] = i;
  return out;
}

// table[(l * n1 + j) * n2 + k] = psi(p1[j], p2[k], p3[l])
template <class Psi>
std::vector<Complex> tabulate(const Psi& psi, const std::vector<double>& p1, const std::vector<double>& p2,
                              const std::vector<double>& p3) {
  std::vector<Complex> table(p1.size() * p2.size() * p3.size());
  std::size_t idx = 0;
  for (double z : p3)
    for (double x : p1)
      for (double y : p2) table[idx++] = psi(x, y, z);
  return table;
}

}  // namespace detail

// ∬ Φ(x,y) dE_A(x) Q dE_B(y)
template <class Phi>
OperatorIntegralResult double_operator_integral(const Phi& phi, const SpectralMeasure& ea, const Matrix& q,
                                                const SpectralMeasure& eb, std::string integrand_id = "Phi") {
  detail::require_dims("double_operator_integral", {ea.dim(), q.rows(), q.cols(), eb.dim()});
  const Eigen::Index n = ea.dim();
  const auto ca = detail::column_clusters(ea);
  const auto cb = detail::column_clusters(eb);

  Matrix g(ea.size(), eb.size());
  for (std::size_t k = 0; k < eb.size(); ++k)
    for (std::size_t j = 0; j < ea.size(); ++j) g(j, k) = phi(ea.point(j), eb.point(k));

  // A constant symbol collapses the sum by completeness; skip the basis round trip.
  if ((g.array() == g(0, 0)).all())
    return {g(0, 0) * q, OperatorIntegralKind::double_integral, std::move(integrand_id), {ea.size(), eb.size()}};

  Matrix x = ea.basis().adjoint() * q * eb.basis();
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index a = 0; a < n; ++a) x(a, c) *= g(ca[a], cb[c]);

  return {ea.basis() * x * eb.basis().adjoint(), OperatorIntegralKind::double_integral, std::move(integrand_id),
          {ea.size(), eb.size()}};
}

template <class Phi>
OperatorIntegralResult double_operator_integral(const Phi& phi, const SpectralMeasure& ea,
                                                const SpectralMeasure& eb) {
  return double_operator_integral(phi, ea, Matrix::Identity(ea.dim(), ea.dim()), eb);
}

// f(A,B) = ∬ f(x,y) dE_A(x) dE_B(y)
inline Matrix f_of_pair(const FunctionR2& f, const SpectralMeasure& ea, const SpectralMeasure& eb) {
  return double_operator_integral(f, ea, Matrix::Identity(ea.dim(), ea.dim()), eb, f.label()).value;
}

inline Matrix f_of_pair(const FunctionR2& f, const HermitianMatrix& a, const HermitianMatrix& b,
                        double cluster_tol = kDefaultClusterTol) {
  detail::require_dims("f_of_pair", {a.dim(), b.dim()});
  return f_of_pair(f, spectral_measure(a, cluster_tol), spectral_measure(b, cluster_tol));
}

// f(A,B) := f♯(A,B) (I - iB). The bounded factor f♯(A,B) is a double
// operator integral; the unbounded-style factor (I - iB) is applied as a
// dense product.
inline Matrix f_of_pair_sharp(const FunctionR2& f, const HermitianMatrix& a, const HermitianMatrix& b,
                              double cluster_tol = kDefaultClusterTol) {
  detail::require_dims("f_of_pair_sharp", {a.dim(), b.dim()});
  const Matrix bounded = f_of_pair(f_sharp(f), spectral_measure(a, cluster_tol), spectral_measure(b, cluster_tol));
  const Matrix weight = Matrix::Identity(b.dim(), b.dim()) - kI * b.matrix();
  return bounded * weight;
}

// ∭ Ψ(x1,x2,y) dE1(x1) T dE2(x2) dE3(y)
//   = Σ_{j,k,l} Ψ(x_j, x'_k, y_l) P_j T P'_k R_l
template <class Psi>
OperatorIntegralResult triple_oi_first(const Psi& psi, const SpectralMeasure& e1, const Matrix& t,
                                       const SpectralMeasure& e2, const SpectralMeasure& e3,
                                       std::string integrand_id = "Psi") {
  detail::require_dims("triple_oi_first", {e1.dim(), t.rows(), t.cols(), e2.dim(), e3.dim()});
  const Eigen::Index n = e1.dim();
  const std::size_t n1 = e1.size(), n2 = e2.size();
  const auto c1 = detail::column_clusters(e1);
  const auto c2 = detail::column_clusters(e2);
  const auto c3 = detail::column_clusters(e3);
  const auto table = detail::tabulate(psi, e1.points(), e2.points(), e3.points());

  const Matrix tt = e1.basis().adjoint() * t * e2.basis();  // T in (E1, E2) eigenbases
  const Matrix s = e2.basis().adjoint() * e3.basis();       // E2 basis -> E3 basis
  const Matrix tt_t = tt.transpose();                        // column access by row a

  // X(a,c) = Σ_b Ψ(a,b,c) tt(a,b) s(b,c)
  Matrix x(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Complex* sc = s.col(c).data();
    for (Eigen::Index a = 0; a < n; ++a) {
      const Complex* row = tt_t.col(a).data();
      const Complex* psi_row = &table[(c3[c] * n1 + c1[a]) * n2];
      Complex acc{0.0, 0.0};
      for (Eigen::Index b = 0; b < n; ++b) acc += psi_row[c2[b]] * row[b] * sc[b];
      x(a, c) = acc;
    }
  }
  return {e1.basis() * x * e3.basis().adjoint(), OperatorIntegralKind::triple_first, std::move(integrand_id),
          {e1.size(), e2.size(), e3.size()}};
}

// ∭ Ψ(x,y1,y2) dE1(x) dE2(y1) T dE3(y2)
//   = Σ_{j,k,l} Ψ(x_j, y_k, y'_l) P_j R_k T R'_l
template <class Psi>
OperatorIntegralResult triple_oi_second(const Psi& psi, const SpectralMeasure& e1, const SpectralMeasure& e2,
                                        const Matrix& t, const SpectralMeasure& e3,
                                        std::string integrand_id = "Psi") {
  detail::require_dims("triple_oi_second", {e1.dim(), e2.dim(), t.rows(), t.cols(), e3.dim()});
  const Eigen::Index n = e1.dim();
  const std::size_t n1 = e1.size(), n2 = e2.size();
  const auto c1 = detail::column_clusters(e1);
  const auto c2 = detail::column_clusters(e2);
  const auto c3 = detail::column_clusters(e3);
  const auto table = detail::tabulate(psi, e1.points(), e2.points(), e3.points());

  const Matrix s_t = (e1.basis().adjoint() * e2.basis()).transpose();  // E1 -> E2, row access
  const Matrix tt = e2.basis().adjoint() * t * e3.basis();             // T in (E2, E3) eigenbases

  // X(a,c) = Σ_b Ψ(a,b,c) s(a,b) tt(b,c)
  Matrix x(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Complex* tc = tt.col(c).data();
    for (Eigen::Index a = 0; a < n; ++a) {
      const Complex* row = s_t.col(a).data();
      const Complex* psi_row = &table[(c3[c] * n1 + c1[a]) * n2];
      Complex acc{0.0, 0.0};
      for (Eigen::Index b = 0; b < n; ++b) acc += psi_row[c2[b]] * row[b] * tc[b];
      x(a, c) = acc;
    }
  }
  return {e1.basis() * x * e3.basis().adjoint(), OperatorIntegralKind::triple_second, std::move(integrand_id),
          {e1.size(), e2.size(), e3.size()}};
}

// ---------------------------------------------------------------------------
// Schur multiplier bounds on a finite grid.

struct SchurBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline double operator_norm(const Matrix& m) { return schatten_norm(m, SchattenIndex::infinity()); }

// Upper bound from factorizations Φ(x_j, y_k) = Σ_n φ_n(x_j) ψ_n(y_k):
// (max_j Σ|φ_n(x_j)|² · max_k Σ|ψ_n(y_k)|²)^{1/2}. Tries the balanced SVD
// factorization and the two trivial ones (rows, columns); returns the least.
inline double schur_upper_bound(const Matrix& grid) {
  if (grid.size() == 0) throw ValidationError("schur_upper_bound: empty grid");
  const double max_col = grid.colwise().norm().maxCoeff();
  const double max_row = grid.rowwise().norm().maxCoeff();
  Eigen::BDCSVD<Matrix> svd(grid, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  const RealVector root = sv.cwiseSqrt();
  const Matrix phi = svd.matrixU() * root.cast<Complex>().asDiagonal();
  const Matrix psi = svd.matrixV() * root.cast<Complex>().asDiagonal();
  const double balanced =
      std::sqrt(phi.rowwise().squaredNorm().maxCoeff() * psi.rowwise().squaredNorm().maxCoeff());
  return std::min({balanced, max_col, max_row});
}

template <class Phi>
Matrix schur_grid(const Phi& phi, const std::vector<double>& xs, const std::vector<double>& ys) {
  Matrix g(xs.size(), ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k)
    for (std::size_t j = 0; j < xs.size(); ++j) g(j, k) = phi(xs[j], ys[k]);
  return g;
}

// lower: best ratio ||Φ∘Q|| / ||Q|| over elementary matrices and `trials`
// Gaussian test matrices (operator norms). upper: schur_upper_bound.
template <class Phi>
SchurBounds schur_multiplier_bounds(const Phi& phi, const std::vector<double>& xs, const std::vector<double>& ys,
                                    int trials, std::uint64_t seed) {
  if (xs.empty() || ys.empty()) throw ValidationError("schur_multiplier_bounds: empty point grid");
  if (trials < 1) throw ValidationError("schur_multiplier_bounds: trials must be >= 1");
  const Matrix g = schur_grid(phi, xs, ys);

  double lower = g.cwiseAbs().maxCoeff();  // elementary witnesses e_j e_k^T
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Matrix q(g.rows(), g.cols());
    for (Eigen::Index c = 0; c < q.cols(); ++c)
      for (Eigen::Index r = 0; r < q.rows(); ++r) q(r, c) = Complex(normal(rng), normal(rng));
    lower = std::max(lower, operator_norm(g.cwiseProduct(q)) / operator_norm(q));
  }
  return {lower, schur_upper_bound(g)};
}

// Valid S_p bound (any p) for the first-kind triple integral with R = I:
// ||Σ_l X_l R_l||_p <= Σ_l ||Ψ(·,·,y_l)||_Schur ||T||_p.
template <class Psi>
double triple_first_grid_bound(const Psi& psi, const std::vector<double>& p1, const std::vector<double>& p2,
                               const std::vector<double>& p3) {
  double total = 0.0;
  for (double y : p3) total += schur_upper_bound(schur_grid([&](double a, double b) { return psi(a, b, y); }, p1, p2));
  return total;
}

}  // namespace opint
