#pragma once

// Dense Hermitian linear algebra: eigendecomposition, clustered spectral
// measures, Schatten norms and reproducible random operator generators.

#include "opint/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace opint {

// Finite stand-in for a self-adjoint operator. Construction validates
// conjugate symmetry to 1e-12 * max|entry|.
class HermitianMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  explicit HermitianMatrix(Matrix entries) : m_(std::move(entries)) { validate(); }

  static HermitianMatrix diagonal(const RealVector& d) {
    return HermitianMatrix(d.cast<Complex>().asDiagonal().toDenseMatrix());
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  operator const Matrix&() const { return m_; }  // NOLINT

 private:
  void validate() const {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
      std::ostringstream os;
      os << "HermitianMatrix: expected a square matrix of dimension >= 1, got " << m_.rows() << "x"
         << m_.cols();
      throw ValidationError(os.str());
    }
    const double scale = m_.cwiseAbs().maxCoeff();
    const double tol = kSymmetryTol * scale;
    for (Eigen::Index j = 0; j < m_.rows(); ++j) {
      for (Eigen::Index k = j; k < m_.cols(); ++k) {
        if (!std::isfinite(std::abs(m_(j, k))) ||
            std::abs(m_(j, k) - std::conj(m_(k, j))) > tol) {
          std::ostringstream os;
          os << "HermitianMatrix: entries (" << j << "," << k << ") and (" << k << "," << j
             << ") are not conjugate: " << m_(j, k) << " vs " << m_(k, j);
          throw ValidationError(os.str());
        }
      }
    }
  }

  Matrix m_;
};

struct Eigendecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns match eigenvalues
};

inline Eigendecomposition eigendecompose(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    // Eigen's tridiagonal QR gives up after 30 sweeps per eigenvalue.
    os << "eigendecompose: QR iteration did not converge within " << 30 * h.dim()
       << " iterations (dim " << h.dim() << ")";
    throw NumericalError(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double spectral_radius(const RealVector& eigenvalues) {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

inline constexpr double kDefaultClusterTol = 1e-8;

// Projection-valued measure of a Hermitian matrix. Eigenvalues closer than the
// clustering threshold share a point; the point is the mean of its cluster.
//
// The eigenbasis is stored with columns grouped by point, so every projection
// is basis.middleCols(offset, rank) times its adjoint. Kernels work in this
// basis directly; projection() materializes P_i on request.
class SpectralMeasure {
 public:
  SpectralMeasure(Matrix basis, std::vector<double> points, std::vector<Eigen::Index> offsets)
      : basis_(std::move(basis)), points_(std::move(points)), offsets_(std::move(offsets)) {
    column_points_.resize(basis_.cols());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      for (Eigen::Index c = offsets_[i]; c < offsets_[i + 1]; ++c) column_points_[c] = points_[i];
    }
  }

  std::size_t size() const { return points_.size(); }
  Eigen::Index dim() const { return basis_.rows(); }
  const std::vector<double>& points() const { return points_; }
  double point(std::size_t i) const { return points_[i]; }
  Eigen::Index rank(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  Eigen::Index offset(std::size_t i) const { return offsets_[i]; }

  const Matrix& basis() const { return basis_; }
  // Representative point of each basis column.
  const std::vector<double>& column_points() const { return column_points_; }

  Matrix projection(std::size_t i) const {
    const auto cols = basis_.middleCols(offsets_[i], rank(i));
    return cols * cols.adjoint();
  }

  std::vector<Matrix> projections() const {
    std::vector<Matrix> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(projection(i));
    return out;
  }

  // Σ point_i P_i
  Matrix reconstruct() const {
    const RealVector d = Eigen::Map<const RealVector>(column_points_.data(), column_points_.size());
    return basis_ * d.cast<Complex>().asDiagonal() * basis_.adjoint();
  }

 private:
  Matrix basis_;
  std::vector<double> points_;
  std::vector<Eigen::Index> offsets_;  // size() + 1 entries
  std::vector<double> column_points_;
};

// cluster_tol is relative: gaps <= cluster_tol * max(1, spectral radius) merge.
inline SpectralMeasure spectral_measure(const HermitianMatrix& h,
                                        double cluster_tol = kDefaultClusterTol) {
  if (!(cluster_tol >= 0.0)) throw ValidationError("spectral_measure: cluster_tol must be >= 0");
  auto eig = eigendecompose(h);
  const auto& lam = eig.eigenvalues;
  const double threshold = cluster_tol * std::max(1.0, spectral_radius(lam));

  std::vector<double> points;
  std::vector<Eigen::Index> offsets{0};
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= lam.size(); ++i) {
    if (i == lam.size() || lam[i] - lam[i - 1] > threshold) {
      points.push_back(lam.segment(start, i - start).mean());
      offsets.push_back(i);
      start = i;
    }
  }
  return SpectralMeasure(std::move(eig.eigenvectors), std::move(points), std::move(offsets));
}

// Index p of the Schatten–von Neumann class S_p; p = ∞ is the operator norm.
class SchattenIndex {
 public:
  explicit SchattenIndex(double p) : p_(p) {
    if (!(p >= 1.0)) {
      std::ostringstream os;
      os << "SchattenIndex: p must be >= 1 (got " << p << ")";
      throw ValidationError(os.str());
    }
  }
  static SchattenIndex infinity() { return SchattenIndex(std::numeric_limits<double>::infinity()); }

  double value() const { return p_; }
  bool is_infinite() const { return std::isinf(p_); }
  std::string to_string() const {
    if (is_infinite()) return "inf";
    std::ostringstream os;
    os << p_;
    return os.str();
  }
  friend bool operator==(SchattenIndex a, SchattenIndex b) { return a.p_ == b.p_; }

 private:
  double p_;
};

inline RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

inline double schatten_norm(const Matrix& m, SchattenIndex p) {
  const RealVector s = singular_values(m);
  if (s.size() == 0) return 0.0;
  const double smax = s.maxCoeff();
  if (p.is_infinite() || smax == 0.0) return smax;
  if (p.value() == 1.0) return s.sum();
  if (p.value() == 2.0) return s.norm();
  // Scale by the largest singular value to keep powers in range.
  const double q = p.value();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s[i] / smax, q);
  return smax * std::pow(acc, 1.0 / q);
}

// ---------------------------------------------------------------------------
// Random generators. All are deterministic functions of their seed.

struct Ensemble {
  enum class Kind { gue, spread };
  Kind kind = Kind::gue;
  double radius = 1.0;  // spread only: eigenvalues uniform in [-radius, radius]

  static Ensemble gue() { return {Kind::gue, 1.0}; }
  static Ensemble spread(double r) { return {Kind::spread, r}; }

  // Nominal width of the spectrum, used to scale relative gap policies.
  double nominal_range() const { return kind == Kind::gue ? 4.0 : 2.0 * radius; }
  std::string name() const { return kind == Kind::gue ? "gue" : "spread"; }
};

namespace detail {

inline Matrix ginibre(Eigen::Index dim, std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  Matrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  return g;
}

// GUE normalized so the spectrum fills [-2, 2] as dim grows.
inline Matrix gue_sample(Eigen::Index dim, std::mt19937_64& rng) {
  const Matrix g = ginibre(dim, rng, 2.0 / static_cast<double>(dim));
  Matrix h = (g + g.adjoint()) * 0.5;
  for (Eigen::Index i = 0; i < dim; ++i) h(i, i) = h(i, i).real();
  return h;
}

inline Matrix haar_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  const Matrix g = ginibre(dim, rng, 1.0);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

// Exact conjugate symmetry so HermitianMatrix validation never trips on
// round-off from V diag V*.
inline Matrix hermitize(const Matrix& m) {
  Matrix h = (m + m.adjoint()) * 0.5;
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    h(j, j) = h(j, j).real();
    for (Eigen::Index i = j + 1; i < h.rows(); ++i) h(j, i) = std::conj(h(i, j));
  }
  return h;
}

inline Matrix compose(const Matrix& v, const RealVector& lam) {
  return hermitize(v * lam.cast<Complex>().asDiagonal() * v.adjoint());
}

// Slack added to requested gaps so recomputed eigenvalues still clear them.
inline double gap_slack(double gap, double scale, Eigen::Index dim) {
  if (gap <= 0) return 0.0;
  return gap * 1e-8 + 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale) *
                          static_cast<double>(dim);
}

}  // namespace detail

inline Matrix random_unitary(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return detail::haar_unitary(dim, rng);
}

inline HermitianMatrix random_hermitian(Eigen::Index dim, const Ensemble& ensemble, double min_gap,
                                        std::uint64_t seed) {
  if (dim < 1) throw ValidationError("random_hermitian: dim must be >= 1");
  if (!(min_gap >= 0)) throw ValidationError("random_hermitian: min_gap must be >= 0");
  if (ensemble.kind == Ensemble::Kind::spread && !(ensemble.radius > 0))
    throw ValidationError("random_hermitian: spread-spectrum radius must be > 0");

  std::mt19937_64 rng(seed);
  const double n = static_cast<double>(dim);

  if (ensemble.kind == Ensemble::Kind::gue) {
    Matrix h = detail::gue_sample(dim, rng);
    if (min_gap == 0 || dim == 1) return HermitianMatrix(std::move(h));
    auto eig = eigendecompose(HermitianMatrix(h));
    RealVector lam = eig.eigenvalues;
    const double g = min_gap + detail::gap_slack(min_gap, spectral_radius(lam) + n * min_gap, dim);
    bool changed = false;
    for (Eigen::Index i = 1; i < dim; ++i) {
      if (lam[i] - lam[i - 1] < g) {
        lam[i] = lam[i - 1] + g;
        changed = true;
      }
    }
    if (!changed) return HermitianMatrix(std::move(h));
    return HermitianMatrix(detail::compose(eig.eigenvectors, lam));
  }

  const double r = ensemble.radius;
  const double g = min_gap + detail::gap_slack(min_gap, r, dim);
  const double free_length = 2.0 * r - (n - 1.0) * g;
  if (free_length < 0) {
    std::ostringstream os;
    os << "random_hermitian: min_gap " << min_gap << " infeasible for dim " << dim
       << " in [-" << r << ", " << r << "]";
    throw ValidationError(os.str());
  }
  // Sorted uniforms on a shortened interval plus i*g: uniform among
  // configurations whose gaps are all >= g.
  std::uniform_real_distribution<double> uni(0.0, free_length);
  std::vector<double> u(dim);
  for (auto& x : u) x = uni(rng);
  std::sort(u.begin(), u.end());
  RealVector lam(dim);
  for (Eigen::Index i = 0; i < dim; ++i) lam[i] = -r + u[i] + static_cast<double>(i) * g;
  if (dim == 1) return HermitianMatrix::diagonal(lam);
  return HermitianMatrix(detail::compose(detail::haar_unitary(dim, rng), lam));
}

struct PerturbedPair {
  HermitianMatrix base;
  HermitianMatrix perturbed;
  double perturbation_norm;  // schatten_norm(perturbed - base, p), as realized
  SchattenIndex p;

  Matrix difference() const { return perturbed.matrix() - base.matrix(); }
};

// (H, H + D) with D a rescaled GUE draw and ||D||_p = target.
inline PerturbedPair prescribed_perturbation(const HermitianMatrix& h, SchattenIndex p,
                                             double target, std::uint64_t seed) {
  if (!(target > 0) || !std::isfinite(target))
    throw ValidationError("prescribed_perturbation: target must be a positive finite number");
  std::mt19937_64 rng(seed);
  Matrix d = detail::gue_sample(h.dim(), rng);
  d *= target / schatten_norm(d, p);
  HermitianMatrix perturbed(detail::hermitize(h.matrix() + d));
  const double realized = schatten_norm(perturbed.matrix() - h.matrix(), p);
  return {h, std::move(perturbed), realized, p};
}

}  // namespace opint
