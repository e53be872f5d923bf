#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace gaussfock {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Tolerances used by the decompositions. `symmetric` and `positive` are
// relative to the largest entry scale of the input, `pairing` controls
// eigenvalue pair matching and clustering, `symplectic` and `reconstruction`
// bound the max-entry defects of the returned factors, and `gate` is the
// acceptance width for symplectic inputs.
struct Tolerances {
  double symmetric = 1e-10;
  double positive = 1e-10;
  double pairing = 1e-8;
  double symplectic = 1e-9;
  double reconstruction = 1e-9;
  double gate = 1e-8;
};

// Real 2n x 2n matrix acting on stacked momentum-position coordinates.
// A complex vector z = x + iy is identified with (x, y) in R^2n, so the
// first n coordinates carry the real (momentum) part and the last n the
// imaginary (position) part.
class RealBlockOperator {
 public:
  RealBlockOperator() : mat_(Matrix::Zero(0, 0)) {}

  explicit RealBlockOperator(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols())
      throw invalid_input_error("block operator must be square");
    if (mat_.rows() % 2 != 0)
      throw invalid_input_error("block operator dimension must be even");
    if (mat_.size() > 0 && !mat_.allFinite())
      throw invalid_input_error("block operator entries must be finite");
  }

  static RealBlockOperator Identity(int modes) {
    if (modes < 0) throw invalid_input_error("negative mode count");
    return RealBlockOperator(Matrix::Identity(2 * modes, 2 * modes));
  }

  int modes() const { return static_cast<int>(mat_.rows()) / 2; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }

 private:
  Matrix mat_;
};

// J0 = [[0, I], [-I, 0]], the block form of multiplication by -i.
inline Matrix standard_involution_matrix(int n) {
  if (n <= 0) throw invalid_input_error("standard involution needs at least one mode");
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

inline RealBlockOperator standard_involution(int n) {
  return RealBlockOperator(standard_involution_matrix(n));
}

// (x, y) <-> x + iy coordinate maps.
inline Vector real_coords(const ComplexVector& z) {
  Vector v(2 * z.size());
  v.head(z.size()) = z.real();
  v.tail(z.size()) = z.imag();
  return v;
}

inline ComplexVector complex_coords(const Vector& v) {
  if (v.size() % 2 != 0)
    throw invalid_input_error("real coordinate vector must have even length");
  const auto n = v.size() / 2;
  ComplexVector z(n);
  z.real() = v.head(n);
  z.imag() = v.tail(n);
  return z;
}

// A complex-linear map u acts on (x, y) as [[Re u, -Im u], [Im u, Re u]].
inline Matrix block_from_unitary(const ComplexMatrix& u) {
  const auto n = u.rows();
  if (u.cols() != n) throw invalid_input_error("unitary block must be square");
  Matrix r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = u.real();
  r.topRightCorner(n, n) = -u.imag();
  r.bottomLeftCorner(n, n) = u.imag();
  r.bottomRightCorner(n, n) = u.real();
  return r;
}

inline ComplexMatrix unitary_from_block(const Matrix& r) {
  if (r.rows() != r.cols() || r.rows() % 2 != 0)
    throw invalid_input_error("expected a square even-dimensional block matrix");
  const auto n = r.rows() / 2;
  ComplexMatrix u(n, n);
  u.real() = r.topLeftCorner(n, n);
  u.imag() = -r.topRightCorner(n, n);
  return u;
}

namespace detail {

inline double entry_scale(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Symmetry gate: rejects input whose asymmetric part exceeds the tolerance,
// then works with the symmetrized matrix.
inline Matrix require_symmetric(const Matrix& s, double rel_tol) {
  const double scale = std::max(1.0, entry_scale(s));
  const double defect = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (defect > rel_tol * scale)
    throw invalid_input_error("matrix is not symmetric within tolerance");
  return 0.5 * (s + s.transpose());
}

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

inline SymmetricEigen symmetric_eigen(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success)
    throw degeneracy_error("symmetric eigendecomposition failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Matrix sqrt_from_eigen(const SymmetricEigen& eig, double pd_tol,
                              const char* what) {
  const double scale = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0 || eig.values.minCoeff() <= pd_tol * scale)
    throw not_positive_definite_error(what);
  Matrix root = eig.vectors * eig.values.cwiseSqrt().asDiagonal() *
                eig.vectors.transpose();
  return 0.5 * (root + root.transpose());
}

}  // namespace detail

// Principal square root of a symmetric positive definite block.
inline RealBlockOperator principal_sqrt(const RealBlockOperator& S,
                                        const Tolerances& tol = {}) {
  if (S.modes() == 0) return RealBlockOperator();
  const Matrix sym = detail::require_symmetric(S.mat(), tol.symmetric);
  const auto eig = detail::symmetric_eigen(sym);
  return RealBlockOperator(detail::sqrt_from_eigen(
      eig, tol.positive, "principal square root requires a positive definite matrix"));
}

inline double symplectic_defect(const RealBlockOperator& L) {
  const int n = L.modes();
  if (n == 0) return 0.0;
  const Matrix j = standard_involution_matrix(n);
  return (L.mat().transpose() * j * L.mat() - j).cwiseAbs().maxCoeff();
}

inline bool is_symplectic(const RealBlockOperator& L, double tol = 1e-9) {
  return symplectic_defect(L) <= tol;
}

// Frobenius norm of L^T L - I, the finite-block Shale quantity.
inline double shale_defect(const RealBlockOperator& L) {
  const int dim = L.dim();
  return (L.mat().transpose() * L.mat() - Matrix::Identity(dim, dim)).norm();
}

struct UncertaintyReport {
  bool satisfied = false;
  double min_eigenvalue = 0.0;
};

// Minimum eigenvalue of the complex Hermitian matrix S0 - i J0; the state
// uncertainty relation holds iff it is nonnegative.
inline UncertaintyReport uncertainty_psd_check(const RealBlockOperator& S,
                                               double tol = 1e-10) {
  const int n = S.modes();
  if (n == 0) return {true, 0.0};
  const Matrix sym = detail::require_symmetric(S.mat(), tol);
  ComplexMatrix m = sym.cast<std::complex<double>>();
  m -= std::complex<double>(0.0, 1.0) *
       standard_involution_matrix(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw degeneracy_error("Hermitian eigendecomposition failed to converge");
  const double min_eig = es.eigenvalues().minCoeff();
  return {min_eig >= -tol, min_eig};
}

struct WilliamsonDecomposition {
  RealBlockOperator L;  // symplectic, S0 = L^T diag(d, d) L
  Vector d;             // symplectic eigenvalues, descending
};

// Williamson normal form of an SPD covariance block. The skew form
// B0 = S0^{1/2} J0 S0^{1/2} is reduced to the canonical block
// Gamma^T B0 Gamma = [[0, P], [-P, 0]] (the sign pattern of J0, which is
// what makes L = diag(P,P)^{-1/2} Gamma^T S0^{1/2} symplectic rather than
// anti-symplectic), with Gamma assembled from the real and imaginary parts
// of the positive-eigenvalue eigenvectors of the Hermitian matrix i B0.
inline WilliamsonDecomposition williamson(const RealBlockOperator& S,
                                          const Tolerances& tol = {}) {
  const int n = S.modes();
  if (n == 0) return {RealBlockOperator(), Vector()};

  const Matrix sym = detail::require_symmetric(S.mat(), tol.symmetric);
  const auto eig = detail::symmetric_eigen(sym);
  const Matrix sqrt_s = detail::sqrt_from_eigen(
      eig, tol.positive, "williamson requires a positive definite covariance block");

  const Matrix j = standard_involution_matrix(n);
  Matrix b = sqrt_s * j * sqrt_s;
  b = 0.5 * (b - b.transpose());

  ComplexMatrix ib = std::complex<double>(0.0, 1.0) * b.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> hes(ib);
  if (hes.info() != Eigen::Success)
    throw degeneracy_error("eigendecomposition of the skew form failed to converge");

  const Vector lam = hes.eigenvalues();  // ascending, -d_max .. d_max
  const double scale = lam.cwiseAbs().maxCoeff();
  for (int k = 0; k < n; ++k) {
    if (std::abs(lam(k) + lam(2 * n - 1 - k)) > tol.pairing * scale)
      throw degeneracy_error("failed to pair the +/- symplectic eigenvalues");
  }
  if (lam(n) <= 0.0)
    throw degeneracy_error("skew form has a nonpositive paired eigenvalue");

  // Positive eigenpairs in descending order. Within a degeneracy cluster the
  // solver already returns an orthonormal set; re-orthonormalize defensively
  // so cluster roundoff cannot leak into Gamma.
  std::vector<int> order;
  for (int idx = 2 * n - 1; idx >= n; --idx) order.push_back(idx);
  ComplexMatrix pos(2 * n, n);
  Vector d(n);
  for (int k = 0; k < n; ++k) {
    pos.col(k) = hes.eigenvectors().col(order[k]);
    d(k) = lam(order[k]);
  }
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && d(start) - d(stop) <= tol.pairing * scale) ++stop;
    for (int c = start; c < stop; ++c) {
      for (int p = start; p < c; ++p)
        pos.col(c) -= pos.col(p).dot(pos.col(c)) * pos.col(p);
      const double nrm = pos.col(c).norm();
      if (nrm < 0.5) throw degeneracy_error("degenerate cluster collapsed");
      pos.col(c) /= nrm;
    }
    start = stop;
  }

  Matrix gamma(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    Vector u = pos.col(k).real();
    Vector w = pos.col(k).imag();
    // For i B0 v = d v the real pair satisfies B0 u = d w, B0 w = -d u, so
    // (w | u) columns produce the +P upper-right block.
    gamma.col(k) = w / w.norm();
    gamma.col(n + k) = u / u.norm();
  }

  Vector dinv_sqrt = d.cwiseSqrt().cwiseInverse();
  Vector pref(2 * n);
  pref.head(n) = dinv_sqrt;
  pref.tail(n) = dinv_sqrt;
  Matrix l = pref.asDiagonal() * gamma.transpose() * sqrt_s;

  WilliamsonDecomposition out{RealBlockOperator(std::move(l)), std::move(d)};

  const double sdef = symplectic_defect(out.L);
  Vector dd(2 * n);
  dd.head(n) = out.d;
  dd.tail(n) = out.d;
  const double rdef = (out.L.mat().transpose() * dd.asDiagonal() * out.L.mat() - sym)
                          .cwiseAbs()
                          .maxCoeff();
  const double rscale = std::max(1.0, detail::entry_scale(sym));
  if (sdef > tol.symplectic || rdef > tol.reconstruction * rscale)
    throw degeneracy_error("williamson factor failed its invariants");
  return out;
}

// Symplectic eigenvalues by an independent route: moduli of the eigenvalues
// of i J0 S0, which come in +/- pairs, deduplicated and sorted descending.
inline Vector symplectic_spectrum(const RealBlockOperator& S,
                                  const Tolerances& tol = {}) {
  const int n = S.modes();
  if (n == 0) return Vector();
  const Matrix sym = detail::require_symmetric(S.mat(), tol.symmetric);
  const auto eig = detail::symmetric_eigen(sym);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  if (scale == 0.0 || eig.values.minCoeff() <= tol.positive * scale)
    throw not_positive_definite_error(
        "symplectic spectrum requires a positive definite covariance block");

  Eigen::EigenSolver<Matrix> es(standard_involution_matrix(n) * sym);
  if (es.info() != Eigen::Success)
    throw degeneracy_error("eigendecomposition of J0 S0 failed to converge");
  std::vector<double> moduli(2 * n);
  for (int k = 0; k < 2 * n; ++k) moduli[k] = std::abs(es.eigenvalues()(k));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  Vector d(n);
  for (int k = 0; k < n; ++k) {
    if (std::abs(moduli[2 * k] - moduli[2 * k + 1]) > tol.pairing * std::max(1.0, scale))
      throw degeneracy_error("eigenvalue moduli of J0 S0 failed to pair");
    d(k) = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
  }
  return d;
}

struct SymplecticFactors {
  RealBlockOperator U;  // orthogonal and symplectic
  Vector a;             // diagonal scale, a_j >= 1, descending
  RealBlockOperator V;  // orthogonal and symplectic
};

namespace detail {

// Builds, inside a J-invariant subspace spanned by the orthonormal columns
// of `basis`, half a symplectic-orthonormal basis: k columns v with
// {v_1..v_k, -J v_1..-J v_k} orthonormal.
inline Matrix symplectic_half_basis(const Matrix& basis, const Matrix& j) {
  const auto dim = basis.rows();
  const auto count = basis.cols();
  if (count % 2 != 0)
    throw degeneracy_error("unit eigenvalue cluster has odd multiplicity");
  Matrix remaining = basis;
  Matrix half(dim, count / 2);
  for (int k = 0; k < count / 2; ++k) {
    Vector v = remaining.col(0);
    v.normalize();
    half.col(k) = v;
    if (remaining.cols() == 2) break;
    Vector jv = j * v;
    // Project {v, Jv} out of the remaining spanning set, then compress it
    // to an orthonormal basis of the complement (rank drops by exactly two).
    Matrix next = remaining - v * (v.transpose() * remaining) -
                  jv * (jv.transpose() * remaining);
    Eigen::ColPivHouseholderQR<Matrix> qr(next);
    const auto rank = remaining.cols() - 2;
    remaining = qr.householderQ() * Matrix::Identity(dim, rank);
  }
  return half;
}

}  // namespace detail

// Factors a symplectic L as U diag(a, a^{-1}) V with U, V orthogonal and
// symplectic, via the polar decomposition L = Q H and a symplectic
// eigenbasis of the positive symplectic factor H.
inline SymplecticFactors decompose_symplectic(const RealBlockOperator& L,
                                              const Tolerances& tol = {}) {
  const int n = L.modes();
  if (n == 0) return {RealBlockOperator(), Vector(), RealBlockOperator()};
  const double lscale = std::max(1.0, detail::entry_scale(L.mat()));
  if (symplectic_defect(L) > tol.gate * lscale * lscale)
    throw invalid_input_error("decompose_symplectic requires a symplectic input");

  const Matrix j = standard_involution_matrix(n);
  Matrix h2 = L.mat().transpose() * L.mat();
  h2 = 0.5 * (h2 + h2.transpose());
  const auto eig2 = detail::symmetric_eigen(h2);
  const Matrix h = detail::sqrt_from_eigen(eig2, tol.positive,
                                           "polar factor lost positivity");
  const auto eig = detail::symmetric_eigen(h);
  const Vector mu = eig.values;
  const Matrix x = eig.vectors;

  const double one_width = tol.pairing * std::max(1.0, mu.cwiseAbs().maxCoeff());

  // Split eigenpairs into the unit cluster and the mu > 1 clusters; the
  // mu < 1 half is reached as -J times the mu > 1 half.
  std::vector<int> above, unit;
  for (int k = 2 * n - 1; k >= 0; --k) {
    if (std::abs(mu(k) - 1.0) <= one_width)
      unit.push_back(k);
    else if (mu(k) > 1.0)
      above.push_back(k);  // descending since mu is ascending
  }
  if (static_cast<int>(unit.size() + 2 * above.size()) != 2 * n)
    throw degeneracy_error("eigenvalues of the polar factor failed to pair");

  Matrix v1(2 * n, n);
  Vector a(n);
  for (size_t k = 0; k < above.size(); ++k) {
    v1.col(static_cast<int>(k)) = x.col(above[k]);
    a(static_cast<int>(k)) = mu(above[k]);
  }
  if (!unit.empty()) {
    Matrix basis(2 * n, static_cast<int>(unit.size()));
    for (size_t k = 0; k < unit.size(); ++k) basis.col(static_cast<int>(k)) = x.col(unit[k]);
    const Matrix half = detail::symplectic_half_basis(basis, j);
    v1.rightCols(half.cols()) = half;
    a.tail(half.cols()).setOnes();
  }

  Matrix w(2 * n, 2 * n);
  w.leftCols(n) = v1;
  w.rightCols(n) = -j * v1;

  // Q = L H^{-1} through the eigenbasis of H.
  const Matrix hinv = eig.vectors * mu.cwiseInverse().asDiagonal() * eig.vectors.transpose();
  const Matrix q = L.mat() * hinv;

  SymplecticFactors out{RealBlockOperator(q * w), a, RealBlockOperator(w.transpose())};

  Vector t(2 * n);
  t.head(n) = a;
  t.tail(n) = a.cwiseInverse();
  const double rdef = (out.U.mat() * t.asDiagonal() * out.V.mat() - L.mat())
                          .cwiseAbs()
                          .maxCoeff();
  const double odef = std::max(
      (out.U.mat().transpose() * out.U.mat() - Matrix::Identity(2 * n, 2 * n))
          .cwiseAbs()
          .maxCoeff(),
      (out.V.mat().transpose() * out.V.mat() - Matrix::Identity(2 * n, 2 * n))
          .cwiseAbs()
          .maxCoeff());
  if (rdef > tol.reconstruction * lscale * 100 || odef > tol.symplectic * 100 ||
      symplectic_defect(out.U) > tol.symplectic * 100 ||
      symplectic_defect(out.V) > tol.symplectic * 100)
    throw degeneracy_error("symplectic factorization failed its invariants");
  return out;
}

}  // namespace gaussfock
