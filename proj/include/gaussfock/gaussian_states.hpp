#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include "errors.hpp"
#include "mode_tails.hpp"
#include "symplectic_core.hpp"

namespace gaussfock {

// A Gaussian state rho_g(w, S) on infinitely many modes, stored as a complex
// mean vector w supported on the first n modes, a real 2n x 2n covariance
// block S0 in momentum-position coordinates for those modes, and a diagonal
// parametric tail d_j for every mode beyond the block. The characteristic
// function is exp(-i Re<w,z> - 1/2 Re<z, Sz>).
class GaussianState {
 public:
  GaussianState(ComplexVector mean, RealBlockOperator cov,
                TailModel tail = TailModel::identity())
      : mean_(std::move(mean)), cov_(std::move(cov)), tail_(tail) {
    if (mean_.size() != cov_.modes())
      throw invalid_input_error("mean vector length must equal the block mode count");
    if (!mean_.allFinite()) throw invalid_input_error("mean vector has non-finite entries");
    if (cov_.modes() > 0) {
      Matrix sym = detail::require_symmetric(cov_.mat(), 1e-10);
      cov_ = RealBlockOperator(std::move(sym));
    }
  }

  const ComplexVector& mean() const { return mean_; }
  const RealBlockOperator& cov() const { return cov_; }
  const TailModel& tail() const { return tail_; }
  Eigen::Index modes() const { return cov_.modes(); }

 private:
  ComplexVector mean_;
  RealBlockOperator cov_;
  TailModel tail_;
};

struct ValidationReport {
  bool cond1_psd = false;
  double min_block_eigenvalue = 0.0;  // smallest eigenvalue of Hermitian S0 - iJ0
  bool cond2_hs = false;
  bool cond3_trace = false;
  double min_symplectic_eigenvalue = 0.0;
  // informational: trace norm of B^T B - I with B = sqrt(S0) J0 sqrt(S0);
  // finite blocks always have this finite, the binding constraints live in the tail
  double block_defect_trace_norm = 0.0;
  bool verdict = false;
};

struct ExtremePair {
  RealBlockOperator N;
  RealBlockOperator M;
};

struct SpectralLine {
  double value = 0.0;
  std::vector<int> occupation;
};

struct KernelReport {
  double min_eigenvalue = 0.0;
  bool positive = false;
};

inline GaussianState vacuum(Eigen::Index n, TailModel tail = TailModel::identity()) {
  if (n < 0) throw invalid_input_error("mode count must be >= 0");
  return GaussianState(ComplexVector::Zero(n), RealBlockOperator::Identity(static_cast<int>(n)),
                       tail);
}

inline GaussianState coherent_state(const ComplexVector& f) {
  const std::complex<double> minus_two_i(0.0, -2.0);
  return GaussianState(minus_two_i * f,
                       RealBlockOperator::Identity(static_cast<int>(f.size())));
}

// Convenience: mean-zero product state with covariance diag(d, d) on the block.
inline GaussianState thermal_state(const std::vector<double>& d,
                                   TailModel tail = TailModel::identity()) {
  const Eigen::Index n = static_cast<Eigen::Index>(d.size());
  Matrix S = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(d[static_cast<size_t>(j)] >= 1.0))
      throw invalid_input_error("thermal parameters must satisfy d >= 1");
    S(j, j) = d[static_cast<size_t>(j)];
    S(n + j, n + j) = d[static_cast<size_t>(j)];
  }
  return GaussianState(ComplexVector::Zero(n), RealBlockOperator(S), tail);
}

inline std::complex<double> characteristic_function(const GaussianState& state,
                                                    const ComplexVector& z) {
  if (!z.allFinite()) throw invalid_input_error("characteristic function argument has NaN/inf");
  const Eigen::Index n = state.modes();
  const Eigen::Index nb = std::min<Eigen::Index>(n, z.size());
  ComplexVector zb = ComplexVector::Zero(n);
  zb.head(nb) = z.head(nb);

  double quad = 0.0;
  if (n > 0) {
    const Vector zr = real_coords(zb);
    quad += zr.dot(state.cov().mat() * zr);
  }
  for (Eigen::Index k = n; k < z.size(); ++k)
    quad += tail_d(state.tail(), k - n + 1) * std::norm(z(k));

  const double phase = (n > 0) ? std::real(state.mean().dot(zb)) : 0.0;
  return std::exp(std::complex<double>(-0.5 * quad, -phase));
}

inline ValidationReport validate(const GaussianState& state, const Tolerances& tol = {}) {
  ValidationReport rep;
  const Eigen::Index n = state.modes();
  if (n > 0) {
    const Matrix& S = state.cov().mat();
    const auto es = detail::symmetric_eigen(S);
    const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    if (es.values.minCoeff() <= tol.positive * scale)
      throw not_positive_definite_error("covariance block is not positive definite");

    const auto unc = uncertainty_psd_check(state.cov(), tol.positive);
    rep.cond1_psd = unc.satisfied;
    rep.min_block_eigenvalue = unc.min_eigenvalue;

    const Vector d = symplectic_spectrum(state.cov(), tol);
    rep.min_symplectic_eigenvalue = d.minCoeff();

    const Matrix sqrtS = detail::sqrt_from_eigen(
        es, tol.positive, "covariance block is not positive definite");
    const Matrix B = sqrtS * standard_involution_matrix(static_cast<int>(n)) * sqrtS;
    const Matrix defect = B.transpose() * B - Matrix::Identity(2 * n, 2 * n);
    rep.block_defect_trace_norm = detail::symmetric_eigen(defect).values.cwiseAbs().sum();
  } else {
    rep.cond1_psd = true;
    rep.min_block_eigenvalue = 0.0;
    rep.min_symplectic_eigenvalue = 1.0;
  }
  const TailClassification cls = classify_tail(state.tail());
  rep.cond2_hs = cls.cond2_hilbert_schmidt;
  rep.cond3_trace = cls.cond3_trace_class;
  rep.verdict = rep.cond1_psd && rep.cond2_hs && rep.cond3_trace;
  return rep;
}

inline GaussianState displace(const GaussianState& state, const ComplexVector& alpha) {
  if (!alpha.allFinite()) throw invalid_input_error("displacement has non-finite entries");
  const Eigen::Index n = state.modes();
  for (Eigen::Index k = n; k < alpha.size(); ++k)
    if (std::abs(alpha(k)) != 0.0)
      throw displacement_error("displacement support must stay within the finite block");
  ComplexVector a = ComplexVector::Zero(n);
  a.head(std::min<Eigen::Index>(n, alpha.size())) =
      alpha.head(std::min<Eigen::Index>(n, alpha.size()));
  const std::complex<double> two_i(0.0, 2.0);
  return GaussianState(state.mean() - two_i * a, state.cov(), state.tail());
}

inline GaussianState shale_conjugate(const GaussianState& state, const RealBlockOperator& L,
                                     const Tolerances& tol = {}) {
  if (L.modes() != state.modes())
    throw invalid_input_error("symplectic block must act on the state's block modes");
  if (!is_symplectic(L, tol.symplectic))
    throw invalid_input_error("conjugation requires a symplectic block");
  const Eigen::Index n = state.modes();
  if (n == 0) return state;
  const Vector w_real = real_coords(state.mean());
  const ComplexVector new_mean = complex_coords(L.mat().transpose() * w_real);
  Matrix new_cov = L.mat().transpose() * state.cov().mat() * L.mat();
  return GaussianState(new_mean, RealBlockOperator(std::move(new_cov)), state.tail());
}

inline GaussianState tensor(const GaussianState& s1, const GaussianState& s2) {
  if (!s1.tail().trivial()) {
    if (s2.modes() == 0 && s2.tail().trivial()) return s1;
    throw composition_error(
        "tensor cannot interleave a nontrivial tail with further modes; "
        "only the second factor may carry a tail");
  }
  const Eigen::Index n1 = s1.modes();
  const Eigen::Index n2 = s2.modes();
  const Eigen::Index n = n1 + n2;
  ComplexVector mean(n);
  mean.head(n1) = s1.mean();
  mean.tail(n2) = s2.mean();
  Matrix S = Matrix::Zero(2 * n, 2 * n);
  const Matrix& A = s1.cov().mat();
  const Matrix& B = s2.cov().mat();
  // quadrant-wise direct sum: momentum coordinates of both states first
  S.block(0, 0, n1, n1) = A.block(0, 0, n1, n1);
  S.block(0, n, n1, n1) = A.block(0, n1, n1, n1);
  S.block(n, 0, n1, n1) = A.block(n1, 0, n1, n1);
  S.block(n, n, n1, n1) = A.block(n1, n1, n1, n1);
  S.block(n1, n1, n2, n2) = B.block(0, 0, n2, n2);
  S.block(n1, n + n1, n2, n2) = B.block(0, n2, n2, n2);
  S.block(n + n1, n1, n2, n2) = B.block(n2, 0, n2, n2);
  S.block(n + n1, n + n1, n2, n2) = B.block(n2, n2, n2, n2);
  return GaussianState(std::move(mean), RealBlockOperator(std::move(S)), s2.tail());
}

inline GaussianState marginal(const GaussianState& state, const std::vector<Eigen::Index>& modes) {
  if (modes.empty()) throw invalid_input_error("marginal needs a nonempty mode selection");
  const Eigen::Index n = state.modes();
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (Eigen::Index m : modes) {
    if (m < 0 || m >= n) throw invalid_input_error("marginal mode index out of range");
    if (seen[static_cast<size_t>(m)]) throw invalid_input_error("marginal mode index repeated");
    seen[static_cast<size_t>(m)] = true;
  }
  const Eigen::Index k = static_cast<Eigen::Index>(modes.size());
  ComplexVector mean(k);
  Matrix S(2 * k, 2 * k);
  const Matrix& A = state.cov().mat();
  for (Eigen::Index i = 0; i < k; ++i) {
    mean(i) = state.mean()(modes[static_cast<size_t>(i)]);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index a = modes[static_cast<size_t>(i)];
      const Eigen::Index b = modes[static_cast<size_t>(j)];
      S(i, j) = A(a, b);
      S(i, k + j) = A(a, n + b);
      S(k + i, j) = A(n + a, b);
      S(k + i, k + j) = A(n + a, n + b);
    }
  }
  return GaussianState(std::move(mean), RealBlockOperator(std::move(S)), state.tail());
}

inline GaussianState beam_splitter_mix(const GaussianState& s1, const GaussianState& s2,
                                       double theta, const Tolerances& tol = {}) {
  if (s1.modes() != s2.modes())
    throw invalid_input_error("beam splitter mixing needs equal mode counts");
  if (!s1.tail().trivial() || !s2.tail().trivial())
    throw composition_error("beam splitter mixing is defined for identity tails");
  if (s1.mean().cwiseAbs().maxCoeff() > 1e-12 || s2.mean().cwiseAbs().maxCoeff() > 1e-12)
    throw invalid_input_error("beam splitter mixing requires mean-zero states");
  if (!validate(s1, tol).verdict || !validate(s2, tol).verdict)
    throw validation_error("beam splitter mixing requires valid input states");
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2w = std::sin(theta) * std::sin(theta);
  Matrix S = c2 * s1.cov().mat() + s2w * s2.cov().mat();
  return GaussianState(ComplexVector::Zero(s1.modes()), RealBlockOperator(std::move(S)));
}

inline bool is_pure(const GaussianState& state, double tol = 1e-8) {
  const ValidationReport rep = validate(state);
  if (!rep.verdict) throw validation_error("purity is only defined for valid states");
  if (!state.tail().trivial()) return false;
  if (state.modes() == 0) return true;
  const Vector d = symplectic_spectrum(state.cov());
  return (d.array() - 1.0).abs().maxCoeff() <= tol;
}

inline ExtremePair extreme_decompose(const GaussianState& state, const Tolerances& tol = {}) {
  if (!state.tail().trivial())
    throw invalid_input_error("extreme decomposition needs an identity tail");
  if (!validate(state, tol).verdict)
    throw validation_error("extreme decomposition needs a valid state");
  const Eigen::Index n = state.modes();
  const auto wd = williamson(state.cov(), tol);
  Vector sq1(2 * n), sq2(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = std::max(1.0, wd.d(j));
    // sqrt(d^2 - 1) amplifies eigenvalue roundoff eps to sqrt(eps), so a
    // numerically pure mode must be snapped to d = 1 exactly for the
    // pure-state identity N^T N = M^T M = S0 to hold at full precision
    const double root = (d - 1.0 <= 1e-8) ? 0.0 : std::sqrt(d * d - 1.0);
    const double p1 = d + root;
    const double p2 = d - root;
    sq1(j) = std::sqrt(p1);
    sq1(n + j) = 1.0 / std::sqrt(p1);
    sq2(j) = std::sqrt(p2);
    sq2(n + j) = 1.0 / std::sqrt(p2);
  }
  Matrix N = sq1.asDiagonal() * wd.L.mat();
  Matrix M = sq2.asDiagonal() * wd.L.mat();
  return {RealBlockOperator(std::move(N)), RealBlockOperator(std::move(M))};
}

inline GaussianState purify(const GaussianState& state, const Tolerances& tol = {}) {
  if (!state.tail().trivial())
    throw invalid_input_error("purification needs an identity tail");
  if (state.modes() > 0 && state.mean().cwiseAbs().maxCoeff() > 1e-12)
    throw invalid_input_error("purification requires a mean-zero state; displace first");
  if (!validate(state, tol).verdict)
    throw validation_error("purification needs a valid state");
  const Eigen::Index n = state.modes();
  if (n == 0) return state;
  const auto wd = williamson(state.cov(), tol);

  // two-mode squeezing of each block mode j with its ancilla n+j:
  // cosh(2r_j) = d_j reproduces diag(d, d) after tracing the ancilla
  Matrix Mpp = Matrix::Zero(2 * n, 2 * n);
  Matrix Mqq = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = std::max(1.0, wd.d(j));
    const double c = std::sqrt((d + 1.0) / 2.0);
    const double s = std::sqrt((d - 1.0) / 2.0);
    Mpp(j, j) = c;
    Mpp(j, n + j) = s;
    Mpp(n + j, j) = s;
    Mpp(n + j, n + j) = c;
    Mqq(j, j) = c;
    Mqq(j, n + j) = -s;
    Mqq(n + j, j) = -s;
    Mqq(n + j, n + j) = c;
  }
  Matrix C = Matrix::Zero(4 * n, 4 * n);
  C.block(0, 0, 2 * n, 2 * n) = Mpp.transpose() * Mpp;
  C.block(2 * n, 2 * n, 2 * n, 2 * n) = Mqq.transpose() * Mqq;

  // embed L on the original modes, identity on the ancillas
  const Matrix& L = wd.L.mat();
  Matrix E = Matrix::Identity(4 * n, 4 * n);
  E.block(0, 0, n, n) = L.block(0, 0, n, n);
  E.block(0, 2 * n, n, n) = L.block(0, n, n, n);
  E.block(2 * n, 0, n, n) = L.block(n, 0, n, n);
  E.block(2 * n, 2 * n, n, n) = L.block(n, n, n, n);

  Matrix S = E.transpose() * C * E;
  return GaussianState(ComplexVector::Zero(2 * n), RealBlockOperator(std::move(S)));
}

inline std::vector<SpectralLine> spectrum(const GaussianState& state, int top_k,
                                          const Tolerances& tol = {}) {
  if (top_k < 1) throw invalid_input_error("spectrum needs top_k >= 1");
  const ValidationReport rep = validate(state, tol);
  if (!rep.cond3_trace)
    throw no_density_matrix_error("divergent tail: the state is not trace class");
  if (!rep.verdict) throw validation_error("spectrum needs a valid state");

  const Eigen::Index n = state.modes();
  std::vector<double> q;  // e^{-s_j} per excitable normal mode, descending d
  if (n > 0) {
    const Vector d = symplectic_spectrum(state.cov(), tol);
    for (Eigen::Index j = 0; j < n; ++j)
      if (d(j) > 1.0 + 1e-12) q.push_back((d(j) - 1.0) / (d(j) + 1.0));
  }
  double log_p = tail_log_trace_factor(state.tail());
  for (double qj : q) log_p += std::log1p(-qj);
  const double p = std::exp(log_p);
  const int m = static_cast<int>(q.size());

  struct Node {
    double value;
    std::vector<int> occ;
    int last;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.value != b.value) return a.value < b.value;
    return std::lexicographical_compare(b.occ.begin(), b.occ.end(), a.occ.begin(), a.occ.end());
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> heap(worse);
  heap.push({p, std::vector<int>(static_cast<size_t>(m), 0), 0});

  std::vector<SpectralLine> out;
  while (!heap.empty() && static_cast<int>(out.size()) < top_k) {
    Node top = heap.top();
    heap.pop();
    std::vector<int> full(static_cast<size_t>(n), 0);
    std::copy(top.occ.begin(), top.occ.end(), full.begin());
    out.push_back({top.value, std::move(full)});
    for (int i = top.last; i < m; ++i) {
      Node child{p, top.occ, i};
      child.occ[static_cast<size_t>(i)] += 1;
      for (int j = 0; j <= i; ++j)
        child.value *= std::pow(q[static_cast<size_t>(j)], child.occ[static_cast<size_t>(j)]);
      heap.push(std::move(child));
    }
  }
  return out;
}

inline KernelReport kernel_psd_check(const GaussianState& state,
                                     const std::vector<ComplexVector>& points,
                                     double tol = 1e-9) {
  if (points.empty()) throw invalid_input_error("kernel check needs at least one point");
  Eigen::Index len = 0;
  for (const auto& z : points) len = std::max(len, z.size());
  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  std::vector<ComplexVector> zs(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    zs[i] = ComplexVector::Zero(len);
    zs[i].head(points[i].size()) = points[i];
  }
  ComplexMatrix K(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double phase = std::imag(zs[static_cast<size_t>(i)].dot(zs[static_cast<size_t>(j)]));
      K(i, j) = std::exp(std::complex<double>(0.0, phase)) *
                characteristic_function(state, zs[static_cast<size_t>(j)] - zs[static_cast<size_t>(i)]);
    }
  ComplexMatrix H = 0.5 * (K + K.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  if (es.info() != Eigen::Success) throw degeneracy_error("kernel eigensolve failed");
  KernelReport rep;
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.positive = rep.min_eigenvalue >= -tol;
  return rep;
}

inline GaussianState apply_gaussian_symmetry(const GaussianState& state,
                                             const ComplexVector& alpha,
                                             const RealBlockOperator& L,
                                             const Tolerances& tol = {}) {
  if (L.modes() != state.modes())
    throw invalid_input_error("symmetry block must act on the state's block modes");
  if (!is_symplectic(L, tol.symplectic))
    throw invalid_input_error("gaussian symmetry requires a symplectic block");
  const Eigen::Index n = state.modes();
  if (n == 0) return displace(state, alpha);
  const Matrix J = standard_involution_matrix(static_cast<int>(n));
  Matrix Linv = -J * L.mat().transpose() * J;
  return displace(shale_conjugate(state, RealBlockOperator(std::move(Linv)), tol), alpha);
}

struct MeanVectors {
  Vector momentum;  // l
  Vector position;  // m
};

inline MeanVectors mean_momentum_position(const GaussianState& state) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  MeanVectors mv;
  mv.momentum = state.mean().real() * inv_sqrt2;
  mv.position = -state.mean().imag() * inv_sqrt2;
  return mv;
}

}  // namespace gaussfock
