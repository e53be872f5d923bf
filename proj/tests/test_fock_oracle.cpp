#include <catch2/catch_amalgamated.hpp>

#include <gaussfock/fock_oracle.hpp>

#include "test_helpers.hpp"

#include <cmath>

using namespace gaussfock;
using gaussfock::testing::random_complex_vector;
using gaussfock::testing::random_unitary;
using Catch::Approx;

namespace {

FockBasisSpec spec1(int cutoff) { return FockBasisSpec{{cutoff}, 1L << 40}; }

}  // namespace

TEST_CASE("basis bookkeeping", "[fock_oracle]") {
  FockBasisSpec spec{{2, 3}, 4096};
  CHECK(spec.modes() == 2);
  CHECK(spec.dim() == 6);
  CHECK(decode_occupation(spec, 0) == std::vector<int>{0, 0});
  CHECK(decode_occupation(spec, 1) == std::vector<int>{0, 1});
  CHECK(decode_occupation(spec, 2) == std::vector<int>{0, 2});
  CHECK(decode_occupation(spec, 3) == std::vector<int>{1, 0});
  for (long idx = 0; idx < 6; ++idx)
    CHECK(encode_occupation(spec, decode_occupation(spec, idx)) == idx);
  CHECK_THROWS_AS(encode_occupation(spec, {0, 3}), invalid_input_error);
  CHECK_THROWS_AS(encode_occupation(spec, {0}), invalid_input_error);

  FockBasisSpec tiny{{1}, 4096};
  CHECK_THROWS_AS(tiny.dim(), invalid_input_error);
  FockBasisSpec big{{100, 100}, 4096};
  CHECK_THROWS_AS(big.dim(), capacity_error);
}

TEST_CASE("ladder operators", "[fock_oracle]") {
  const auto [a, adag] = ladder(2);
  CHECK(a(0, 1) == std::complex<double>(1.0, 0.0));
  CHECK(a(0, 0) == std::complex<double>(0.0, 0.0));
  CHECK(a(1, 0) == std::complex<double>(0.0, 0.0));
  CHECK(a(1, 1) == std::complex<double>(0.0, 0.0));
  CHECK((adag - a.adjoint()).norm() == 0.0);

  // number operator and the truncation corner of [a, a^dag]
  const auto [a4, adag4] = ladder(4);
  const ComplexMatrix num = adag4 * a4;
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(num(k, k) - static_cast<double>(k)) < 1e-14);
  const ComplexMatrix comm = a4 * adag4 - adag4 * a4;
  for (int k = 0; k < 3; ++k) CHECK(std::abs(comm(k, k) - 1.0) < 1e-14);
  CHECK(std::abs(comm(3, 3) - (-3.0)) < 1e-14);

  CHECK_THROWS_AS(ladder(1), invalid_input_error);
}

TEST_CASE("quadratures", "[fock_oracle]") {
  const auto [q, p] = quadratures(5);
  CHECK((q - q.adjoint()).norm() < 1e-15);
  CHECK((p - p.adjoint()).norm() < 1e-15);
  CHECK(std::abs(q(0, 1) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(p(1, 0) - std::complex<double>(0.0, 1.0 / std::sqrt(2.0))) < 1e-15);
  // [q, p] = i away from the truncation corner
  const ComplexMatrix comm = q * p - p * q;
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(comm(k, k) - std::complex<double>(0.0, 1.0)) < 1e-14);
  CHECK(std::abs(comm(4, 4) - std::complex<double>(0.0, -4.0)) < 1e-13);
}

TEST_CASE("weyl operator basics", "[fock_oracle]") {
  const auto spec = spec1(30);
  ComplexVector z(1);
  z(0) = std::complex<double>(0.3, 0.4);
  const DenseOperator w = weyl_matrix(spec, z);
  // vacuum expectation exp(-|z|^2/2)
  CHECK(std::abs(w(0, 0) - std::exp(-0.125)) < 1e-12);
  // unitary, W(0) = I, W(z)^* = W(-z)
  CHECK((w.adjoint() * w - DenseOperator::Identity(30, 30)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((weyl_matrix(spec, ComplexVector::Zero(1)) - DenseOperator::Identity(30, 30))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
  CHECK((w.adjoint() - weyl_matrix(spec, ComplexVector(-z))).cwiseAbs().maxCoeff() <
        1e-12);

  CHECK_THROWS_AS(weyl_matrix(spec, ComplexVector::Zero(2)), invalid_input_error);
}

TEST_CASE("weyl composition rule", "[fock_oracle]") {
  const auto spec = spec1(40);
  std::mt19937_64 rng(301);
  double worst = 0.0;
  for (int t = 0; t < 6; ++t) {
    const ComplexVector f = random_complex_vector(rng, 1);
    const ComplexVector g = random_complex_vector(rng, 1);
    worst = std::max(worst, weyl_relation_residual(spec, f, g));
  }
  // the non-commuting worst case: orthogonal phase-space directions
  ComplexVector f(1), g(1);
  f(0) = 1.0;
  g(0) = std::complex<double>(0.0, 1.0);
  worst = std::max(worst, weyl_relation_residual(spec, f, g));
  CHECK(worst < 1e-9);

  // two-mode sanity at a smaller cutoff
  FockBasisSpec spec2{{22, 22}, 1L << 40};
  ComplexVector f2(2), g2(2);
  f2 << std::complex<double>(0.5, 0.3), std::complex<double>(-0.2, 0.6);
  g2 << std::complex<double>(-0.4, 0.1), std::complex<double>(0.3, -0.5);
  CHECK(weyl_relation_residual(spec2, f2, g2) < 1e-9);
}

TEST_CASE("exponential vectors", "[fock_oracle]") {
  const auto spec = spec1(40);
  CHECK((exponential_vector(spec, ComplexVector::Zero(1)) -
         ComplexVector::Unit(40, 0))
            .norm() == 0.0);

  ComplexVector f(1), g(1);
  f(0) = std::complex<double>(0.6, 0.2);
  g(0) = std::complex<double>(-0.3, 0.5);
  const ComplexVector ef = exponential_vector(spec, f);
  const ComplexVector eg = exponential_vector(spec, g);
  // <e(f), e(g)> = exp(<f, g>), inner products conjugate-linear on the left
  const std::complex<double> ip = ef.dot(eg);
  CHECK(std::abs(ip - std::exp(f.dot(g))) < 1e-12);

  // W(f) e(g) = exp(-|f|^2/2 - <f, g>) e(f + g)
  const DenseOperator w = weyl_matrix(spec, f);
  const std::complex<double> scale =
      std::exp(std::complex<double>(-0.5 * f.squaredNorm(), 0.0) - f.dot(g));
  const ComplexVector rhs = scale * exponential_vector(spec, ComplexVector(f + g));
  CHECK((w * eg - rhs).norm() < 1e-9);
}

TEST_CASE("thermal densities", "[fock_oracle]") {
  const auto spec = spec1(30);
  Vector s(1);
  s(0) = std::log(2.0);
  const ThermalDensity td = thermal_density(spec, s);
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(td.rho(k, k) - 0.5 * std::pow(0.5, k)) < 1e-15);
  CHECK(td.trace_deficit == Approx(std::pow(2.0, -30)).epsilon(1e-12));
  CHECK(std::abs(td.rho.trace() - (1.0 - td.trace_deficit)) < 1e-14);

  const Vector top = oracle_spectrum(td.rho, 5);
  for (int k = 0; k < 5; ++k)
    CHECK(top(k) == Approx(0.5 * std::pow(0.5, k)).epsilon(1e-12));

  Vector bad(1);
  bad(0) = 0.0;
  CHECK_THROWS_AS(thermal_density(spec, bad), invalid_input_error);
}

TEST_CASE("second quantization of contractions and unitaries", "[fock_oracle]") {
  const auto spec = spec1(30);
  ComplexVector lam(1);
  lam(0) = std::complex<double>(0.6, 0.3);
  ComplexVector f(1);
  f(0) = std::complex<double>(0.8, -0.1);
  const DenseOperator gam = second_quantize_diag(spec, lam);
  const ComplexVector lf = lam(0) * f;
  CHECK((gam * exponential_vector(spec, f) - exponential_vector(spec, lf)).norm() <
        1e-10);

  ComplexVector too_big(1);
  too_big(0) = 1.5;
  CHECK_THROWS_AS(second_quantize_diag(spec, too_big), invalid_input_error);

  // a one-mode unitary is a phase: both constructions must agree
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, 0.7));
  ComplexMatrix u1(1, 1);
  u1(0, 0) = phase;
  ComplexVector lphase(1);
  lphase(0) = phase;
  CHECK((second_quantize_unitary(spec, u1) - second_quantize_diag(spec, lphase))
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  // two-mode rotation moves exponential vectors to e(u f); the rotation can
  // concentrate the whole vector into one mode, so keep the coherent
  // amplitude small enough that the per-mode tail past the cutoff stays
  // well under the tolerance
  std::mt19937_64 rng(302);
  FockBasisSpec spec2{{14, 14}, 1L << 40};
  const ComplexMatrix u = random_unitary(rng, 2);
  const DenseOperator gu = second_quantize_unitary(spec2, u);
  const ComplexVector f2 = random_complex_vector(rng, 2, 0.3);
  const ComplexVector uf = u * f2;
  CHECK((gu * exponential_vector(spec2, f2) - exponential_vector(spec2, uf)).norm() <
        1e-8);
  // number-conserving, hence vacuum-preserving
  CHECK(std::abs(gu(0, 0) - 1.0) < 1e-10);

  CHECK_THROWS_AS(second_quantize_unitary(spec2, 2.0 * ComplexMatrix::Identity(2, 2)),
                  invalid_input_error);
}

TEST_CASE("squeeze operator", "[fock_oracle]") {
  const DenseOperator s = squeeze_matrix(40, 0.5);
  CHECK(std::abs(s(0, 0) - 1.0 / std::sqrt(std::cosh(0.5))) < 1e-12);
  CHECK((s.adjoint() * s - DenseOperator::Identity(40, 40)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((squeeze_matrix(40, -0.5) - s.adjoint()).cwiseAbs().maxCoeff() < 1e-11);
  CHECK_THROWS_AS(squeeze_matrix(40, 2.0), invalid_input_error);

  // conjugation acts on displacement arguments by the squeeze map
  const std::vector<std::complex<double>> real_us{0.25, 0.5, 0.75, 1.0, -0.6};
  CHECK(verify_shale_action(40, 0.5, real_us) < 1e-5);
  const std::vector<std::complex<double>> mixed_us{{1.0, 0.0},
                                                   {0.0, 1.0},
                                                   {0.7, 0.7},
                                                   {-0.5, 0.3},
                                                   {0.2, -0.9}};
  CHECK(verify_shale_action(60, 0.5, mixed_us) < 1e-5);
}

TEST_CASE("oracle agrees with the closed-form characteristic function",
          "[fock_oracle]") {
  std::mt19937_64 rng(303);
  std::vector<ComplexVector> samples;
  for (int t = 0; t < 12; ++t) samples.push_back(random_complex_vector(rng, 1, 0.7));

  // vacuum
  const OracleReport vac = verify_gaussian(vacuum(1), spec1(25), samples, 1e-8);
  CHECK(vac.pass);
  CHECK(vac.max_abs_deviation < 1e-10);
  CHECK(vac.trace_deficit < 1e-10);

  // thermal, d = 3
  const OracleReport th = verify_gaussian(thermal_state({3.0}), spec1(40), samples, 1e-6);
  CHECK(th.pass);
  CHECK(th.max_abs_deviation < 1e-8);

  // displaced squeezed state: S = L^T L with L = diag(e^r, e^-r), mean -2i alpha
  Matrix L(2, 2);
  L << std::exp(0.5), 0.0, 0.0, std::exp(-0.5);
  Matrix S = L.transpose() * L;
  ComplexVector alpha(1);
  alpha(0) = 0.3;
  const GaussianState ds = displace(
      GaussianState(ComplexVector::Zero(1), RealBlockOperator(S), TailModel::identity()),
      alpha);
  const OracleReport rep = verify_gaussian(ds, spec1(40), samples, 1e-5);
  CHECK(rep.pass);
  CHECK(rep.max_abs_deviation < 1e-8);

  // guards
  CHECK_THROWS_AS(verify_gaussian(vacuum(1, TailModel::geometric(1.0, 0.5)), spec1(25),
                                  samples, 1e-6),
                  invalid_input_error);
  CHECK_THROWS_AS(verify_gaussian(vacuum(2), spec1(25), samples, 1e-6),
                  invalid_input_error);
  CHECK_THROWS_AS(verify_gaussian(vacuum(3), FockBasisSpec{{8, 8, 8}, 1L << 40},
                                  samples, 1e-6),
                  invalid_input_error);
  const GaussianState invalid(ComplexVector::Zero(1),
                              RealBlockOperator(0.5 * Matrix::Identity(2, 2)),
                              TailModel::identity());
  CHECK_THROWS_AS(verify_gaussian(invalid, spec1(25), samples, 1e-6), validation_error);
}

TEST_CASE("oracle spectrum matches the analytic spectrum", "[fock_oracle]") {
  // two distinct thermal modes, s = (log 2, log 3)
  FockBasisSpec spec{{25, 25}, 1L << 40};
  Vector s(2);
  s << std::log(2.0), std::log(3.0);
  const ThermalDensity td = thermal_density(spec, s);
  const Vector top = oracle_spectrum(td.rho, 10);
  const auto lines = spectrum(thermal_state({3.0, 2.0}), 10);
  REQUIRE(lines.size() == 10);
  for (int k = 0; k < 10; ++k)
    CHECK(top(k) == Approx(lines[static_cast<size_t>(k)].value).epsilon(1e-10));
}

TEST_CASE("occupation windows", "[fock_oracle]") {
  FockBasisSpec spec{{4, 4}, 4096};
  const Vector mask = occupation_window_mask(spec, {1, 1});
  CHECK(mask.sum() == Approx(4.0));
  const Vector low = low_occupation_mask(FockBasisSpec{{12}, 4096});
  CHECK(low.sum() == Approx(3.0));  // occupations 0, 1, 2 survive N - 10
  CHECK_THROWS_AS(occupation_window_mask(spec, {1}), invalid_input_error);
}
