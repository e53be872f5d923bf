#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace gaussfock {

enum class TailKind { identity, geometric, power };

// Diagonal covariance entries d_j on the modes after the finite block,
// restricted to closed-form families so the summability conditions are
// decidable exactly: d_j = 1, d_j = 1 + a r^j, or d_j = 1 + a j^{-p},
// with j counted from 1 within the tail.
struct TailModel {
  TailKind kind = TailKind::identity;
  double a = 0.0;
  double param = 0.0;  // ratio r for geometric, exponent p for power

  static TailModel identity() { return {}; }

  static TailModel geometric(double a, double r) {
    if (!(a > 0.0) || !(r > 0.0) || !(r < 1.0) || !std::isfinite(a))
      throw invalid_input_error("geometric tail needs amplitude a > 0 and ratio 0 < r < 1");
    return {TailKind::geometric, a, r};
  }

  static TailModel power(double a, double p) {
    if (!(a > 0.0) || !(p > 0.0) || !std::isfinite(a) || !std::isfinite(p))
      throw invalid_input_error("power tail needs amplitude a > 0 and exponent p > 0");
    return {TailKind::power, a, p};
  }

  bool trivial() const { return kind == TailKind::identity; }
};

struct TailClassification {
  bool cond1_uncertainty = false;  // d_j >= 1 for all j
  bool cond2_hilbert_schmidt = false;  // sum (d_j - 1)^2 < inf
  bool cond3_trace_class = false;      // sum (d_j - 1) < inf
  std::string witness;
};

inline double tail_d(const TailModel& tail, long j) {
  if (j < 1) throw invalid_input_error("tail index must be >= 1");
  switch (tail.kind) {
    case TailKind::identity:
      return 1.0;
    case TailKind::geometric:
      return 1.0 + tail.a * std::pow(tail.param, static_cast<double>(j));
    case TailKind::power:
      return 1.0 + tail.a * std::pow(static_cast<double>(j), -tail.param);
  }
  throw invalid_input_error("unknown tail kind");
}

// Temperature parameter s_j with d_j = coth(s_j / 2).
inline double tail_s(const TailModel& tail, long j) {
  const double d = tail_d(tail, j);
  if (d <= 1.0)
    throw infinite_parameter_error("mode with d = 1 is a vacuum mode, s is infinite");
  return std::log((d + 1.0) / (d - 1.0));
}

inline TailClassification classify_tail(const TailModel& tail) {
  TailClassification out;
  out.cond1_uncertainty = true;  // forced by the parameter domains
  std::ostringstream w;
  switch (tail.kind) {
    case TailKind::identity:
      out.cond2_hilbert_schmidt = true;
      out.cond3_trace_class = true;
      w << "identity tail: every d_j - 1 vanishes, all sums are zero";
      break;
    case TailKind::geometric:
      out.cond2_hilbert_schmidt = true;
      out.cond3_trace_class = true;
      w << "geometric series test: ratio r = " << tail.param
        << " < 1, so sum a r^j and sum (a r^j)^2 both converge";
      break;
    case TailKind::power:
      out.cond2_hilbert_schmidt = tail.param > 0.5;
      out.cond3_trace_class = tail.param > 1.0;
      w << "p-series test: sum j^{-2p} " << (tail.param > 0.5 ? "converges" : "diverges")
        << " (2p = " << 2.0 * tail.param << (tail.param > 0.5 ? " > 1" : " <= 1")
        << "), sum j^{-p} " << (tail.param > 1.0 ? "converges" : "diverges")
        << " (p = " << tail.param << (tail.param > 1.0 ? " > 1" : " <= 1") << ")";
      break;
  }
  out.witness = w.str();
  return out;
}

struct TailPartialSums {
  double sum1 = 0.0;  // sum of (d_j - 1)
  double sum2 = 0.0;  // sum of (d_j - 1)^2
};

inline TailPartialSums tail_partial_sums(const TailModel& tail, long terms) {
  if (terms < 1) throw invalid_input_error("partial sums need at least one term");
  TailPartialSums out;
  if (tail.trivial()) return out;
  for (long j = 1; j <= terms; ++j) {
    const double t = tail_d(tail, j) - 1.0;
    out.sum1 += t;
    out.sum2 += t * t;
  }
  return out;
}

namespace detail {

// Hurwitz zeta sum_{k>=0} (x+k)^{-s} for s > 1, x >= 1, by Euler-Maclaurin
// with Bernoulli corrections through B_6; accurate to ~1e-15 once the direct
// prefix reaches y = x + K >= 60.
inline double hurwitz_zeta(double s, double x) {
  double sum = 0.0;
  double y = x;
  while (y < 60.0) {
    sum += std::pow(y, -s);
    y += 1.0;
  }
  const double ys = std::pow(y, -s);
  sum += y * ys / (s - 1.0);
  sum += 0.5 * ys;
  sum += (s / 12.0) * ys / y;
  sum -= (s * (s + 1.0) * (s + 2.0) / 720.0) * ys / (y * y * y);
  sum += (s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0) * ys /
         (y * y * y * y * y);
  return sum;
}

}  // namespace detail

// log of the convergent infinite product prod_j (1 - e^{-s_j}) over the tail
// modes. With t_j = d_j - 1 one has 1 - e^{-s_j} = 2 / (2 + t_j), so the log
// equals -sum_j log(1 + t_j/2). A direct prefix is summed until t_j/2 <= 1/2,
// and the remainder is expanded as sum_m (-1)^{m+1} (c_m / m) with the inner
// sums over j evaluated in closed form (geometric series or Hurwitz zeta).
inline double tail_log_trace_factor(const TailModel& tail) {
  if (tail.trivial()) return 0.0;
  const auto cls = classify_tail(tail);
  if (!cls.cond3_trace_class)
    throw no_density_matrix_error("tail is not trace class, the product diverges");

  const double c = 0.5 * tail.a;
  double direct = 0.0;
  if (tail.kind == TailKind::geometric) {
    const double r = tail.param;
    long bigj = 64;
    while (c * std::pow(r, static_cast<double>(bigj + 1)) > 0.5) bigj += 64;
    for (long j = 1; j <= bigj; ++j)
      direct += std::log1p(c * std::pow(r, static_cast<double>(j)));
    // remainder: sum_{j>J} log(1 + c r^j) = sum_m (-1)^{m+1} c^m/m * r^{(J+1)m}/(1-r^m)
    double remainder = 0.0;
    for (int m = 1; m <= 256; ++m) {
      const double num = std::pow(c, m) * std::pow(r, static_cast<double>((bigj + 1) * m));
      const double term = num / (m * (1.0 - std::pow(r, m)));
      remainder += (m % 2 == 1 ? term : -term);
      if (std::abs(term) < 1e-18) break;
    }
    return -(direct + remainder);
  }

  const double p = tail.param;
  long bigj = 32;
  while (c * std::pow(static_cast<double>(bigj + 1), -p) > 0.5) bigj *= 2;
  for (long j = 1; j <= bigj; ++j)
    direct += std::log1p(c * std::pow(static_cast<double>(j), -p));
  // remainder: sum_{j>J} log(1 + c j^{-p}) = sum_m (-1)^{m+1} c^m/m * zeta(mp, J+1)
  double remainder = 0.0;
  for (int m = 1; m <= 256; ++m) {
    const double term =
        std::pow(c, m) / m * detail::hurwitz_zeta(m * p, static_cast<double>(bigj + 1));
    remainder += (m % 2 == 1 ? term : -term);
    if (std::abs(term) < 1e-18) break;
  }
  return -(direct + remainder);
}

}  // namespace gaussfock
