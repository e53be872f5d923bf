#pragma once

#include <complex>
#include <string>

#include <json.hpp>

#include "gaussian_states.hpp"
#include "mode_tails.hpp"

namespace gaussfock {

using nlohmann::json;

inline json complex_to_json(std::complex<double> c) { return json::array({c.real(), c.imag()}); }

inline std::complex<double> complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw invalid_input_error("complex numbers are serialized as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_vector_to_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_to_json(v(k)));
  return out;
}

inline ComplexVector complex_vector_from_json(const json& j) {
  if (!j.is_array()) throw invalid_input_error("expected an array of [re, im] pairs");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t k = 0; k < j.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k]);
  return v;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw invalid_input_error("expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw invalid_input_error("matrix rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[static_cast<size_t>(i)].is_array() ||
        static_cast<Eigen::Index>(j[static_cast<size_t>(i)].size()) != cols)
      throw invalid_input_error("matrix rows must have equal length");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& cell = j[static_cast<size_t>(i)][static_cast<size_t>(k)];
      if (!cell.is_number()) throw invalid_input_error("matrix entries must be numbers");
      m(i, k) = cell.get<double>();
    }
  }
  return m;
}

inline json tail_to_json(const TailModel& tail) {
  switch (tail.kind) {
    case TailKind::identity:
      return json{{"kind", "identity"}};
    case TailKind::geometric:
      return json{{"kind", "geometric"}, {"a", tail.a}, {"r", tail.param}};
    case TailKind::power:
      return json{{"kind", "power"}, {"a", tail.a}, {"p", tail.param}};
  }
  throw invalid_input_error("unknown tail kind");
}

inline TailModel tail_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw invalid_input_error("tail JSON needs a string field \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  auto num = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number())
      throw invalid_input_error(std::string("tail JSON needs a numeric field \"") + key + "\"");
    return j[key].get<double>();
  };
  if (kind == "identity") return TailModel::identity();
  if (kind == "geometric") return TailModel::geometric(num("a"), num("r"));
  if (kind == "power") return TailModel::power(num("a"), num("p"));
  throw invalid_input_error("tail kind must be identity, geometric, or power");
}

inline json state_to_json(const GaussianState& state) {
  json out;
  out["modes"] = static_cast<long>(state.modes());
  json re = json::array(), im = json::array();
  for (Eigen::Index k = 0; k < state.mean().size(); ++k) {
    re.push_back(state.mean()(k).real());
    im.push_back(state.mean()(k).imag());
  }
  out["mean_re"] = std::move(re);
  out["mean_im"] = std::move(im);
  out["S0"] = matrix_to_json(state.cov().mat());
  out["tail"] = tail_to_json(state.tail());
  return out;
}

inline GaussianState state_from_json(const json& j) {
  if (!j.is_object()) throw invalid_input_error("state JSON must be an object");
  for (const char* key : {"modes", "mean_re", "mean_im", "S0"})
    if (!j.contains(key))
      throw invalid_input_error(std::string("state JSON is missing \"") + key + "\"");
  if (!j["modes"].is_number_integer() || j["modes"].get<long>() < 0)
    throw invalid_input_error("\"modes\" must be a nonnegative integer");
  const auto n = static_cast<Eigen::Index>(j["modes"].get<long>());
  if (!j["mean_re"].is_array() || !j["mean_im"].is_array() ||
      static_cast<Eigen::Index>(j["mean_re"].size()) != n ||
      static_cast<Eigen::Index>(j["mean_im"].size()) != n)
    throw invalid_input_error("mean arrays must each have \"modes\" entries");
  ComplexVector mean(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const json& re = j["mean_re"][static_cast<size_t>(k)];
    const json& im = j["mean_im"][static_cast<size_t>(k)];
    if (!re.is_number() || !im.is_number())
      throw invalid_input_error("mean entries must be numbers");
    mean(k) = {re.get<double>(), im.get<double>()};
  }
  Matrix S;
  if (n == 0) {
    S = Matrix::Zero(0, 0);
    if (!j["S0"].is_array() || !j["S0"].empty())
      throw invalid_input_error("a zero-mode state stores S0 as an empty array");
  } else {
    S = matrix_from_json(j["S0"]);
    if (S.rows() != 2 * n || S.cols() != 2 * n)
      throw invalid_input_error("S0 must be a 2n x 2n matrix");
  }
  TailModel tail = j.contains("tail") ? tail_from_json(j["tail"]) : TailModel::identity();
  return GaussianState(std::move(mean), RealBlockOperator(std::move(S)), tail);
}

}  // namespace gaussfock
