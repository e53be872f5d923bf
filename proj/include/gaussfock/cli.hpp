#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fock_oracle.hpp"
#include "json_io.hpp"

namespace gaussfock::cli {

namespace detail {

inline json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw invalid_input_error("cannot open file: " + path);
  return json::parse(f);
}

inline GaussianState load_state(const std::string& path) {
  return state_from_json(load_json(path));
}

inline long memory_cap() {
  if (const char* env = std::getenv("GAUSSFOCK_MEM_CAP")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end && *end == '\0' && cap >= 2) return cap;
    throw invalid_input_error("GAUSSFOCK_MEM_CAP must be an integer >= 2");
  }
  return 4096;
}

// Deterministic sample points with total norm <= 1.
inline std::vector<ComplexVector> sample_points(int count, int modes, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> radius(0.05, 1.0);
  std::vector<ComplexVector> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    ComplexVector z(modes);
    for (int j = 0; j < modes; ++j) z(j) = std::complex<double>(unit(rng), unit(rng));
    const double nrm = z.norm();
    if (nrm > 0.0) z *= radius(rng) / std::max(1.0, nrm);
    out.push_back(std::move(z));
  }
  return out;
}

inline json validation_to_json(const ValidationReport& rep) {
  return json{{"cond1_psd", rep.cond1_psd},
              {"min_block_eigenvalue", rep.min_block_eigenvalue},
              {"cond2_hs", rep.cond2_hs},
              {"cond3_trace", rep.cond3_trace},
              {"min_symplectic_eigenvalue", rep.min_symplectic_eigenvalue},
              {"block_defect_trace_norm", rep.block_defect_trace_norm},
              {"verdict", rep.verdict}};
}

inline void emit(std::ostream& out, const json& report) { out << report.dump(2) << "\n"; }

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout) {
  CLI::App app{"Gaussian states on infinitely many modes: finite covariance block + "
               "parametric tail, verified against a truncated Fock-space oracle"};
  app.require_subcommand(1);
  unsigned long seed = 12345;
  app.add_option("--seed", seed, "seed for randomized sample generation")
      ->capture_default_str();

  std::string state_path, second_path, matrix_path, alpha_json, tail_path;
  int top_k = 10;
  std::vector<Eigen::Index> mode_sel;
  double theta = 0.0;
  int cutoff = 40, samples = 20, pairs = 20;
  double tol_cf = 1e-6, tol_weyl = 1e-6;

  auto* c_validate = app.add_subcommand("validate", "admissibility report for a state");
  c_validate->add_option("state", state_path, "state JSON file")->required();

  auto* c_williamson =
      app.add_subcommand("williamson", "normal form S0 = L^T diag(d,d) L with residuals");
  c_williamson->add_option("state", state_path, "state JSON file")->required();

  auto* c_spectrum = app.add_subcommand("spectrum", "largest density eigenvalues");
  c_spectrum->add_option("state", state_path, "state JSON file")->required();
  c_spectrum->add_option("--top", top_k, "number of eigenvalues")->capture_default_str();

  auto* c_decompose =
      app.add_subcommand("decompose", "extreme-point pair N, M with S0 = (N^T N + M^T M)/2");
  c_decompose->add_option("state", state_path, "state JSON file")->required();

  auto* c_displace = app.add_subcommand("displace", "apply a Weyl displacement");
  c_displace->add_option("state", state_path, "state JSON file")->required();
  c_displace->add_option("--alpha", alpha_json, "JSON array of [re, im] pairs")->required();

  auto* c_conjugate = app.add_subcommand("conjugate", "conjugate by a Shale unitary");
  c_conjugate->add_option("state", state_path, "state JSON file")->required();
  c_conjugate->add_option("--symplectic", matrix_path, "JSON file with a 2n x 2n matrix")
      ->required();

  auto* c_tensor = app.add_subcommand("tensor", "tensor product of two states");
  c_tensor->add_option("first", state_path, "first state JSON file")->required();
  c_tensor->add_option("second", second_path, "second state JSON file")->required();

  auto* c_marginal = app.add_subcommand("marginal", "restrict to a subset of block modes");
  c_marginal->add_option("state", state_path, "state JSON file")->required();
  c_marginal->add_option("--modes", mode_sel, "comma-separated mode indices (0-based)")
      ->required()
      ->delimiter(',');

  auto* c_mix = app.add_subcommand("mix", "beam-splitter mixture of two mean-zero states");
  c_mix->add_option("first", state_path, "first state JSON file")->required();
  c_mix->add_option("second", second_path, "second state JSON file")->required();
  c_mix->add_option("--theta", theta, "beam splitter angle in radians")->required();

  auto* c_purify = app.add_subcommand("purify", "pure doubled state with the given marginal");
  c_purify->add_option("state", state_path, "state JSON file")->required();

  auto* c_oracle = app.add_subcommand("oracle", "truncated Fock-space verification");
  c_oracle->require_subcommand(1);
  auto* c_vcf = c_oracle->add_subcommand(
      "verify-cf", "compare tr(rho W(z)) against the closed-form characteristic function");
  c_vcf->add_option("state", state_path, "state JSON file")->required();
  c_vcf->add_option("--cutoff", cutoff, "per-mode basis cutoff")->capture_default_str();
  c_vcf->add_option("--samples", samples, "number of sample points")->capture_default_str();
  c_vcf->add_option("--tol", tol_cf, "max allowed deviation")->capture_default_str();
  auto* c_vweyl = c_oracle->add_subcommand("verify-weyl",
                                           "check W(f)W(g) = e^{-i Im<f,g>} W(f+g)");
  c_vweyl->add_option("--cutoff", cutoff, "basis cutoff")->capture_default_str();
  c_vweyl->add_option("--tol", tol_weyl, "max allowed residual")->capture_default_str();
  c_vweyl->add_option("--pairs", pairs, "number of random (f, g) pairs")->capture_default_str();

  auto* c_tail = app.add_subcommand("tail", "tail model utilities");
  c_tail->require_subcommand(1);
  auto* c_tail_classify =
      c_tail->add_subcommand("classify", "summability conditions of a tail model");
  c_tail_classify->add_option("tail", tail_path, "tail JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    detail::emit(out, json{{"error", e.what()}});
    return 2;
  }

  try {
    if (*c_validate) {
      const GaussianState state = detail::load_state(state_path);
      const ValidationReport rep = validate(state);
      json report = detail::validation_to_json(rep);
      report["command"] = "validate";
      report["input"] = state_path;
      detail::emit(out, report);
      return rep.verdict ? 0 : 1;
    }
    if (*c_williamson) {
      const GaussianState state = detail::load_state(state_path);
      const auto wd = williamson(state.cov());
      const Eigen::Index n = state.modes();
      Vector dd(2 * n);
      dd.head(n) = wd.d;
      dd.tail(n) = wd.d;
      const double sdef = symplectic_defect(wd.L);
      const double scale = std::max(1.0, state.cov().mat().cwiseAbs().maxCoeff());
      const double rdef =
          n == 0 ? 0.0
                 : (wd.L.mat().transpose() * dd.asDiagonal() * wd.L.mat() - state.cov().mat())
                           .cwiseAbs()
                           .maxCoeff() /
                       scale;
      const bool verdict = sdef <= 1e-9 && rdef <= 1e-9;
      json report{{"command", "williamson"},
                  {"input", state_path},
                  {"L", matrix_to_json(wd.L.mat())},
                  {"d", std::vector<double>(wd.d.data(), wd.d.data() + wd.d.size())},
                  {"symplectic_defect", sdef},
                  {"relative_reconstruction_defect", rdef},
                  {"verdict", verdict}};
      detail::emit(out, report);
      return verdict ? 0 : 1;
    }
    if (*c_spectrum) {
      const GaussianState state = detail::load_state(state_path);
      const auto lines = spectrum(state, top_k);
      json jl = json::array();
      double sum = 0.0;
      for (const auto& line : lines) {
        jl.push_back(json{{"value", line.value}, {"occupation", line.occupation}});
        sum += line.value;
      }
      const bool verdict = sum <= 1.0 + 1e-10;
      json report{{"command", "spectrum"},
                  {"input", state_path},
                  {"top", top_k},
                  {"lines", std::move(jl)},
                  {"partial_sum", sum},
                  {"verdict", verdict}};
      detail::emit(out, report);
      return verdict ? 0 : 1;
    }
    if (*c_decompose) {
      const GaussianState state = detail::load_state(state_path);
      const ExtremePair pair = extreme_decompose(state);
      const Matrix mid =
          0.5 * (pair.N.mat().transpose() * pair.N.mat() + pair.M.mat().transpose() * pair.M.mat());
      const double scale = std::max(1.0, state.cov().mat().cwiseAbs().maxCoeff());
      const double rdef = (mid - state.cov().mat()).cwiseAbs().maxCoeff() / scale;
      const double sdef = std::max(symplectic_defect(pair.N), symplectic_defect(pair.M));
      const bool verdict = rdef <= 1e-9 && sdef <= 1e-9;
      json report{{"command", "decompose"},
                  {"input", state_path},
                  {"N", matrix_to_json(pair.N.mat())},
                  {"M", matrix_to_json(pair.M.mat())},
                  {"relative_reconstruction_defect", rdef},
                  {"max_symplectic_defect", sdef},
                  {"verdict", verdict}};
      detail::emit(out, report);
      return verdict ? 0 : 1;
    }
    if (*c_displace) {
      const GaussianState state = detail::load_state(state_path);
      const ComplexVector alpha = complex_vector_from_json(json::parse(alpha_json));
      detail::emit(out, state_to_json(displace(state, alpha)));
      return 0;
    }
    if (*c_conjugate) {
      const GaussianState state = detail::load_state(state_path);
      const RealBlockOperator L(matrix_from_json(detail::load_json(matrix_path)));
      detail::emit(out, state_to_json(shale_conjugate(state, L)));
      return 0;
    }
    if (*c_tensor) {
      const GaussianState a = detail::load_state(state_path);
      const GaussianState b = detail::load_state(second_path);
      detail::emit(out, state_to_json(tensor(a, b)));
      return 0;
    }
    if (*c_marginal) {
      const GaussianState state = detail::load_state(state_path);
      detail::emit(out, state_to_json(marginal(state, mode_sel)));
      return 0;
    }
    if (*c_mix) {
      const GaussianState a = detail::load_state(state_path);
      const GaussianState b = detail::load_state(second_path);
      detail::emit(out, state_to_json(beam_splitter_mix(a, b, theta)));
      return 0;
    }
    if (*c_purify) {
      const GaussianState state = detail::load_state(state_path);
      detail::emit(out, state_to_json(purify(state)));
      return 0;
    }
    if (*c_oracle && *c_vcf) {
      const GaussianState state = detail::load_state(state_path);
      FockBasisSpec spec;
      spec.cap = detail::memory_cap();
      spec.mode_cutoffs.assign(static_cast<size_t>(state.modes()), cutoff);
      const auto points =
          detail::sample_points(samples, static_cast<int>(state.modes()), seed);
      const OracleReport rep = verify_gaussian(state, spec, points, tol_cf);
      json report{{"command", "oracle verify-cf"},
                  {"input", state_path},
                  {"cutoff", cutoff},
                  {"samples", samples},
                  {"seed", seed},
                  {"tol", tol_cf},
                  {"max_abs_deviation", rep.max_abs_deviation},
                  {"trace_deficit", rep.trace_deficit},
                  {"pass", rep.pass}};
      detail::emit(out, report);
      return rep.pass ? 0 : 1;
    }
    if (*c_oracle && *c_vweyl) {
      FockBasisSpec spec;
      spec.cap = detail::memory_cap();
      spec.mode_cutoffs = {cutoff};
      const auto fs = detail::sample_points(pairs, 1, seed);
      const auto gs = detail::sample_points(pairs, 1, seed + 1);
      double worst = 0.0;
      for (int i = 0; i < pairs; ++i)
        worst = std::max(worst,
                         weyl_relation_residual(spec, fs[static_cast<size_t>(i)],
                                                gs[static_cast<size_t>(i)]));
      const bool pass = worst <= tol_weyl;
      json report{{"command", "oracle verify-weyl"}, {"cutoff", cutoff},
                  {"pairs", pairs},                  {"seed", seed},
                  {"tol", tol_weyl},                 {"max_residual", worst},
                  {"pass", pass}};
      detail::emit(out, report);
      return pass ? 0 : 1;
    }
    if (*c_tail && *c_tail_classify) {
      const TailModel tail = tail_from_json(detail::load_json(tail_path));
      const TailClassification cls = classify_tail(tail);
      json report{{"command", "tail classify"},
                  {"input", tail_path},
                  {"tail", tail_to_json(tail)},
                  {"cond1_uncertainty", cls.cond1_uncertainty},
                  {"cond2_hilbert_schmidt", cls.cond2_hilbert_schmidt},
                  {"cond3_trace_class", cls.cond3_trace_class},
                  {"witness", cls.witness}};
      detail::emit(out, report);
      return 0;
    }
    detail::emit(out, json{{"error", "no subcommand selected"}});
    return 2;
  } catch (const not_positive_definite_error& e) {
    detail::emit(out, json{{"error", e.what()}});
    return 1;
  } catch (const degeneracy_error& e) {
    detail::emit(out, json{{"error", e.what()}});
    return 1;
  } catch (const no_density_matrix_error& e) {
    detail::emit(out, json{{"error", e.what()}});
    return 1;
  } catch (const validation_error& e) {
    detail::emit(out, json{{"error", e.what()}});
    return 1;
  } catch (const error& e) {
    detail::emit(out, json{{"error", e.what()}});
    return 2;
  } catch (const json::exception& e) {
    detail::emit(out, json{{"error", e.what()}});
    return 2;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.emplace_back("gaussfock");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out);
}

}  // namespace gaussfock::cli
