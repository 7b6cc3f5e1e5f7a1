#pragma once

// Randomized invariant checks shared by the `selftest` CLI verb and the test
// suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qfridge/core.hpp"
#include "qfridge/eigenoperators.hpp"
#include "qfridge/liouvillian.hpp"
#include "qfridge/model.hpp"
#include "qfridge/steadystate.hpp"
#include "qfridge/thermo.hpp"

namespace qfridge {

// Valid parameters with T_H > T_R > T_C, g kept at least 0.02 w_H away from
// every degenerate value and bath temperatures at least 5% apart.
template <typename Rng>
ModelParams random_valid_params(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  for (;;) {
    ModelParams p;
    p.omega_H = between(1.0, 5.0);
    p.omega_C = between(0.2, 1.0) * p.omega_H;
    p.g = std::exp(between(std::log(1e-3), std::log(0.6))) * p.omega_H;
    const double base = between(0.5, 3.0) * p.omega_R();
    p.T_C = base;
    p.T_R = base * between(1.05, 2.0);
    p.T_H = p.T_R * between(1.05, 4.0);
    p.gamma_H = between(1e-4, 3e-3) * p.omega_H;
    p.gamma_R = between(1e-4, 3e-3) * p.omega_H;
    p.gamma_C = between(1e-4, 3e-3) * p.omega_H;
    const double margin = 0.02 * p.omega_H;
    if (std::abs(p.g - p.omega_C) < margin || std::abs(p.g - p.omega_H) < margin ||
        std::abs(p.g - p.omega_R()) < margin) {
      continue;
    }
    return p;
  }
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

// Structural and thermodynamic invariants over `draws` random parameter
// points plus one equilibrium point.
inline std::vector<CheckResult> run_selftest(int draws = 50, std::uint64_t seed = 20240611) {
  std::mt19937_64 rng(seed);
  double worst_rate = 0.0, worst_comm = 0.0, worst_first = 0.0, worst_sigma = 0.0,
         worst_coherence = 0.0, worst_forms = 0.0, worst_spectrum = 0.0;
  int failures = 0;
  std::string first_failure;
  for (int k = 0; k < draws; ++k) {
    const ModelParams p = random_valid_params(rng);
    try {
      const SteadyState ss = steady_state_full(p);
      const SteadyReport r = analyze(ss);
      const double scale = ss.literal.total.cwiseAbs().maxCoeff();
      worst_rate = std::max(worst_rate, r.diagnostics.rate_matrix_mismatch / scale);
      worst_comm = std::max(worst_comm, r.diagnostics.commutator_residual / p.omega_H);
      worst_first = std::max(worst_first, r.diagnostics.first_law_residual / r.max_abs_q());
      worst_sigma = std::min(worst_sigma, r.entropy_production);
      worst_coherence = std::max(worst_coherence, r.diagnostics.max_coherence);
      worst_forms = std::max(worst_forms, r.diagnostics.heat_form_mismatch);
      const auto expected = analytic_spectrum(p);
      for (int i = 0; i < kDim; ++i) {
        worst_spectrum = std::max(worst_spectrum,
                                  std::abs(ss.context.eigensystem.eigenvalues[i] - expected[i]));
      }
    } catch (const Error& e) {
      if (failures++ == 0) first_failure = e.what();
    }
  }

  std::vector<CheckResult> out;
  out.push_back({"all draws solved", failures == 0,
                 failures ? std::to_string(failures) + " failed, first: " + first_failure
                          : std::to_string(draws) + " draws"});
  out.push_back({"spectrum matches closed form", worst_spectrum == 0.0, sci(worst_spectrum)});
  out.push_back({"eigenoperator commutators", worst_comm <= 1e-10, sci(worst_comm)});
  out.push_back({"literal == derived rate matrix", worst_rate <= 1e-12, sci(worst_rate)});
  out.push_back({"heat current forms agree", worst_forms <= 1e-10, sci(worst_forms)});
  out.push_back({"first law", worst_first <= 1e-12, sci(worst_first)});
  out.push_back({"second law", worst_sigma >= -1e-12, sci(worst_sigma)});
  out.push_back({"steady coherences vanish", worst_coherence <= 1e-10, sci(worst_coherence)});

  ModelParams eq;
  eq.g = 0.3 * eq.omega_H;
  eq.T_H = eq.T_R = eq.T_C = 7.5;
  try {
    const SteadyState ss = steady_state_full(eq);
    const double d = trace_distance(ss.density_matrix(), gibbs_state(ss.context.eigensystem, 7.5));
    out.push_back({"equal temperatures give Gibbs state", d <= 1e-8, sci(d)});
  } catch (const Error& e) {
    out.push_back({"equal temperatures give Gibbs state", false, e.what()});
  }
  return out;
}

}  // namespace qfridge
