#pragma once

// Heat currents, efficiency, virtual temperature and entropy production of
// the stationary refrigerator.
//
// Sign convention: Qdot_mu = Tr{H_S L_mu[rho]} is positive when energy flows
// from reservoir mu into the machine, so Qdot_C > 0 means the cold bath is
// being cooled.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qfridge/core.hpp"
#include "qfridge/liouvillian.hpp"
#include "qfridge/model.hpp"
#include "qfridge/steadystate.hpp"

namespace qfridge {

struct HeatCurrent {
  double vector_form = 0.0;  // <eps| M_mu |rho>
  double trace_form = 0.0;   // Tr{H_S L_mu[rho]}
  double gross_flow = 0.0;   // sum_ij |eps_i M_ij rho_j|, the comparison scale
};

// Evaluates both forms and insists they agree to 1e-10 of the gross flow.
// Returns the vector form.
inline HeatCurrent heat_current(Bath bath, const PopulationVector& pops,
                                const Matrix8& rate_part,
                                const GeneratorContext& ctx) {
  const auto& eps = ctx.eigensystem.eigenvalues;
  HeatCurrent out;

  long double acc = 0.0L;
  long double gross = 0.0L;
  for (int i = 0; i < kDim; ++i) {
    long double flow = 0.0L;
    long double one_way = 0.0L;
    for (int j = 0; j < kDim; ++j) {
      const long double term = static_cast<long double>(rate_part(i, j)) * pops.values(j);
      flow += term;
      one_way += std::abs(term);
    }
    acc += eps[i] * flow;
    gross += std::abs(eps[i]) * one_way;
  }
  out.vector_form = static_cast<double>(acc);
  out.gross_flow = static_cast<double>(gross);

  Matrix8c rho = Matrix8c::Zero();
  for (int i = 0; i < kDim; ++i) rho(i, i) = pops.values(i);
  const Matrix8c l = apply_dissipator(bath, rho, ctx);
  out.trace_form = (ctx.eigensystem.hamiltonian_in_eigenbasis() * l).trace().real();

  if (std::abs(out.vector_form - out.trace_form) >
      1e-10 * std::max(out.gross_flow, std::numeric_limits<double>::min())) {
    throw Error(ErrorCode::FormMismatch,
                "heat current forms disagree for bath " + std::string(name_of(bath)) +
                    " (gross flow " + std::to_string(out.gross_flow) + ")");
  }
  return out;
}

// Q_C / Q_H; nullopt when Q_H vanishes at the given scale. Negative values
// are returned as-is.
inline std::optional<double> efficiency(const std::array<double, 3>& q_dot,
                                        double scale = 1.0) {
  const double qh = q_dot[index_of(Bath::Hot)];
  if (!(std::abs(qh) > 1e-14 * scale)) return std::nullopt;
  return q_dot[index_of(Bath::Cold)] / qh;
}

// T_v = w_H / (w_R/T_R - w_C/T_C). nullopt (infinite) when the denominator
// vanishes; negative when it is negative.
inline std::optional<double> virtual_temperature(const ModelParams& p) {
  const double a = p.omega_R() / p.T_R;
  const double b = p.omega_C / p.T_C;
  const double den = a - b;
  if (std::abs(den) <= 1e-12 * std::max(std::abs(a), std::abs(b))) return std::nullopt;
  return p.omega_H / den;
}

// sigma = -sum_mu Q_mu / T_mu.
inline double entropy_production(const std::array<double, 3>& q_dot,
                                 const std::array<double, 3>& temperatures) {
  double sigma = 0.0;
  for (std::size_t mu = 0; mu < 3; ++mu) sigma -= q_dot[mu] / temperatures[mu];
  if (sigma < -1e-8) {
    throw Error(ErrorCode::SecondLawViolation,
                "negative entropy production " + std::to_string(sigma));
  }
  return sigma;
}

struct ReportDiagnostics {
  double rate_matrix_mismatch = 0.0;
  double generator_residual = 0.0;
  double max_coherence = 0.0;
  double commutator_residual = 0.0;
  double heat_form_mismatch = 0.0;  // max relative disagreement of the two forms
  double first_law_residual = 0.0;  // |sum Q|
  double g_over_gamma = 0.0;
  std::vector<std::string> warnings;
};

struct SteadyReport {
  ModelParams params;
  std::array<double, kDim> energies{};
  PopulationVector populations;
  std::array<double, 3> q_dot{};
  std::optional<double> efficiency;
  bool refrigerator = false;  // Q_C > 0
  std::optional<double> t_virtual;
  double entropy_production = 0.0;
  ReportDiagnostics diagnostics;

  double q(Bath b) const { return q_dot[index_of(b)]; }
  double max_abs_q() const {
    return std::max({std::abs(q_dot[0]), std::abs(q_dot[1]), std::abs(q_dot[2])});
  }
};

inline SteadyReport analyze(const SteadyState& ss) {
  const GeneratorContext& ctx = ss.context;
  SteadyReport r;
  r.params = ctx.params;
  r.energies = ctx.eigensystem.eigenvalues;
  r.populations = ss.populations;

  double gross = 0.0;
  for (Bath b : kBaths) {
    const HeatCurrent hc = heat_current(b, ss.populations, ss.literal.part(b), ctx);
    r.q_dot[index_of(b)] = hc.vector_form;
    gross = std::max(gross, hc.gross_flow);
    if (hc.gross_flow > 0.0) {
      r.diagnostics.heat_form_mismatch =
          std::max(r.diagnostics.heat_form_mismatch,
                   std::abs(hc.vector_form - hc.trace_form) / hc.gross_flow);
    }
  }
  r.efficiency = efficiency(r.q_dot, std::max(gross, std::numeric_limits<double>::min()));
  r.refrigerator = r.q(Bath::Cold) > 0.0;
  r.t_virtual = virtual_temperature(ctx.params);
  r.entropy_production =
      entropy_production(r.q_dot, {ctx.params.T_H, ctx.params.T_R, ctx.params.T_C});

  r.diagnostics.rate_matrix_mismatch = ss.diagnostics.rate_matrix_mismatch;
  r.diagnostics.generator_residual = ss.diagnostics.generator_residual;
  r.diagnostics.max_coherence = ss.diagnostics.max_coherence;
  r.diagnostics.commutator_residual =
      commutator_residuals(ctx.ops, ctx.eigensystem, build_hamiltonian(ctx.params))
          .max_residual;
  r.diagnostics.first_law_residual = std::abs(r.q_dot[0] + r.q_dot[1] + r.q_dot[2]);
  r.diagnostics.g_over_gamma = ctx.params.g / ctx.params.max_gamma();
  r.diagnostics.warnings = ss.diagnostics.warnings;
  return r;
}

inline SteadyReport analyze(const ModelParams& p) { return analyze(steady_state_full(p)); }

}  // namespace qfridge
