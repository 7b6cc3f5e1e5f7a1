#pragma once

// The nine bath eigenoperators V_{mu j} of the refrigerator Hamiltonian.
// Matrices are stored in the H_S eigenbasis: entry (a, b) is the coefficient
// of |lambda_{a+1}><lambda_{b+1}|.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qfridge/core.hpp"
#include "qfridge/model.hpp"

namespace qfridge {

struct EigenOperator {
  Bath bath = Bath::Hot;
  int j = 1;                    // 1..3 within the bath
  double frequency = 0.0;       // canonical, > 0
  double listed_frequency = 0;  // value from the closed-form table (may be < 0)
  bool adjointed = false;       // true if replaced by its adjoint to make w > 0
  Matrix8c matrix = Matrix8c::Zero();

  struct Term {
    int row;
    int col;
    Complex amplitude;
  };

  std::vector<Term> terms() const {
    std::vector<Term> out;
    for (int a = 0; a < kDim; ++a) {
      for (int b = 0; b < kDim; ++b) {
        if (matrix(a, b) != Complex(0.0)) out.push_back({a, b, matrix(a, b)});
      }
    }
    return out;
  }
};

using EigenOperators = std::array<EigenOperator, 9>;

namespace detail {

struct TableTerm {
  int to;    // 1-based lambda index
  int from;  // 1-based lambda index
  double amplitude;
};

struct TableEntry {
  Bath bath;
  int j;
  double (*frequency)(const ModelParams&);
  std::array<TableTerm, 2> terms;
};

inline const std::array<TableEntry, 9>& eigenoperator_table() {
  static const double s = 1.0 / std::sqrt(2.0);
  static const std::array<TableEntry, 9> table{{
      {Bath::Hot, 1, [](const ModelParams& p) { return p.omega_H; },
       {{{5, 1, 1.0}, {8, 4, 1.0}}}},
      {Bath::Hot, 2, [](const ModelParams& p) { return p.omega_H - p.g; },
       {{{3, 2, s}, {7, 6, s}}}},
      {Bath::Hot, 3, [](const ModelParams& p) { return p.omega_H + p.g; },
       {{{7, 3, s}, {6, 2, -s}}}},
      {Bath::Room, 1, [](const ModelParams& p) { return p.omega_R() - p.g; },
       {{{3, 1, s}, {8, 6, -s}}}},
      {Bath::Room, 2, [](const ModelParams& p) { return p.omega_R(); },
       {{{4, 2, 1.0}, {7, 5, 1.0}}}},
      {Bath::Room, 3, [](const ModelParams& p) { return p.omega_R() + p.g; },
       {{{8, 3, s}, {6, 1, s}}}},
      {Bath::Cold, 1, [](const ModelParams& p) { return p.omega_C - p.g; },
       {{{3, 5, s}, {4, 6, s}}}},
      {Bath::Cold, 2, [](const ModelParams& p) { return p.omega_C + p.g; },
       {{{4, 3, s}, {6, 5, -s}}}},
      // Unit amplitude: sigma_C^- maps |e e e> -> |e e g> with coefficient 1.
      {Bath::Cold, 3, [](const ModelParams& p) { return p.omega_C; },
       {{{2, 1, 1.0}, {8, 7, 1.0}}}},
  }};
  return table;
}

}  // namespace detail

// Builds V_{mu j} in table order (H1..H3, R1..R3, C1..C3). Any operator whose
// tabulated frequency is negative is replaced by its adjoint with |w|.
inline EigenOperators build_eigenoperators(const EigenSystem& /*es*/,
                                           const ModelParams& p) {
  EigenOperators ops;
  const auto& table = detail::eigenoperator_table();
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto& entry = table[k];
    EigenOperator op;
    op.bath = entry.bath;
    op.j = entry.j;
    op.listed_frequency = entry.frequency(p);
    for (const auto& t : entry.terms) {
      op.matrix(t.to - 1, t.from - 1) = t.amplitude;
    }
    if (std::abs(op.listed_frequency) <= 1e-12 * p.omega_H) {
      throw Error(ErrorCode::ZeroFrequency,
                  "V_" + std::string(name_of(op.bath)) + std::to_string(op.j) +
                      " has zero Bohr frequency");
    }
    if (op.listed_frequency < 0.0) {
      op.matrix = dagger(op.matrix);
      op.adjointed = true;
    }
    op.frequency = std::abs(op.listed_frequency);
    ops[k] = op;
  }
  return ops;
}

inline EigenOperators build_eigenoperators(const ModelParams& p) {
  return build_eigenoperators(analytic_eigensystem(p), p);
}

struct CommutatorReport {
  double max_residual = 0.0;
  Bath worst_bath = Bath::Hot;
  int worst_j = 1;
};

// Max over ops of ||[H_S, V] + w V|| evaluated in the product basis.
inline CommutatorReport commutator_residuals(const EigenOperators& ops,
                                             const EigenSystem& es,
                                             const Matrix8c& h) {
  CommutatorReport report;
  for (const auto& op : ops) {
    const Matrix8c v = es.to_product_basis(op.matrix);
    const double r = (h * v - v * h + op.frequency * v).norm();
    if (r > report.max_residual) {
      report.max_residual = r;
      report.worst_bath = op.bath;
      report.worst_j = op.j;
    }
  }
  return report;
}

inline CommutatorReport verify_commutators(const EigenOperators& ops,
                                           const EigenSystem& es,
                                           const Matrix8c& h, double omega_H) {
  const CommutatorReport report = commutator_residuals(ops, es, h);
  if (report.max_residual > 1e-10 * omega_H) {
    throw Error(ErrorCode::CommutatorViolation,
                "V_" + std::string(name_of(report.worst_bath)) +
                    std::to_string(report.worst_j) + " residual " +
                    std::to_string(report.max_residual));
  }
  return report;
}

inline CommutatorReport verify_commutators(const EigenOperators& ops,
                                           const EigenSystem& es,
                                           const ModelParams& p) {
  return verify_commutators(ops, es, build_hamiltonian(p), p.omega_H);
}

// Sum_j (V + V^dagger) for one bath, rotated into the product basis. Equals
// sigma_x on that bath's qubit.
inline Matrix8c bath_coupling_operator(const EigenOperators& ops,
                                       const EigenSystem& es, Bath bath) {
  Matrix8c sum = Matrix8c::Zero();
  for (const auto& op : ops) {
    if (op.bath == bath) sum += op.matrix + dagger(op.matrix);
  }
  return es.to_product_basis(sum);
}

}  // namespace qfridge
