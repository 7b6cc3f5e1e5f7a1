#pragma once

// Population rate matrix and stationary state.
//
// The rate matrix is assembled two independent ways: from the closed-form
// Kronecker/CNOT expressions (literal) and from the eigenoperator matrices
// restricted to populations (derived). They must agree entrywise.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qfridge/core.hpp"
#include "qfridge/eigenoperators.hpp"
#include "qfridge/liouvillian.hpp"
#include "qfridge/model.hpp"

namespace qfridge {

enum class Provenance { Literal, Derived };

struct RateMatrix {
  Provenance provenance = Provenance::Literal;
  Matrix8 total = Matrix8::Zero();
  std::array<Matrix8, 3> parts{Matrix8::Zero(), Matrix8::Zero(), Matrix8::Zero()};

  const Matrix8& part(Bath b) const { return parts[index_of(b)]; }
};

struct PopulationVector {
  Vector8 values = Vector8::Zero();
};

namespace kron {

using Mat = Eigen::MatrixXd;

inline Mat product(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Mat product(const Mat& a, const Mat& b, const Mat& c) {
  return product(product(a, b), c);
}

inline Mat identity() { return Mat::Identity(2, 2); }

// (1 + sigma_z)/2 and (1 - sigma_z)/2 with sigma_z = diag(1, -1): projectors
// on the excited (bit 0) and ground (bit 1) level.
inline Mat upper() {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1.0;
  return m;
}
inline Mat lower() {
  Mat m = Mat::Zero(2, 2);
  m(1, 1) = 1.0;
  return m;
}

// Controlled-NOT on an n-qubit population index; slots are 1-based, slot 1 is
// the most significant bit. The target flips when the control bit is 1.
inline Mat cnot(int qubits, int control, int target) {
  const int dim = 1 << qubits;
  Mat m = Mat::Zero(dim, dim);
  const int cbit = 1 << (qubits - control);
  const int tbit = 1 << (qubits - target);
  for (int x = 0; x < dim; ++x) {
    const int y = (x & cbit) ? (x ^ tbit) : x;
    m(y, x) = 1.0;
  }
  return m;
}

// 2x2 transfer block between the bit-0 and bit-1 level of one slot. For an
// operator that was replaced by its adjoint the roles of J(w) and J(-w) swap,
// since the jump now runs from the bit-1 level to the bit-0 level.
inline Mat transfer_block(const SpectralLine& line) {
  const double down = line.adjointed ? line.absorption : line.emission;
  const double up = line.adjointed ? line.emission : line.absorption;
  Mat m(2, 2);
  m << -down, up, down, -up;
  return m;
}

}  // namespace kron

// Rate matrix from the closed-form tensor expressions. Uses only the spectra,
// never the eigenoperator matrices.
inline RateMatrix build_rate_matrix_literal(const Spectra& spectra) {
  using namespace kron;
  auto J = [&](Bath b, int j) { return transfer_block(spectra[index_of(b)].lines[j - 1]); };
  const Mat one = identity();
  const Mat up = upper();
  const Mat lo = lower();
  const Mat same = product(up, up) + product(lo, lo);
  const Mat differ = product(up, lo) + product(lo, up);

  std::array<std::array<Mat, 3>, 3> m;
  // Hot bath.
  m[0][0] = 2.0 * product(J(Bath::Hot, 1), same);
  {
    const Mat c23 = cnot(2, 1, 2);  // slots 2,3 of the full register
    m[0][1] = product(one, c23 * product(J(Bath::Hot, 2), lo) * c23.transpose());
  }
  m[0][2] = product(J(Bath::Hot, 3), differ);
  // Room bath.
  m[1][0] = product(up, J(Bath::Room, 1), up) + product(lo, J(Bath::Room, 1), lo);
  m[1][1] = 2.0 * (product(up, J(Bath::Room, 2), lo) + product(lo, J(Bath::Room, 2), up));
  {
    const Mat c13 = cnot(3, 1, 3);
    m[1][2] = c13 * product(J(Bath::Room, 3), one, up) * c13.transpose();
  }
  // Cold bath.
  {
    const Mat c21 = cnot(3, 2, 1);
    m[2][0] = c21 * product(lo, J(Bath::Cold, 1), one) * c21.transpose();
  }
  m[2][1] = product(differ, J(Bath::Cold, 2));
  m[2][2] = 2.0 * product(same, J(Bath::Cold, 3));

  RateMatrix out;
  out.provenance = Provenance::Literal;
  for (std::size_t mu = 0; mu < 3; ++mu) {
    Matrix8 part = Matrix8::Zero();
    for (const auto& term : m[mu]) part += term;
    out.parts[mu] = part;
    out.total += part;
  }
  return out;
}

// Rate matrix from the eigenoperators: a term c |a><b| of V contributes the
// jump b -> a at 2|c|^2 J(-w) and a -> b at 2|c|^2 J(w).
inline RateMatrix build_rate_matrix_derived(const EigenOperators& ops,
                                            const Spectra& spectra) {
  RateMatrix out;
  out.provenance = Provenance::Derived;
  for (const auto& op : ops) {
    const SpectralLine& line = spectra[index_of(op.bath)].lines[op.j - 1];
    Matrix8& part = out.parts[index_of(op.bath)];
    for (const auto& t : op.terms()) {
      const double weight = 2.0 * std::norm(t.amplitude);
      const double down = weight * line.emission;
      const double up = weight * line.absorption;
      part(t.row, t.col) += down;
      part(t.col, t.col) -= down;
      part(t.col, t.row) += up;
      part(t.row, t.row) -= up;
    }
  }
  for (const auto& part : out.parts) out.total += part;
  return out;
}

inline double max_abs_difference(const RateMatrix& a, const RateMatrix& b) {
  double d = (a.total - b.total).cwiseAbs().maxCoeff();
  for (std::size_t mu = 0; mu < 3; ++mu) {
    d = std::max(d, (a.parts[mu] - b.parts[mu]).cwiseAbs().maxCoeff());
  }
  return d;
}

struct SteadySolveInfo {
  double condition_reciprocal = 0.0;
  double kernel_gap = 0.0;  // second-smallest / largest singular value
  bool used_svd_fallback = false;
  double clamped_mass = 0.0;
};

// Normalized kernel of M. The last row is replaced by the normalization
// constraint and the system is solved in extended precision with one step of
// iterative refinement; SVD is the fallback for ill-conditioned cases.
inline PopulationVector solve_steady(const Matrix8& m, SteadySolveInfo* info = nullptr) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::DegenerateKernel, "rate matrix is zero or non-finite");
  }
  const double colsum = m.colwise().sum().cwiseAbs().maxCoeff();
  if (colsum > 1e-12 * scale) {
    throw Error(ErrorCode::DomainError, "rate matrix columns do not sum to zero");
  }

  SteadySolveInfo local;
  Eigen::JacobiSVD<Matrix8> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();  // descending
  local.kernel_gap = sv(kDim - 2) / sv(0);
  if (local.kernel_gap <= 1e-13) {
    throw Error(ErrorCode::DegenerateKernel,
                "rate matrix kernel has dimension > 1 (disconnected transition graph)");
  }

  using LMatrix = Eigen::Matrix<long double, kDim, kDim>;
  using LVector = Eigen::Matrix<long double, kDim, 1>;
  LMatrix a = m.cast<long double>();
  a.row(kDim - 1).setOnes();
  LVector rhs = LVector::Zero();
  rhs(kDim - 1) = 1.0L;
  Eigen::FullPivLU<LMatrix> lu(a);
  local.condition_reciprocal = static_cast<double>(lu.rcond());

  Vector8 x;
  if (local.condition_reciprocal < 1e-12) {
    local.used_svd_fallback = true;
    x = svd.matrixV().col(kDim - 1);
    x /= x.sum();
  } else {
    LVector lx = lu.solve(rhs);
    lx += lu.solve(LVector(rhs - a * lx));
    x = lx.cast<double>();
  }

  for (int i = 0; i < kDim; ++i) {
    if (x(i) < -1e-8) {
      throw Error(ErrorCode::NegativePopulation,
                  "population " + std::to_string(i + 1) + " = " + std::to_string(x(i)));
    }
    if (x(i) < 0.0) {
      local.clamped_mass += -x(i);
      x(i) = 0.0;
    }
  }
  x /= x.sum();
  if (info) *info = local;
  return PopulationVector{x};
}

struct SteadyDiagnostics {
  double rate_matrix_mismatch = 0.0;  // max |literal - derived|
  double generator_residual = 0.0;    // ||L[rho_ss]|| of the full generator
  double max_coherence = 0.0;         // largest |off-diagonal| of L[rho_ss]
  SteadySolveInfo solve;
  std::vector<std::string> warnings;
};

struct SteadyState {
  GeneratorContext context;
  RateMatrix literal;
  RateMatrix derived;
  PopulationVector populations;
  SteadyDiagnostics diagnostics;

  Matrix8c density_matrix() const {
    Matrix8c rho = Matrix8c::Zero();
    for (int i = 0; i < kDim; ++i) rho(i, i) = populations.values(i);
    return rho;
  }
};

// End-to-end stationary state: both rate matrices, their agreement, the
// kernel, and a check that the full generator annihilates the diagonal state.
inline SteadyState steady_state_full(const ModelParams& params) {
  ValidatedParams validated = validate_params(params);
  SteadyState out;
  out.context = make_context(validated.params);
  out.literal = build_rate_matrix_literal(out.context.spectra);
  out.derived = build_rate_matrix_derived(out.context.ops, out.context.spectra);
  out.diagnostics.warnings = std::move(validated.warnings);

  const double scale = out.literal.total.cwiseAbs().maxCoeff();
  out.diagnostics.rate_matrix_mismatch = max_abs_difference(out.literal, out.derived);
  if (out.diagnostics.rate_matrix_mismatch > 1e-10 * scale) {
    throw Error(ErrorCode::OracleDisagreement,
                "literal and derived rate matrices differ by " +
                    std::to_string(out.diagnostics.rate_matrix_mismatch));
  }

  out.populations = solve_steady(out.literal.total, &out.diagnostics.solve);

  const Matrix8c residual = apply_generator(out.density_matrix(), out.context);
  out.diagnostics.generator_residual = residual.norm();
  for (int a = 0; a < kDim; ++a) {
    for (int b = 0; b < kDim; ++b) {
      if (a != b) {
        out.diagnostics.max_coherence =
            std::max(out.diagnostics.max_coherence, std::abs(residual(a, b)));
      }
    }
  }
  if (out.diagnostics.generator_residual > 1e-10) {
    throw Error(ErrorCode::OracleDisagreement,
                "full generator residual " +
                    std::to_string(out.diagnostics.generator_residual));
  }
  return out;
}

// Slowest nonzero relaxation rate of the population dynamics.
inline double slowest_relaxation_rate(const Matrix8& m) {
  Eigen::EigenSolver<Matrix8> solver(m, false);
  const double scale = m.cwiseAbs().maxCoeff();
  double slowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDim; ++i) {
    const double r = -solver.eigenvalues()(i).real();
    if (r > 1e-9 * scale) slowest = std::min(slowest, r);
  }
  return slowest;
}

}  // namespace qfridge
