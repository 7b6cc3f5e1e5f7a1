#pragma once

// Three-qubit refrigerator Hamiltonian and its closed-form eigensystem.
//
// Product basis: slot order (H, R, C); within each slot bit 0 is the excited
// state |e> and bit 1 the ground state |g>. Basis index (0-based) is
// 4*b_H + 2*b_R + b_C, so index 0 is |e e e> and index 7 is |g g g>.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qfridge/core.hpp"

namespace qfridge {

struct ModelParams {
  double omega_H = 3.0;
  double omega_C = 1.0;
  double g = 0.003;
  double T_H = 30.0;
  double T_R = 21.0;
  double T_C = 18.0;
  double gamma_H = 0.003;
  double gamma_R = 0.003;
  double gamma_C = 0.003;

  // Resonance condition; never stored.
  double omega_R() const { return omega_H + omega_C; }

  double omega(Bath b) const {
    switch (b) {
      case Bath::Hot: return omega_H;
      case Bath::Room: return omega_R();
      case Bath::Cold: return omega_C;
    }
    return 0.0;
  }
  double temperature(Bath b) const {
    switch (b) {
      case Bath::Hot: return T_H;
      case Bath::Room: return T_R;
      case Bath::Cold: return T_C;
    }
    return 0.0;
  }
  double gamma(Bath b) const {
    switch (b) {
      case Bath::Hot: return gamma_H;
      case Bath::Room: return gamma_R;
      case Bath::Cold: return gamma_C;
    }
    return 0.0;
  }
  double max_gamma() const { return std::max({gamma_H, gamma_R, gamma_C}); }

  void set_temperature(Bath b, double t) {
    switch (b) {
      case Bath::Hot: T_H = t; break;
      case Bath::Room: T_R = t; break;
      case Bath::Cold: T_C = t; break;
    }
  }
  void set_gamma(double gamma) { gamma_H = gamma_R = gamma_C = gamma; }
};

struct ValidatedParams {
  ModelParams params;
  std::vector<std::string> warnings;
};

inline bool nearly_equal_relative(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Hard invariants throw; the temperature ordering T_H > T_R > T_C is only a
// warning because sweeps legitimately cross into the heating regime.
inline ValidatedParams validate_params(const ModelParams& p) {
  const std::array<std::pair<const char*, double>, 9> positive{{
      {"omega_H", p.omega_H},
      {"omega_C", p.omega_C},
      {"g", p.g},
      {"T_H", p.T_H},
      {"T_R", p.T_R},
      {"T_C", p.T_C},
      {"gamma_H", p.gamma_H},
      {"gamma_R", p.gamma_R},
      {"gamma_C", p.gamma_C},
  }};
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::NonPositiveParameter,
                  std::string(name) + " must be positive and finite, got " +
                      std::to_string(value));
    }
  }

  constexpr double kRel = 1e-12;
  const std::array<std::pair<const char*, double>, 3> bohr{{
      {"omega_C", p.omega_C}, {"omega_H", p.omega_H}, {"omega_R", p.omega_R()}}};
  for (const auto& [name, value] : bohr) {
    if (nearly_equal_relative(p.g, value, kRel)) {
      throw Error(ErrorCode::DegenerateBohrFrequency,
                  "g coincides with " + std::string(name) +
                      ", which produces a zero Bohr frequency");
    }
  }

  ValidatedParams out{p, {}};
  if (!(p.T_H > p.T_R)) {
    out.warnings.push_back("T_H <= T_R: hot bath is not the hottest");
  }
  if (!(p.T_R > p.T_C)) {
    out.warnings.push_back("T_R <= T_C: room bath is not warmer than cold bath");
  }
  return out;
}

namespace detail {

using Matrix2c = Eigen::Matrix<Complex, 2, 2>;

inline Matrix2c sigma_z() {
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}
// sigma^+ = |e><g|
inline Matrix2c sigma_plus() {
  Matrix2c m = Matrix2c::Zero();
  m(0, 1) = 1.0;
  return m;
}
inline Matrix2c sigma_minus() { return sigma_plus().transpose(); }

inline Matrix8c embed(const Matrix2c& hot, const Matrix2c& room,
                      const Matrix2c& cold) {
  Matrix8c out;
  for (int a = 0; a < kDim; ++a) {
    for (int b = 0; b < kDim; ++b) {
      out(a, b) = hot((a >> 2) & 1, (b >> 2) & 1) *
                  room((a >> 1) & 1, (b >> 1) & 1) * cold(a & 1, b & 1);
    }
  }
  return out;
}

}  // namespace detail

// Single-qubit operator acting on one slot, identity elsewhere.
inline Matrix8c on_slot(Bath b, const Eigen::Matrix<Complex, 2, 2>& op) {
  const detail::Matrix2c id = detail::Matrix2c::Identity();
  switch (b) {
    case Bath::Hot: return detail::embed(op, id, id);
    case Bath::Room: return detail::embed(id, op, id);
    case Bath::Cold: return detail::embed(id, id, op);
  }
  return Matrix8c::Zero();
}

inline Matrix8c sigma_x_on(Bath b) {
  return on_slot(b, detail::sigma_plus() + detail::sigma_minus());
}

inline Matrix8c free_hamiltonian(const ModelParams& p) {
  Matrix8c h = Matrix8c::Zero();
  for (Bath b : kBaths) h += (0.5 * p.omega(b)) * on_slot(b, detail::sigma_z());
  return h;
}

inline Matrix8c interaction_hamiltonian(const ModelParams& p) {
  using namespace detail;
  const Matrix8c forward = embed(sigma_plus(), sigma_minus(), sigma_plus());
  const Matrix8c backward = embed(sigma_minus(), sigma_plus(), sigma_minus());
  return p.g * (forward + backward);
}

inline Matrix8c build_hamiltonian(const ModelParams& p) {
  return free_hamiltonian(p) + interaction_hamiltonian(p);
}

struct EigenSystem {
  // Energies in the fixed order [w_R, w_H, g, -w_C, w_C, -g, -w_H, -w_R].
  std::array<double, kDim> eigenvalues{};
  // Column i is |lambda_{i+1}> in the product basis.
  Matrix8c eigenvectors = Matrix8c::Identity();

  Matrix8c hamiltonian_in_eigenbasis() const {
    Matrix8c d = Matrix8c::Zero();
    for (int i = 0; i < kDim; ++i) d(i, i) = eigenvalues[i];
    return d;
  }
  Vector8 energy_vector() const {
    return Eigen::Map<const Vector8>(eigenvalues.data());
  }
  // Product-basis representation of an eigenbasis operator.
  Matrix8c to_product_basis(const Matrix8c& op) const {
    return eigenvectors * op * eigenvectors.adjoint();
  }
  Matrix8c to_eigenbasis(const Matrix8c& op) const {
    return eigenvectors.adjoint() * op * eigenvectors;
  }
};

inline std::array<double, kDim> analytic_spectrum(const ModelParams& p) {
  const double wr = p.omega_R();
  return {wr, p.omega_H, p.g, -p.omega_C, p.omega_C, -p.g, -p.omega_H, -wr};
}

// Closed-form eigenvectors. Six are product states; the dressed pair mixes
// |e_H g_R e_C> (index 2) and |g_H e_R g_C> (index 5): the symmetric
// combination carries +g and sits at lambda_3, the antisymmetric one carries
// -g and sits at lambda_6. With these real phases every bath coupling
// sigma_mu^- splits into the nine tabulated eigenoperators with the
// tabulated signs.
inline EigenSystem analytic_eigensystem(const ModelParams& p) {
  EigenSystem es;
  es.eigenvalues = analytic_spectrum(p);
  es.eigenvectors.setZero();
  const double s = 1.0 / std::sqrt(2.0);
  // lambda_i -> product index for the six bare states.
  constexpr std::array<std::pair<int, int>, 6> bare{
      {{0, 0}, {1, 1}, {3, 3}, {4, 4}, {6, 6}, {7, 7}}};
  for (auto [lambda, product] : bare) es.eigenvectors(product, lambda) = 1.0;
  es.eigenvectors(2, 2) = s;
  es.eigenvectors(5, 2) = s;
  es.eigenvectors(2, 5) = s;
  es.eigenvectors(5, 5) = -s;
  return es;
}

// Returns the analytic eigensystem after checking it against a numerical
// diagonalization of h (sorted spectra agree to 1e-10 relative) and checking
// the eigen-equation residual of every column.
inline EigenSystem eigensystem(const Matrix8c& h, const ModelParams& p) {
  EigenSystem es = analytic_eigensystem(p);

  Eigen::SelfAdjointEigenSolver<Matrix8c> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenvalueMismatch, "numerical diagonalization failed");
  }
  std::array<double, kDim> numeric{};
  for (int i = 0; i < kDim; ++i) numeric[i] = solver.eigenvalues()(i);
  std::array<double, kDim> analytic = es.eigenvalues;
  std::sort(analytic.begin(), analytic.end());

  const double scale = std::max(1.0, p.omega_R());
  for (int i = 0; i < kDim; ++i) {
    if (std::abs(numeric[i] - analytic[i]) > 1e-10 * scale) {
      throw Error(ErrorCode::EigenvalueMismatch,
                  "numerical eigenvalue " + std::to_string(numeric[i]) +
                      " vs analytic " + std::to_string(analytic[i]));
    }
  }

  const double hnorm = h.norm();
  for (int i = 0; i < kDim; ++i) {
    const double residual =
        (h * es.eigenvectors.col(i) - es.eigenvalues[i] * es.eigenvectors.col(i))
            .norm();
    if (residual > 1e-12 * std::max(hnorm, 1.0)) {
      throw Error(ErrorCode::EigenvalueMismatch,
                  "eigenvector residual too large for lambda_" +
                      std::to_string(i + 1));
    }
  }
  return es;
}

inline EigenSystem eigensystem(const ModelParams& p) {
  return eigensystem(build_hamiltonian(p), p);
}

// Gibbs populations exp(-e_i/T)/Z over the eigenbasis.
inline Vector8 gibbs_populations(const EigenSystem& es, double temperature) {
  Vector8 pop;
  const double emin = *std::min_element(es.eigenvalues.begin(), es.eigenvalues.end());
  for (int i = 0; i < kDim; ++i) {
    pop(i) = std::exp(-(es.eigenvalues[i] - emin) / temperature);
  }
  return pop / pop.sum();
}

}  // namespace qfridge
