#pragma once

// Bath spectra, per-bath dissipators and the full master-equation generator,
// plus a fourth-order Runge-Kutta integrator used as an independent check on
// the stationary solution.
//
// All density matrices live in the H_S eigenbasis.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qfridge/core.hpp"
#include "qfridge/eigenoperators.hpp"
#include "qfridge/model.hpp"

namespace qfridge {

// Bose-Einstein occupation 1/(exp(w/T) - 1).
inline double mean_occupation(double w, double temperature) {
  if (!(w > 0.0) || !(temperature > 0.0)) {
    throw Error(ErrorCode::DomainError,
                "mean_occupation needs w > 0 and T > 0 (w=" + std::to_string(w) +
                    ", T=" + std::to_string(temperature) + ")");
  }
  // expm1 keeps precision for w << T; overflow to inf gives exactly 0.
  return 1.0 / std::expm1(w / temperature);
}

struct SpectralPair {
  double absorption;  // J(w)  = gamma * n
  double emission;    // J(-w) = gamma * (n + 1)
};

inline SpectralPair spectral_pair(double w, double temperature, double gamma) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::DomainError, "gamma must be positive");
  }
  const double n = mean_occupation(w, temperature);
  return {gamma * n, gamma * (n + 1.0)};
}

struct SpectralLine {
  double frequency = 0.0;  // canonical w > 0
  double n_bar = 0.0;
  double absorption = 0.0;  // J(w)
  double emission = 0.0;    // J(-w)
  double listed_frequency = 0.0;
  bool adjointed = false;
};

struct BathSpectrum {
  Bath bath = Bath::Hot;
  std::array<SpectralLine, 3> lines{};
};

using Spectra = std::array<BathSpectrum, 3>;

inline Spectra build_spectra(const EigenOperators& ops, const ModelParams& p) {
  Spectra spectra;
  for (Bath b : kBaths) spectra[index_of(b)].bath = b;
  for (const auto& op : ops) {
    const double t = p.temperature(op.bath);
    const double gamma = p.gamma(op.bath);
    SpectralLine line;
    line.frequency = op.frequency;
    line.n_bar = mean_occupation(op.frequency, t);
    const SpectralPair pair = spectral_pair(op.frequency, t, gamma);
    line.absorption = pair.absorption;
    line.emission = pair.emission;
    line.listed_frequency = op.listed_frequency;
    line.adjointed = op.adjointed;
    spectra[index_of(op.bath)].lines[op.j - 1] = line;
  }
  return spectra;
}

// Everything the generator needs, precomputed once per parameter point.
struct GeneratorContext {
  ModelParams params;
  EigenSystem eigensystem;
  EigenOperators ops;
  Spectra spectra;

  const SpectralLine& line(const EigenOperator& op) const {
    return spectra[index_of(op.bath)].lines[op.j - 1];
  }
};

inline GeneratorContext make_context(const ModelParams& p) {
  GeneratorContext ctx;
  ctx.params = p;
  ctx.eigensystem = eigensystem(p);
  ctx.ops = build_eigenoperators(ctx.eigensystem, p);
  ctx.spectra = build_spectra(ctx.ops, p);
  return ctx;
}

// Validated density matrix (Hermitian, unit trace, positive semidefinite).
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(const Matrix8c& m) {
    if ((m - m.adjoint()).norm() > 1e-12) {
      throw Error(ErrorCode::InvalidState, "density matrix is not Hermitian");
    }
    if (std::abs(m.trace() - Complex(1.0)) > 1e-12) {
      throw Error(ErrorCode::InvalidState, "density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix8c> solver(m, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
      throw Error(ErrorCode::InvalidState, "density matrix is not positive");
    }
    return DensityMatrix(m);
  }

  static DensityMatrix from_populations(const Vector8& pop) {
    Matrix8c m = Matrix8c::Zero();
    for (int i = 0; i < kDim; ++i) m(i, i) = pop(i);
    return from_matrix(m);
  }

  static DensityMatrix maximally_mixed() {
    return DensityMatrix(Matrix8c::Identity() / double(kDim));
  }

  const Matrix8c& matrix() const { return m_; }
  Vector8 populations() const { return m_.diagonal().real(); }

 private:
  explicit DensityMatrix(const Matrix8c& m) : m_(m) {}
  Matrix8c m_;
};

// Random full-rank state rho = A A^dagger / tr, A with complex Gaussian entries.
template <typename Rng>
DensityMatrix random_density_matrix(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix8c a;
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  }
  Matrix8c rho = a * a.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix::from_matrix(rho);
}

// L_mu[rho] = sum_j J(-w)[2 V rho V^+ - {V^+ V, rho}] + J(w)[2 V^+ rho V - {V V^+, rho}]
inline Matrix8c apply_dissipator(Bath bath, const Matrix8c& rho,
                                 const GeneratorContext& ctx) {
  Matrix8c out = Matrix8c::Zero();
  for (const auto& op : ctx.ops) {
    if (op.bath != bath) continue;
    const SpectralLine& line = ctx.line(op);
    const Matrix8c& v = op.matrix;
    const Matrix8c vd = dagger(v);
    const Matrix8c vdv = vd * v;
    const Matrix8c vvd = v * vd;
    out += line.emission * (2.0 * v * rho * vd - vdv * rho - rho * vdv);
    out += line.absorption * (2.0 * vd * rho * v - vvd * rho - rho * vvd);
  }
  return out;
}

// Sum of the three dissipators plus -i[H_S, rho]. In the eigenbasis the
// commutator only rotates coherences.
inline Matrix8c apply_generator(const Matrix8c& rho, const GeneratorContext& ctx) {
  Matrix8c out = Matrix8c::Zero();
  for (Bath b : kBaths) out += apply_dissipator(b, rho, ctx);
  const auto& e = ctx.eigensystem.eigenvalues;
  for (int a = 0; a < kDim; ++a) {
    for (int b = 0; b < kDim; ++b) {
      out(a, b) += Complex(0.0, -(e[a] - e[b])) * rho(a, b);
    }
  }
  return out;
}

inline Matrix8c gibbs_state(const EigenSystem& es, double temperature) {
  Matrix8c rho = Matrix8c::Zero();
  const Vector8 pop = gibbs_populations(es, temperature);
  for (int i = 0; i < kDim; ++i) rho(i, i) = pop(i);
  return rho;
}

// Trace distance 0.5 * sum |eig(a - b)| for Hermitian a, b.
inline double trace_distance(const Matrix8c& a, const Matrix8c& b) {
  const Matrix8c d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix8c> solver(d, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

inline double min_eigenvalue(const Matrix8c& rho) {
  const Matrix8c h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix8c> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline constexpr int kSuperDim = kDim * kDim;

// Heap-allocated: 64x64 complex is too large for comfortable stack use.
using SuperMatrix = Eigen::MatrixXcd;
using SuperVector = Eigen::VectorXcd;

// Column-major vectorization: vec(rho)[a + 8 b] = rho(a, b).
inline SuperVector vectorize(const Matrix8c& m) {
  return Eigen::Map<const SuperVector>(m.data(), kSuperDim);
}
inline Matrix8c unvectorize(const SuperVector& v) {
  return Eigen::Map<const Matrix8c>(v.data());
}

// Matrix of the generator acting on vec(rho), assembled column by column from
// apply_generator on the matrix units |a><b|.
inline SuperMatrix generator_superoperator(const GeneratorContext& ctx) {
  SuperMatrix l(kSuperDim, kSuperDim);
  for (int b = 0; b < kDim; ++b) {
    for (int a = 0; a < kDim; ++a) {
      Matrix8c unit = Matrix8c::Zero();
      unit(a, b) = 1.0;
      l.col(a + kDim * b) = vectorize(apply_generator(unit, ctx));
    }
  }
  return l;
}

inline double default_time_step(const GeneratorContext& ctx) {
  double max_rate = 0.0;
  for (const auto& spectrum : ctx.spectra) {
    for (const auto& line : spectrum.lines) {
      max_rate = std::max(max_rate, line.emission);
    }
  }
  return 0.01 / std::max(max_rate, ctx.params.omega_R());
}

struct EvolveOptions {
  double dt = 0.0;  // <= 0 selects default_time_step
  std::uint64_t steps = 0;
  // 0: only the final state is produced (via powers of the one-step map).
  // n > 0: explicit stepping, every n-th state is recorded.
  std::uint64_t record_every = 0;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Matrix8c> states;
  Matrix8c final_state = Matrix8c::Zero();
  double trace_drift = 0.0;
  double generator_residual = 0.0;  // ||L[rho_final]||
  double min_eigenvalue = 0.0;
};

namespace detail {

inline Matrix8c rk4_step(const Matrix8c& rho, double dt,
                         const GeneratorContext& ctx) {
  const Matrix8c k1 = apply_generator(rho, ctx);
  const Matrix8c k2 = apply_generator(rho + 0.5 * dt * k1, ctx);
  const Matrix8c k3 = apply_generator(rho + 0.5 * dt * k2, ctx);
  const Matrix8c k4 = apply_generator(rho + dt * k3, ctx);
  return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One classic RK4 step for a linear autonomous system is the polynomial
// I + A + A^2/2 + A^3/6 + A^4/24 with A = dt * L.
inline SuperMatrix rk4_propagator(const SuperMatrix& l, double dt) {
  const SuperMatrix a = dt * l;
  const SuperMatrix a2 = a * a;
  const SuperMatrix a3 = a2 * a;
  const SuperMatrix a4 = a3 * a;
  return SuperMatrix::Identity(kSuperDim, kSuperDim) + a + a2 / 2.0 + a3 / 6.0 + a4 / 24.0;
}

}  // namespace detail

inline Trajectory evolve(const DensityMatrix& rho0, const EvolveOptions& options,
                         const GeneratorContext& ctx) {
  Trajectory out;
  out.dt = options.dt > 0.0 ? options.dt : default_time_step(ctx);
  Matrix8c rho = rho0.matrix();

  if (options.record_every > 0) {
    out.times.push_back(0.0);
    out.states.push_back(rho);
    for (std::uint64_t s = 1; s <= options.steps; ++s) {
      rho = detail::rk4_step(rho, out.dt, ctx);
      if (s % options.record_every == 0 || s == options.steps) {
        out.times.push_back(double(s) * out.dt);
        out.states.push_back(rho);
      }
    }
  } else if (options.steps > 0) {
    SuperMatrix power = detail::rk4_propagator(generator_superoperator(ctx), out.dt);
    SuperVector v = vectorize(rho);
    for (std::uint64_t n = options.steps; n > 0; n >>= 1) {
      if (n & 1U) v = (power * v).eval();
      if (n > 1) power = (power * power).eval();
    }
    rho = unvectorize(v);
  }

  const Complex tr = rho.trace();
  out.trace_drift = std::abs(tr - Complex(1.0));
  if (!std::isfinite(out.trace_drift) || out.trace_drift > 1e-6 ||
      !(rho.norm() <= 1.0 + 1e-6)) {
    throw Error(ErrorCode::StepSizeUnstable,
                "integration diverged (dt=" + std::to_string(out.dt) + ")");
  }
  rho /= tr;
  out.final_state = 0.5 * (rho + rho.adjoint());
  out.generator_residual = apply_generator(out.final_state, ctx).norm();
  out.min_eigenvalue = min_eigenvalue(out.final_state);
  return out;
}

}  // namespace qfridge
