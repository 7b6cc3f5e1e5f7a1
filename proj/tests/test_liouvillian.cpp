#include <gtest/gtest.h>

#include <cmath>

#include "qfridge/liouvillian.hpp"
#include "qfridge/selftest.hpp"
#include "test_support.hpp"

using namespace qfridge;
using qfridge::testing::seeded_rng;
using qfridge::testing::strong_coupling_params;
using qfridge::testing::weak_coupling_params;

namespace {

template <typename F>
void expect_code(ErrorCode code, F&& f) {
  try {
    f();
    FAIL() << "expected " << name_of(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

ModelParams equal_temperature_params(double t) {
  ModelParams p = strong_coupling_params();
  p.T_H = p.T_R = p.T_C = t;
  return p;
}

}  // namespace

// Reference values from 30-digit arithmetic.
TEST(Spectra, MeanOccupationReference) {
  EXPECT_NEAR(mean_occupation(3.0, 30.0), 9.508331944775049624, 1e-14);
  EXPECT_EQ(mean_occupation(3.0, 1e-3), 0.0);
  EXPECT_NEAR(mean_occupation(1e-9, 1.0), 1e9, 1.0);
}

TEST(Spectra, SpectralPairReference) {
  const SpectralPair pair = spectral_pair(3.0, 30.0, 0.003);
  EXPECT_NEAR(pair.absorption, 0.028524995834325149, 1e-16);
  EXPECT_NEAR(pair.emission, 0.031524995834325149, 1e-16);
}

TEST(Spectra, DetailedBalanceRatio) {
  auto rng = seeded_rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 100; ++k) {
    const double w = u(rng), t = u(rng), gamma = 1e-3 * u(rng);
    const SpectralPair pair = spectral_pair(w, t, gamma);
    EXPECT_NEAR(pair.emission / pair.absorption, std::exp(w / t), 1e-12 * std::exp(w / t));
    EXPECT_NEAR(pair.emission - pair.absorption, gamma, 1e-12 * pair.emission);
  }
}

TEST(Spectra, InvalidArgumentsAreDomainErrors) {
  expect_code(ErrorCode::DomainError, [] { mean_occupation(0.0, 1.0); });
  expect_code(ErrorCode::DomainError, [] { mean_occupation(1.0, -1.0); });
  expect_code(ErrorCode::DomainError, [] { spectral_pair(1.0, 1.0, 0.0); });
}

TEST(DensityMatrixTest, ValidationRejectsBadStates) {
  Matrix8c m = Matrix8c::Identity() / 8.0;
  EXPECT_NO_THROW(DensityMatrix::from_matrix(m));
  Matrix8c bad = m;
  bad(0, 1) = Complex(0.0, 0.01);
  expect_code(ErrorCode::InvalidState, [&] { DensityMatrix::from_matrix(bad); });
  expect_code(ErrorCode::InvalidState, [&] { DensityMatrix::from_matrix(2.0 * m); });
  Vector8 pop = Vector8::Constant(0.2);
  pop(0) = -0.4;
  expect_code(ErrorCode::InvalidState, [&] { DensityMatrix::from_populations(pop); });
}

TEST(Generator, PreservesTraceAndHermiticity) {
  auto rng = seeded_rng(6);
  for (int k = 0; k < 20; ++k) {
    const GeneratorContext ctx = make_context(random_valid_params(rng));
    const Matrix8c rho = random_density_matrix(rng).matrix();
    const Matrix8c l = apply_generator(rho, ctx);
    EXPECT_LE(std::abs(l.trace()), 1e-14);
    EXPECT_LE((l - l.adjoint()).norm(), 1e-14);
    for (Bath b : kBaths) EXPECT_LE(std::abs(apply_dissipator(b, rho, ctx).trace()), 1e-14);
  }
}

TEST(Generator, EachBathAnnihilatesItsOwnGibbsState) {
  auto rng = seeded_rng(7);
  for (int k = 0; k < 20; ++k) {
    const ModelParams p = random_valid_params(rng);
    const GeneratorContext ctx = make_context(p);
    for (Bath b : kBaths) {
      const Matrix8c gibbs = gibbs_state(ctx.eigensystem, p.temperature(b));
      EXPECT_LE(apply_dissipator(b, gibbs, ctx).norm(), 1e-15) << name_of(b);
    }
  }
}

TEST(Generator, SuperoperatorMatchesDirectAction) {
  const GeneratorContext ctx = make_context(strong_coupling_params());
  const SuperMatrix l = generator_superoperator(ctx);
  auto rng = seeded_rng(8);
  const Matrix8c rho = random_density_matrix(rng).matrix();
  EXPECT_LE((unvectorize(l * vectorize(rho)) - apply_generator(rho, ctx)).norm(), 1e-14);
}

TEST(Evolve, PropagatorPowerMatchesExplicitStepping) {
  const GeneratorContext ctx = make_context(strong_coupling_params());
  auto rng = seeded_rng(9);
  const DensityMatrix rho0 = random_density_matrix(rng);
  const Trajectory stepped = evolve(rho0, {0.05, 1000, 100}, ctx);
  const Trajectory powered = evolve(rho0, {0.05, 1000, 0}, ctx);
  EXPECT_EQ(stepped.states.size(), 11u);
  EXPECT_DOUBLE_EQ(stepped.times.back(), 50.0);
  EXPECT_LE(trace_distance(stepped.final_state, powered.final_state), 1e-12);
}

TEST(Evolve, EqualTemperaturesRelaxToGibbs) {
  const ModelParams p = equal_temperature_params(7.5);
  const GeneratorContext ctx = make_context(p);
  auto rng = seeded_rng(10);
  // Slowest rate is O(gamma) = 3e-3; t = 2e4 is ~60 relaxation times.
  const Trajectory tr = evolve(random_density_matrix(rng), {0.05, 400000, 0}, ctx);
  EXPECT_LE(trace_distance(tr.final_state, gibbs_state(ctx.eigensystem, 7.5)), 1e-8);
  EXPECT_GE(tr.min_eigenvalue, -1e-12);
}

TEST(Evolve, OversizedStepIsReported) {
  const GeneratorContext ctx = make_context(weak_coupling_params());
  auto rng = seeded_rng(11);
  const DensityMatrix rho0 = random_density_matrix(rng);
  expect_code(ErrorCode::StepSizeUnstable, [&] { evolve(rho0, {5.0, 200, 0}, ctx); });
}

TEST(Evolve, DefaultStepResolvesFastestScale) {
  const GeneratorContext ctx = make_context(weak_coupling_params());
  EXPECT_NEAR(default_time_step(ctx), 0.01 / 4.0, 1e-15);
}
