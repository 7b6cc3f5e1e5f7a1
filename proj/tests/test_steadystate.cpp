#include <gtest/gtest.h>

#include <cmath>

#include "qfridge/selftest.hpp"
#include "qfridge/steadystate.hpp"
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

}  // namespace

TEST(Kron, CnotPermutesTargetWhenControlSet) {
  // Basis order |00>, |01>, |10>, |11> with qubit 1 most significant.
  const kron::Mat c = kron::cnot(2, 1, 2);
  kron::Mat expected(4, 4);
  expected << 1, 0, 0, 0,
              0, 1, 0, 0,
              0, 0, 0, 1,
              0, 0, 1, 0;
  EXPECT_EQ(c, expected);
  const kron::Mat c3 = kron::cnot(3, 2, 1);
  EXPECT_EQ((c3 * c3 - kron::Mat::Identity(8, 8)).norm(), 0.0);
  EXPECT_EQ(c3(4 + 2, 2), 1.0);  // |0 1 0> -> |1 1 0>
}

TEST(Kron, TransferBlockConservesProbability) {
  SpectralLine line;
  line.absorption = 0.2;
  line.emission = 0.5;
  const kron::Mat b = kron::transfer_block(line);
  EXPECT_EQ(b(1, 0), 0.5);
  EXPECT_EQ(b(0, 1), 0.2);
  EXPECT_EQ(b.colwise().sum().cwiseAbs().maxCoeff(), 0.0);
  line.adjointed = true;
  EXPECT_EQ(kron::transfer_block(line)(1, 0), 0.2);
}

TEST(RateMatrix, HotJumpFromTopLevelReference) {
  // lambda_1 -> lambda_5 is the only hot transition out of |eee>, at 2 J_H(-w_H).
  const ModelParams p = weak_coupling_params();
  const GeneratorContext ctx = make_context(p);
  const RateMatrix m = build_rate_matrix_literal(ctx.spectra);
  EXPECT_NEAR(m.part(Bath::Hot)(4, 0), 2.0 * 0.031524995834325149, 1e-15);
  EXPECT_NEAR(m.part(Bath::Hot)(0, 4), 2.0 * 0.028524995834325149, 1e-15);
  EXPECT_EQ(m.part(Bath::Hot)(1, 0), 0.0);
}

TEST(RateMatrix, DressedTransitionsCarryHalfWeight) {
  const ModelParams p = strong_coupling_params();
  const GeneratorContext ctx = make_context(p);
  const RateMatrix m = build_rate_matrix_literal(ctx.spectra);
  const SpectralPair h2 = spectral_pair(p.omega_H - p.g, p.T_H, p.gamma_H);
  EXPECT_NEAR(m.part(Bath::Hot)(2, 1), h2.emission, 1e-15);   // lambda_2 -> lambda_3
  EXPECT_NEAR(m.part(Bath::Hot)(6, 5), h2.emission, 1e-15);   // lambda_6 -> lambda_7
  EXPECT_NEAR(m.part(Bath::Hot)(1, 2), h2.absorption, 1e-15);
}

TEST(RateMatrix, LiteralEqualsDerivedForRandomParameters) {
  auto rng = seeded_rng(12);
  for (int k = 0; k < 100; ++k) {
    const ModelParams p = random_valid_params(rng);
    const GeneratorContext ctx = make_context(p);
    const RateMatrix lit = build_rate_matrix_literal(ctx.spectra);
    const RateMatrix der = build_rate_matrix_derived(ctx.ops, ctx.spectra);
    const double scale = lit.total.cwiseAbs().maxCoeff();
    EXPECT_LE(max_abs_difference(lit, der), 1e-12 * scale) << "g=" << p.g;
    EXPECT_LE(lit.total.colwise().sum().cwiseAbs().maxCoeff(), 1e-15 * scale);
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) {
        if (i != j) {
          EXPECT_GE(lit.total(i, j), 0.0);
        }
      }
    }
  }
}

TEST(RateMatrix, AdjointedColdOperatorStillAgrees) {
  ModelParams p = weak_coupling_params();
  p.g = 1.5;
  const GeneratorContext ctx = make_context(p);
  ASSERT_TRUE(ctx.ops[6].adjointed);
  const RateMatrix lit = build_rate_matrix_literal(ctx.spectra);
  const RateMatrix der = build_rate_matrix_derived(ctx.ops, ctx.spectra);
  EXPECT_LE(max_abs_difference(lit, der), 1e-15);
}

TEST(SolveSteady, MatchesKernelFromIndependentDecomposition) {
  auto rng = seeded_rng(13);
  for (int k = 0; k < 50; ++k) {
    const GeneratorContext ctx = make_context(random_valid_params(rng));
    const Matrix8 m = build_rate_matrix_literal(ctx.spectra).total;
    const PopulationVector pv = solve_steady(m);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    const Eigen::MatrixXd ker = lu.kernel();
    ASSERT_EQ(ker.cols(), 1);
    const Vector8 oracle = ker.col(0) / ker.col(0).sum();
    EXPECT_LE((pv.values - oracle).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(pv.values.sum(), 1.0, 1e-15);
    EXPECT_LE((m * pv.values).cwiseAbs().maxCoeff(), 1e-14 * m.cwiseAbs().maxCoeff());
  }
}

TEST(SolveSteady, DisconnectedGraphIsDegenerate) {
  Matrix8 m = Matrix8::Zero();
  for (int i = 0; i < kDim; i += 2) {
    m(i, i) = -1.0;
    m(i + 1, i) = 1.0;
    m(i, i + 1) = 2.0;
    m(i + 1, i + 1) = -2.0;
  }
  expect_code(ErrorCode::DegenerateKernel, [&] { solve_steady(m); });
  expect_code(ErrorCode::DegenerateKernel, [] { solve_steady(Matrix8::Zero()); });
}

TEST(SolveSteady, NonConservingMatrixIsRejected) {
  Matrix8 m = -Matrix8::Identity();
  expect_code(ErrorCode::DomainError, [&] { solve_steady(m); });
}

TEST(SteadyState, EqualTemperaturesGiveGibbsPopulations) {
  ModelParams p = strong_coupling_params();
  p.T_H = p.T_R = p.T_C = 7.5;
  const SteadyState ss = steady_state_full(p);
  const Vector8 gibbs = gibbs_populations(ss.context.eigensystem, 7.5);
  EXPECT_LE((ss.populations.values - gibbs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SteadyState, FullGeneratorAnnihilatesDiagonalState) {
  for (const ModelParams& p : {weak_coupling_params(), strong_coupling_params(60.0)}) {
    const SteadyState ss = steady_state_full(p);
    EXPECT_LE(ss.diagnostics.generator_residual, 1e-14);
    EXPECT_LE(ss.diagnostics.max_coherence, 1e-15);
    EXPECT_FALSE(ss.diagnostics.solve.used_svd_fallback);
    EXPECT_EQ(ss.diagnostics.solve.clamped_mass, 0.0);
    EXPECT_GE(ss.populations.values.minCoeff(), 0.0);
  }
}

TEST(SteadyState, InvalidParametersPropagate) {
  ModelParams p = weak_coupling_params();
  p.g = p.omega_H;
  expect_code(ErrorCode::DegenerateBohrFrequency, [&] { steady_state_full(p); });
}

TEST(SteadyState, SlowestRelaxationIsOrderGamma) {
  const SteadyState ss = steady_state_full(weak_coupling_params());
  const double r = slowest_relaxation_rate(ss.literal.total);
  EXPECT_GT(r, 1e-4);
  EXPECT_LT(r, 1.0);
}
