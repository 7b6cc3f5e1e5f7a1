#include <gtest/gtest.h>

#include <cmath>

#include "qfridge/eigenoperators.hpp"
#include "qfridge/selftest.hpp"
#include "test_support.hpp"

using namespace qfridge;
using qfridge::testing::seeded_rng;
using qfridge::testing::strong_coupling_params;
using qfridge::testing::weak_coupling_params;

namespace {

// Oracle: sum over eigenpairs with e_b - e_a = w of P_a X P_b, built from a
// numerical diagonalization of H and the bare sigma_x coupling.
Matrix8c projected_coupling(const Matrix8c& h, Bath bath, double w, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix8c> solver(h);
  const auto& u = solver.eigenvectors();
  const auto& e = solver.eigenvalues();
  const Matrix8c x = sigma_x_on(bath);
  Matrix8c out = Matrix8c::Zero();
  for (int a = 0; a < kDim; ++a) {
    for (int b = 0; b < kDim; ++b) {
      if (std::abs(e(b) - e(a) - w) > tol) continue;
      const Matrix8c pa = u.col(a) * u.col(a).adjoint();
      const Matrix8c pb = u.col(b) * u.col(b).adjoint();
      out += pa * x * pb;
    }
  }
  return out;
}

}  // namespace

TEST(EigenOperators, TableOrderAndFrequenciesWeakCoupling) {
  const ModelParams p = weak_coupling_params();
  const EigenOperators ops = build_eigenoperators(p);
  const std::array<double, 9> w{3.0, 2.997, 3.003, 3.997, 4.0, 4.003, 0.997, 1.003, 1.0};
  for (std::size_t k = 0; k < ops.size(); ++k) {
    EXPECT_EQ(ops[k].bath, kBaths[k / 3]);
    EXPECT_EQ(ops[k].j, int(k % 3) + 1);
    EXPECT_NEAR(ops[k].frequency, w[k], 1e-14);
    EXPECT_FALSE(ops[k].adjointed);
  }
}

TEST(EigenOperators, ColdFirstOperatorAdjointedAboveColdFrequency) {
  const ModelParams p = strong_coupling_params();
  ModelParams q = p;
  q.g = 1.5;
  const EigenOperators ops = build_eigenoperators(q);
  const EigenOperator& c1 = ops[6];
  EXPECT_TRUE(c1.adjointed);
  EXPECT_DOUBLE_EQ(c1.listed_frequency, -0.5);
  EXPECT_DOUBLE_EQ(c1.frequency, 0.5);
  EXPECT_FALSE(build_eigenoperators(p)[6].adjointed);
}

TEST(EigenOperators, ColdOperatorAtUnitAmplitudeMatchesLowering) {
  // V_C3 restricted to the uncoupled subspace is sigma_C^-.
  const EigenOperators ops = build_eigenoperators(weak_coupling_params());
  const auto terms = ops[8].terms();
  ASSERT_EQ(terms.size(), 2u);
  for (const auto& t : terms) EXPECT_DOUBLE_EQ(std::abs(t.amplitude), 1.0);
}

TEST(EigenOperators, ZeroFrequencyIsRejected) {
  ModelParams p = weak_coupling_params();
  p.g = p.omega_C;
  try {
    build_eigenoperators(p);
    FAIL() << "expected ZeroFrequency";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroFrequency);
  }
}

TEST(EigenOperators, CommutatorsHoldForRandomParameters) {
  auto rng = seeded_rng(2);
  for (int k = 0; k < 100; ++k) {
    const ModelParams p = random_valid_params(rng);
    const EigenSystem es = eigensystem(p);
    const EigenOperators ops = build_eigenoperators(es, p);
    const CommutatorReport r = verify_commutators(ops, es, p);
    EXPECT_LE(r.max_residual, 1e-10 * p.omega_H);
  }
}

TEST(EigenOperators, CommutatorViolationIsDetected) {
  const ModelParams p = weak_coupling_params();
  const EigenSystem es = eigensystem(p);
  EigenOperators ops = build_eigenoperators(es, p);
  ops[1].frequency += 0.01;
  try {
    verify_commutators(ops, es, p);
    FAIL() << "expected CommutatorViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CommutatorViolation);
  }
}

TEST(EigenOperators, SumReconstructsSigmaX) {
  auto rng = seeded_rng(3);
  for (int k = 0; k < 50; ++k) {
    const ModelParams p = random_valid_params(rng);
    const EigenSystem es = eigensystem(p);
    const EigenOperators ops = build_eigenoperators(es, p);
    for (Bath b : kBaths) {
      EXPECT_LE((bath_coupling_operator(ops, es, b) - sigma_x_on(b)).norm(), 1e-12);
    }
  }
}

TEST(EigenOperators, MatchFrequencyProjectionOfCouplingOperator) {
  auto rng = seeded_rng(4);
  for (int k = 0; k < 50; ++k) {
    const ModelParams p = random_valid_params(rng);
    const EigenSystem es = eigensystem(p);
    const EigenOperators ops = build_eigenoperators(es, p);
    const Matrix8c h = build_hamiltonian(p);
    for (const auto& op : ops) {
      const Matrix8c oracle = projected_coupling(h, op.bath, op.frequency, 1e-9);
      EXPECT_LE((es.to_product_basis(op.matrix) - oracle).norm(), 1e-10)
          << name_of(op.bath) << op.j << " g=" << p.g;
    }
  }
}
