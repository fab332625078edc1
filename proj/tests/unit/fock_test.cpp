#include <cmath>

#include <gtest/gtest.h>

#include <semiquant/error.hpp>
#include <semiquant/fock.hpp>
#include <semiquant/weyl.hpp>

#include "helpers.hpp"

using namespace semiquant;
using namespace sqtest;

TEST(Canonical, LadderNormalisation) {
  const auto ops = build_canonical(half_hbar(), 4);
  EXPECT_NEAR(ops.position(0, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(ops.position(0, 1).imag(), 0.0, 1e-15);
  EXPECT_TRUE(ops.position.matrix().isApprox(ops.position.matrix().adjoint()));
  EXPECT_TRUE(ops.momentum.matrix().isApprox(ops.momentum.matrix().adjoint()));
}

TEST(Canonical, CommutatorOnInterior) {
  const auto p = half_hbar();
  const auto ops = build_canonical(p, 12);
  const CMatrix c = ops.position.matrix() * ops.momentum.matrix() - ops.momentum.matrix() * ops.position.matrix();
  EXPECT_NEAR(std::abs(c(0, 0) - cplx(0, p.hbar)), 0.0, 1e-14);
  const CMatrix expect = cplx(0, p.hbar) * CMatrix::Identity(11, 11);
  EXPECT_LT(max_abs(c.topLeftCorner(11, 11) - expect), 1e-14);
}

TEST(Canonical, NumberOperator) {
  const auto ops = build_canonical(half_hbar(), 3);
  for (int n = 0; n < 3; ++n) EXPECT_EQ(ops.number(n, n), cplx(n, 0));
  EXPECT_EQ(max_abs(ops.number.matrix() - ops.number.matrix().diagonal().asDiagonal().toDenseMatrix()), 0.0);
}

TEST(Canonical, RejectsTinyDimension) {
  try {
    build_canonical(half_hbar(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "precondition");
  }
}

TEST(Coherent, Vacuum) {
  const auto rho = coherent_density(0.0, half_hbar(), 8);
  EXPECT_EQ(rho(0, 0), cplx(1, 0));
  EXPECT_EQ(max_abs(rho.matrix()) , 1.0);
  EXPECT_NEAR(std::abs(trace(rho) - 1.0), 0.0, 1e-15);
}

TEST(Coherent, ScenarioState) {
  const auto p = half_hbar();
  const cplx a = coherent_amplitude(0.5, 0.0, p);
  EXPECT_NEAR(a.real(), 0.5, 1e-15);
  const auto rho = coherent_density(a, p, 64);
  EXPECT_NEAR(trace(rho).real(), 1.0, 1e-12);
  EXPECT_NEAR(expectation(rho, rho).real(), 1.0, 1e-12);
  EXPECT_NEAR(rho(0, 0).real(), std::exp(-0.25), 1e-12);
  const auto ops = build_canonical(p, 64);
  EXPECT_NEAR(expectation(ops.position, rho).real(), 0.5, 1e-8);
  EXPECT_NEAR(expectation(ops.momentum, rho).real(), 0.0, 1e-12);
}

TEST(Coherent, TailTooHeavy) {
  try {
    coherent_density(cplx(3.0, 0.0), half_hbar(), 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "truncation");
    EXPECT_NE(std::string(e.what()).find("tail"), std::string::npos);
  }
}

TEST(OperatorDerivative, ElementaryCases) {
  const auto p = half_hbar();
  const int n = 16;
  const auto ops = build_canonical(p, n);
  const auto dq = op_derivative(ops.position, Axis::q, 1);
  EXPECT_LT(block_diff(dq, FockOperator::identity(p, n), n - 1), 1e-13);
  const auto p2 = ops.momentum * ops.momentum;
  const auto dpp = op_derivative(p2, Axis::p, 2);
  EXPECT_LT(block_diff(dpp, FockOperator::identity(p, n) * cplx(2, 0), n - 4), 1e-12);
}

TEST(OperatorDerivative, MixedMatchesSymbolDerivative) {
  const auto p = half_hbar();
  const int n = 20;
  const Polynomial2 s = Polynomial2::monomial(2, 1);
  const auto a = weyl_quantize(s, p, n);
  const auto lhs = op_derivative(op_derivative(a, Axis::q, 1), Axis::p, 1);
  const auto rhs = weyl_quantize(s.derivative(1, 1), p, n);
  EXPECT_LT(block_diff(lhs, rhs, n - 4), 1e-12);
  EXPECT_LT(block_diff(rhs, build_canonical(p, n).position * cplx(2, 0), n - 4), 1e-12);
}

TEST(OperatorDerivative, AxesCommuteAwayFromEdge) {
  const auto p = half_hbar();
  const int n = 24;
  const auto a = random_hermitian(p, n, n, 3);
  const auto qp = op_derivative(op_derivative(a, Axis::q), Axis::p);
  const auto pq = op_derivative(op_derivative(a, Axis::p), Axis::q);
  EXPECT_LT(block_diff(qp, pq, n - 4), 1e-9);
}

TEST(OperatorDerivative, RoundTripThroughTransform) {
  // D_q W^-1(A) = W^-1(dA/dq) for a decaying band-limited symbol
  const auto grid = default_grid();
  const int n = 64;
  const auto g = gaussian_density(0.3, -0.2, grid);
  const auto a = inverse_weyl(g, n);
  const auto da = inverse_weyl(partial_derivative(g, Axis::q, 1), n);
  EXPECT_LT(block_diff(op_derivative(a, Axis::q), da, 32), 1e-9);
  const auto db = inverse_weyl(partial_derivative(g, Axis::p, 1), n);
  EXPECT_LT(block_diff(op_derivative(a, Axis::p), db, 32), 1e-9);
}

TEST(Spectrum, DiagonalAndProjector) {
  const auto p = half_hbar();
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  const auto s = hermitian_spectrum(FockOperator(p, d));
  EXPECT_NEAR(s.values(0), 1, 1e-15);
  EXPECT_NEAR(s.values(1), 2, 1e-15);
  EXPECT_NEAR(s.values(2), 3, 1e-15);

  const auto rho = coherent_density(coherent_amplitude(0.5, 0, p), p, 64);
  const auto sp = hermitian_spectrum(rho);
  EXPECT_NEAR(sp.values(63), 1.0, 1e-10);
  for (int k = 0; k < 63; ++k) EXPECT_NEAR(sp.values(k), 0.0, 1e-10);
  const CMatrix u = sp.vectors.adjoint() * sp.vectors;
  EXPECT_LT(max_abs(u - CMatrix::Identity(64, 64)), 1e-10);
}

TEST(Spectrum, RejectsNonHermitian) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  try {
    hermitian_spectrum(FockOperator(half_hbar(), a));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "hermiticity");
  }
}

TEST(Trace, Basics) {
  const auto p = half_hbar();
  EXPECT_EQ(trace(FockOperator::identity(p, 8)), cplx(8, 0));
  const auto ops = build_canonical(p, 8);
  EXPECT_EQ(expectation(ops.number, coherent_density(0.0, p, 8)), cplx(0, 0));
}

TEST(Trace, Linearity) {
  const auto p = half_hbar();
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int rep = 0; rep < 5; ++rep) {
    const auto a = random_hermitian(p, 10, 10, 100 + rep);
    const auto b = random_hermitian(p, 10, 10, 200 + rep);
    const auto c = random_hermitian(p, 10, 10, 300 + rep);
    const cplx x(n(rng), n(rng)), y(n(rng), n(rng));
    EXPECT_NEAR(std::abs(trace(a * x + b * y) - (x * trace(a) + y * trace(b))), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(expectation(a * x + b * y, c) - (x * expectation(a, c) + y * expectation(b, c))), 0.0,
                1e-12);
    EXPECT_NEAR(std::abs(expectation(c, a * x + b * y) - (x * expectation(c, a) + y * expectation(c, b))), 0.0,
                1e-12);
  }
}

TEST(Trace, DimensionMismatch) {
  const auto p = half_hbar();
  try {
    expectation(FockOperator::identity(p, 3), FockOperator::identity(p, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "dimension_mismatch");
  }
}

TEST(WeylMultiplication, MatchesQuantisedProducts) {
  // m_q, m_p are the images of multiplying a symbol by q, p
  const auto p = half_hbar();
  const int n = 20;
  const OperatorCalculus calc(p, n);
  const Polynomial2 s = Polynomial2::monomial(1, 2) + Polynomial2::monomial(0, 1) * 0.3;
  const auto a = weyl_quantize(s, p, n);
  const auto mq = FockOperator(p, calc.m_q(a.matrix()));
  const auto mp = FockOperator(p, calc.m_p(a.matrix()));
  EXPECT_LT(block_diff(mq, weyl_quantize(Polynomial2::q() * s, p, n), n - 4), 1e-12);
  EXPECT_LT(block_diff(mp, weyl_quantize(Polynomial2::p() * s, p, n), n - 4), 1e-12);
  // each multiplication reaches one level further, so compare away from the edge
  const CMatrix qp = calc.m_q(calc.m_p(a.matrix())), pq = calc.m_p(calc.m_q(a.matrix()));
  EXPECT_LT(max_abs((qp - pq).topLeftCorner(n - 4, n - 4)), 1e-12);
}
