#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <semiquant/error.hpp>
#include <semiquant/dynamics.hpp>
#include <semiquant/hamiltonian.hpp>
#include <semiquant/weyl.hpp>

#include "helpers.hpp"

using namespace semiquant;
using namespace sqtest;

namespace {

constexpr int kN = 64;
constexpr int kTrusted = 32;

PhaseSpaceField poly_field(const PhaseSpaceGrid& g, const Polynomial2& p) {
  return PhaseSpaceField::from_polynomial(g, p);
}

// Centre sample index of the default grid.
constexpr int kC = 128;

}  // namespace

TEST(HermiteTable, Orthonormal) {
  const auto g = default_grid();
  // the kernel samples the basis at q +- x/2, so half the kernel spacing
  const Eigen::VectorXd axis = kernel_axis(g) / 2.0;
  const HermiteBasisTable t(g.params, kN, axis);
  EXPECT_LT(t.orthonormality_error(axis(1) - axis(0)), 1e-10);
}

TEST(Series, CoefficientsInvert) {
  // (sum a_k x^k)(sum s_k 4^k x^k) = 1 with x = theta^2, theta = hbar J / 2
  const double a[] = {SeriesCoefficients::inverse(0), SeriesCoefficients::inverse(1), SeriesCoefficients::inverse(2)};
  double s[3];
  for (int k = 0; k < 3; ++k) s[k] = SeriesCoefficients::forward(k) * std::pow(4.0, k);
  EXPECT_DOUBLE_EQ(a[1], 1.0 / 6);
  EXPECT_DOUBLE_EQ(a[2], 7.0 / 360);
  EXPECT_DOUBLE_EQ(SeriesCoefficients::forward(1), -1.0 / 24);
  EXPECT_DOUBLE_EQ(SeriesCoefficients::forward(2), 1.0 / 1920);
  EXPECT_NEAR(a[0] * s[0], 1.0, 1e-15);
  EXPECT_NEAR(a[0] * s[1] + a[1] * s[0], 0.0, 1e-15);
  EXPECT_NEAR(a[0] * s[2] + a[1] * s[1] + a[2] * s[0], 0.0, 1e-15);
}

TEST(Kernel, HermitianKernelSymmetric) {
  const auto g = default_grid();
  const auto k = operator_kernel(random_hermitian(g.params, kN, 16, 5), kernel_axis(g));
  EXPECT_LT(k.hermiticity_drift(), 1e-9);
}

TEST(Weyl, VacuumValueAtOrigin) {
  const auto g = default_grid();
  const auto w = weyl_transform(coherent_density(0.0, g.params, kN), g);
  EXPECT_NEAR(w(kC, kC).real(), 2.0, 1e-12);
  EXPECT_LT(w.max_abs_imag(), 1e-9);
}

TEST(Weyl, TruncatedIdentityAndPositionInWeakForm) {
  // W of the truncated identity oscillates about 1 pointwise, so test against a
  // decaying density: integral W(A) rho = Tr(A G) with G = W^-1(2 pi hbar rho)
  const auto g = default_grid();
  const auto rho = gaussian_density(0.4, -0.3, g);
  const auto gro = groenewold_from_liouville(rho, kN);
  const auto ops = build_canonical(g.params, kN);
  for (const FockOperator& a : {FockOperator::identity(g.params, kN), ops.position, ops.momentum}) {
    const cplx lhs = moment(rho, weyl_transform(a, g));
    EXPECT_NEAR(std::abs(lhs - expectation(a, gro)), 0.0, 1e-8);
  }
  EXPECT_NEAR(moment(rho, weyl_transform(ops.position, g)).real(), 0.4, 1e-8);
}

TEST(Weyl, DimensionBeyondResolution) {
  const auto g = default_grid();
  EXPECT_EQ(max_fock_dim(g), 64);
  try {
    weyl_transform(FockOperator::identity(g.params, 80), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "resolution");
  }
}

TEST(InverseWeyl, ConstantAndMomentum) {
  const auto g = default_grid();
  const auto one = inverse_weyl(poly_field(g, Polynomial2(1.0)), kN);
  EXPECT_LT(block_diff(one, FockOperator::identity(g.params, kN), kTrusted), 1e-9);
  const auto p = inverse_weyl(poly_field(g, Polynomial2::p()), kN);
  EXPECT_LT(block_diff(p, build_canonical(g.params, kN).momentum, kTrusted), 1e-8);
}

TEST(InverseWeyl, GaussianIsCoherentState) {
  const auto g = default_grid();
  const auto gro = groenewold_from_liouville(gaussian_density(0.5, 0.0, g), kN);
  const auto coh = coherent_density(coherent_amplitude(0.5, 0.0, g.params), g.params, kN);
  EXPECT_LT(max_abs(gro.matrix() - coh.matrix()), 1e-8);
  EXPECT_NEAR(trace(gro).real(), 1.0, 1e-8);
  const auto vac = groenewold_from_liouville(gaussian_density(0.0, 0.0, g), kN);
  EXPECT_LT(max_abs(vac.matrix() - coherent_density(0.0, g.params, kN).matrix()), 1e-8);
}

TEST(InverseWeyl, HermitianOutput) {
  const auto g = default_grid();
  const auto a = inverse_weyl(gaussian_density(0.5, 0.25, g), kN);
  EXPECT_LT(a.hermiticity_drift(), 1e-9);
}

TEST(Transform, OperatorRoundTrip) {
  const auto g = default_grid();
  for (unsigned seed = 1; seed <= 3; ++seed) {
    const auto a = random_hermitian(g.params, kN, kTrusted, seed);
    const auto back = inverse_weyl(weyl_transform(a, g), kN);
    EXPECT_LT(max_abs(back.matrix() - a.matrix()), 1e-8);
  }
}

TEST(Transform, FieldRoundTrip) {
  const auto g = default_grid();
  const auto f = gaussian_density(0.5, -0.5, g);
  const auto back = weyl_transform(inverse_weyl(f, kN), g);
  EXPECT_LT(max_difference(back, f), 1e-6 * f.max_abs());
}

TEST(Quantize, ClosedFormLevels) {
  const auto p = half_hbar();
  const auto h2 = weyl_quantize(hamiltonian_symbol(PolyOscillator{{0, 0, 1}}, p), p, 8);
  const auto h3 = weyl_quantize(hamiltonian_symbol(PolyOscillator{{0, 0, 0, 1}}, p), p, 8);
  const double hw = p.hbar * p.omega;
  for (int n = 0; n < 8; ++n) {
    EXPECT_NEAR(h2(n, n).real(), hw * hw * (n * n + n + 0.5), 1e-12);
    EXPECT_NEAR(h3(n, n).real(), hw * hw * hw * (n * n * n + 1.5 * n * n + 2 * n + 0.75), 1e-12);
  }
  EXPECT_NEAR(h3(1, 1).real(), 0.65625, 1e-12);
}

TEST(Star, ProductOfCoordinates) {
  const auto g = default_grid();
  const auto q = DerivativeStack::analytic(Polynomial2::q(), g, 5);
  const auto p = DerivativeStack::analytic(Polynomial2::p(), g, 5);
  const auto qq = star_product(q, q, 2);
  const auto qp = star_product(q, p, 2);
  double e1 = 0, e2 = 0;
  for (int i = 0; i < g.n_q; ++i) {
    for (int k = 0; k < g.n_p; ++k) {
      e1 = std::max(e1, std::abs(qq(i, k) - g.q(i) * g.q(i)));
      e2 = std::max(e2, std::abs(qp(i, k) - cplx(g.q(i) * g.p(k), g.params.hbar / 2)));
    }
  }
  EXPECT_LT(e1, 1e-12);
  EXPECT_LT(e2, 1e-12);
  const auto br = star_bracket(q, p, 4);
  EXPECT_LT((br.values() - cplx(1, 0)).abs().maxCoeff(), 1e-15);
}

TEST(Star, ExactCommutatorConsistency) {
  const auto g = default_grid();
  const auto a = gaussian_density(0.5, 0.0, g);
  const auto b = gaussian_density(-0.3, 0.4, g);
  const auto mode = SeriesMode::exact(kN);
  const auto lhs = star_product(a, b, mode) - star_product(b, a, mode);
  const auto rhs = star_bracket(a, b, mode) * cplx(0, g.params.hbar);
  EXPECT_LT(max_difference(lhs, rhs), 1e-7);
}

TEST(Star, TerminationForQuarticAndSextic) {
  // truncated brackets of H2 (order 2) and H3 (order 4) with a Gaussian equal
  // the Hilbert-route bracket
  const auto g = default_grid();
  const auto w = gaussian_density(0.5, 0.0, g);
  const auto ws = DerivativeStack::spectral(w, 5);
  for (int k : {2, 3}) {
    std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
    c.back() = 1.0;
    const Polynomial2 h = hamiltonian_symbol(PolyOscillator{c}, g.params);
    const auto hs = DerivativeStack::analytic(h, g, 5);
    const auto rho = groenewold_from_liouville(w, kN);
    const auto hop = weyl_quantize(h, g.params, kN);
    const FockOperator comm = (hop * rho - rho * hop) * cplx(0, -1.0 / g.params.hbar);
    const auto exact = weyl_transform(comm, g) * cplx(1.0 / (2 * std::numbers::pi * g.params.hbar), 0);
    const int order = 2 * (k - 1);
    const double scale = exact.max_abs();
    EXPECT_LT(max_difference(star_bracket(hs, ws, order), exact), 1e-7 * std::max(1.0, scale)) << "k=" << k;
    if (k == 3) EXPECT_GT(max_difference(star_bracket(hs, ws, 2), exact), 1e-3 * scale);
  }
}

TEST(Odot, WideIdentityIsUnit) {
  // W(1_N) only approaches 1 weakly, so the unit needs a basis well past the block compared
  const auto p = half_hbar();
  const auto g = PhaseSpaceGrid::symmetric(12.0, 512, p);
  const int wide = 128;
  const auto a = random_hermitian(p, wide, 16, 9);
  EXPECT_LT(block_diff(odot_product(a, FockOperator::identity(p, wide), g), a, kTrusted), 1e-8);
}

TEST(Odot, SymmetrisedCoordinateProduct) {
  // Known failure: both truncated coordinates carry the oscillating truncated identity
  // and their pointwise product keeps a nonzero mean. Measured 0.29 at N = 64; widening
  // the basis to 128 on a 512 grid makes it 0.40.
  const auto g = default_grid();
  const auto ops = build_canonical(g.params, kN);
  const auto qp = odot_product(ops.position, ops.momentum, g);
  const auto sym = (ops.position * ops.momentum + ops.momentum * ops.position) * cplx(0.5, 0);
  EXPECT_LT(block_diff(qp, sym, kTrusted), 1e-8);
  EXPECT_EQ(max_abs(qp.matrix() - odot_product(ops.momentum, ops.position, g).matrix()), 0.0);
}

TEST(Odot, Associativity) {
  const auto g = default_grid();
  const auto a = groenewold_from_liouville(gaussian_density(0.5, 0.0, g), kN);
  const auto b = groenewold_from_liouville(gaussian_density(0.0, 0.3, g), kN);
  const auto c = groenewold_from_liouville(gaussian_density(-0.2, 0.0, g), kN);
  const auto lhs = odot_product(odot_product(a, b, g), c, g);
  const auto rhs = odot_product(a, odot_product(b, c, g), g);
  EXPECT_LT(block_diff(lhs, rhs, kTrusted), 1e-7);
}

TEST(OdotBracket, OrderZeroIsCommutator) {
  const auto p = half_hbar();
  const int n = 24;
  const auto h = weyl_quantize(hamiltonian_symbol(PolyOscillator{{0, 0, 1}}, p), p, n);
  const auto g = random_hermitian(p, n, 12, 4);
  const OperatorCalculus calc(p, n);
  const CMatrix got = odot_bracket(OperatorDerivatives::from_operator(h, 0), g.matrix(), calc, 0);
  const CMatrix want = (h.matrix() * g.matrix() - g.matrix() * h.matrix()) / cplx(0, p.hbar);
  EXPECT_LT(max_abs(got - want), 1e-12);
}

TEST(OdotBracket, CoordinatesGiveIdentity) {
  const auto p = half_hbar();
  const int n = 16;
  const auto ops = build_canonical(p, n);
  const OperatorCalculus calc(p, n);
  for (int order : {0, 2, 4}) {
    const CMatrix r = odot_bracket(OperatorDerivatives::from_operator(ops.position, order), ops.momentum.matrix(),
                                   calc, order);
    // the truncated edge reaches one level further in per extra multiplication
    const int block = n - 2 - order / 2;
    EXPECT_LT(max_abs((r - CMatrix::Identity(n, n)).topLeftCorner(block, block)), 1e-12) << order;
  }
}

TEST(OdotBracket, QuarticTerminatesAtOrderTwo) {
  const auto g = default_grid();
  const Polynomial2 h = hamiltonian_symbol(PolyOscillator{{0, 0, 1}}, g.params);
  const auto b = groenewold_from_liouville(gaussian_density(0.5, 0.0, g), kN);
  const auto exact = odot_bracket_exact(h, b, g);
  const int m = kN + semiquantum_padding(h, 2);
  CMatrix big = CMatrix::Zero(m, m);
  big.topLeftCorner(kN, kN) = b.matrix();
  const CMatrix trunc = odot_bracket(OperatorDerivatives::from_symbol(h, g.params, m, 2), big,
                                     OperatorCalculus(g.params, m), 2);
  EXPECT_LT(max_abs((trunc - CMatrix(exact.matrix())).topLeftCorner(kTrusted, kTrusted)), 1e-7);
}

TEST(OdotBracket, AntisymmetryAndJacobi) {
  // low-degree polynomial operators keep the order-4 series exact
  const auto p = half_hbar();
  const int n = 48;
  const OperatorCalculus calc(p, n);
  auto quant = [&](const Polynomial2& s) { return weyl_quantize(s, p, n).matrix(); };
  const CMatrix a = quant(Polynomial2::monomial(3, 0));
  const CMatrix b = quant(Polynomial2::monomial(1, 2));
  const CMatrix c = quant(Polynomial2::monomial(1, 1) + Polynomial2::monomial(0, 2));
  auto br = [&](const CMatrix& x, const CMatrix& y) {
    return odot_bracket(OperatorDerivatives::from_operator(FockOperator(p, x), 4), y, calc, 4);
  };
  const int blk = 16;
  EXPECT_LT(max_abs((br(a, b) + br(b, a)).topLeftCorner(blk, blk)), 1e-9);
  const CMatrix jac = br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b));
  EXPECT_LT(max_abs(jac.topLeftCorner(blk, blk)), 1e-7);
}
