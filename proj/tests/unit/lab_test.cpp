#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <semiquant/error.hpp>
#include <semiquant/lab.hpp>

#include "helpers.hpp"

using namespace semiquant;
using namespace sqtest;

namespace {

constexpr double kPi = std::numbers::pi;

ScenarioRun make_run(const std::string& label, Mode mode, int order, std::vector<double> times) {
  ScenarioRun r;
  r.label = label;
  r.config.mode = mode;
  r.config.order = order;
  r.config.t_final = times.back();
  r.config.snapshot_times = std::move(times);
  return r;
}

void expect_ordered(const DiagnosticRow& r) {
  EXPECT_LE(r.eig_min_1, r.eig_min_2);
  EXPECT_LE(r.eig_min_2, r.eig_max_2);
  EXPECT_LE(r.eig_max_2, r.eig_max_1);
}

}  // namespace

TEST(Scenario, DefaultsValidate) {
  const Scenario s = default_scenario();
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.fock_dim, 64);
  EXPECT_EQ(s.grid.n_q, 256);
  EXPECT_DOUBLE_EQ(s.params.hbar, 0.5);
}

TEST(Scenario, RejectsDuplicateLabelsAndMismatchedGrid) {
  Scenario s = default_scenario();
  s.runs = {make_run("a", Mode::quantum, 0, {0.0, 1.0}), make_run("a", Mode::classical, 0, {0.0, 1.0})};
  EXPECT_THROW(s.validate(), Error);
  s = default_scenario();
  s.grid.params.hbar = 0.25;
  EXPECT_THROW(s.validate(), Error);
  s = default_scenario();
  s.initial.q0 = 7.9;
  EXPECT_THROW(s.validate(), Error);
}

TEST(Scenario, UniformTimes) {
  const auto ts = uniform_times(kPi, 4);
  ASSERT_EQ(ts.size(), 5u);
  EXPECT_DOUBLE_EQ(ts[2], kPi / 2);
  EXPECT_EQ(ts.back(), kPi);
  EXPECT_THROW(uniform_times(1.0, 0), Error);
}

TEST(BuildHamiltonian, HarmonicIsNumberOperator) {
  const auto p = half_hbar();
  const auto h = build_hamiltonian(PolyOscillator{{0.0, 1.0}}, p, default_grid(), 16);
  for (int n = 0; n < 16; ++n) EXPECT_NEAR(h.op(n, n).real(), p.hbar * p.omega * (n + 0.5), 1e-12);
  EXPECT_NEAR(h.symbol(128 + 16, 128 + 16).real(), 1.0, 1e-12);  // H0(1, 1)
}

TEST(BuildHamiltonian, ClosedFormLevels) {
  // W^-1(H0^2) carries the constant 1/2, so H2|0> = mu hbar w / 2 |0>
  const auto p = half_hbar();
  const auto h2 = build_hamiltonian(PolyOscillator{{0.0, 0.0, 1.0}}, p, default_grid(), 64);
  EXPECT_NEAR(h2.op(0, 0).real(), 0.125, 1e-12);
  const auto h3 = build_hamiltonian(PolyOscillator{{0.0, 0.0, 0.0, 1.0}}, p, default_grid(), 64);
  EXPECT_NEAR(h3.op(1, 1).real(), 0.65625, 1e-12);
  const double mu = p.mu();
  for (int n = 0; n < 32; ++n) {
    EXPECT_NEAR(h2.op(n, n).real(), mu * p.hbar * p.omega * (n * n + n + 0.5), 1e-8);
    EXPECT_NEAR(h3.op(n, n).real(), mu * mu * p.hbar * p.omega * (n * n * n + 1.5 * n * n + 2 * n + 0.75), 1e-8);
  }
  // diagonal entries reach 1e4, so off-diagonal roundoff is relative to that
  const CMatrix m = h3.op.matrix();
  EXPECT_LT(max_abs(m - CMatrix(m.diagonal().asDiagonal())), 1e-14 * m.diagonal().cwiseAbs().maxCoeff());
}

TEST(BuildHamiltonian, SymbolMatchesField) {
  const auto g = default_grid();
  const KineticPotential k{1.0, {0.0, 0.0, 0.0, 0.0, 1.0}};
  const auto h = build_hamiltonian(k, g.params, g, 16);
  EXPECT_EQ(max_difference(h.symbol, hamiltonian_field(k, g)), 0.0);
}

TEST(Diagnostics, CoherentStateRow) {
  const auto p = half_hbar();
  const auto g = coherent_density(coherent_amplitude(0.5, 0.0, p), p, 64);
  const auto row = operator_diagnostics(0.0, g, default_grid());
  EXPECT_NEAR(row.alpha.real(), 0.5 / std::numbers::sqrt2, 1e-8);
  EXPECT_NEAR(row.alpha.imag(), 0.0, 1e-12);
  EXPECT_NEAR(row.eig_max_1, 1.0, 1e-10);
  EXPECT_NEAR(row.eig_max_2, 0.0, 1e-10);
  EXPECT_NEAR(row.eig_min_1, 0.0, 1e-10);
  EXPECT_NEAR(row.trace_re, 1.0, 1e-12);
  EXPECT_LT(row.negativity, 1e-9);
  expect_ordered(row);
}

TEST(Diagnostics, FieldAndOperatorRepresentationsAgree) {
  const auto g = default_grid();
  const auto w = gaussian_density(0.5, 0.3, g);
  const auto a = field_diagnostics(0.0, w, 64);
  const auto b = operator_diagnostics(0.0, groenewold_from_liouville(w, 64), g);
  EXPECT_NEAR(a.q_mean, b.q_mean, 1e-6);
  EXPECT_NEAR(a.p_mean, b.p_mean, 1e-6);
  EXPECT_NEAR(a.trace_re, b.trace_re, 1e-6);
  EXPECT_NEAR(a.eig_min_1, b.eig_min_1, 1e-12);
}

TEST(RunEvolution, QuantumQuarticStaysPure) {
  Scenario s = default_scenario();
  s.runs = {make_run("quantum", Mode::quantum, 0, uniform_times(kPi, 8))};
  const auto recs = run_scenario(s);
  ASSERT_EQ(recs.size(), 1u);
  ASSERT_TRUE(recs[0].ok()) << recs[0].error_message;
  ASSERT_EQ(recs[0].rows.size(), 9u);
  EXPECT_NEAR(recs[0].rows[0].alpha.real(), 0.35355339059327373, 1e-8);
  for (const auto& r : recs[0].rows) {
    EXPECT_NEAR(r.eig_max_1, 1.0, 1e-6);
    EXPECT_NEAR(r.eig_max_2, 0.0, 1e-6);
    EXPECT_NEAR(r.eig_min_1, 0.0, 1e-6);
    EXPECT_NEAR(r.trace_re, 1.0, 1e-8);
    expect_ordered(r);
  }
}

TEST(RunEvolution, ClassicalGroenewoldTurnsIndefinite) {
  Scenario s = default_scenario();
  s.runs = {make_run("classical", Mode::classical, 0, {0.0, 1.0, 2.0, 3.0})};
  const auto rec = run_evolution(s, s.runs[0]);
  ASSERT_TRUE(rec.ok()) << rec.error_message;
  ASSERT_EQ(rec.rows.size(), 4u);
  EXPECT_GT(rec.rows[0].eig_min_1, -1e-8);
  for (int k = 1; k < 4; ++k) {
    EXPECT_LT(rec.rows[static_cast<std::size_t>(k)].eig_min_1, 0.0) << "t = " << k;
    // sum rule: the spectrum of G adds up to its trace
    EXPECT_NEAR(rec.rows[static_cast<std::size_t>(k)].trace_re, 1.0, 1e-6);
  }
}

TEST(RunEvolution, FieldTimesAreMergedAndSnapshotted) {
  Scenario s = default_scenario();
  s.output.field_times = {kPi / 2};
  s.runs = {make_run("quantum", Mode::quantum, 0, {0.0, kPi})};
  const auto rec = run_evolution(s, s.runs[0]);
  ASSERT_TRUE(rec.ok());
  ASSERT_EQ(rec.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(rec.rows[1].t, kPi / 2);
  ASSERT_EQ(rec.snapshots.size(), 1u);
  EXPECT_GT(rec.snapshots[0].wigner.max_abs(), 0.0);
  const auto mask = negativity_mask(rec.snapshots[0].wigner);
  EXPECT_GT(std::count(mask.begin(), mask.end(), std::uint8_t{1}), 0);
  EXPECT_GT(rec.rows[1].negativity, 0.0);
}

TEST(RunEvolution, FailureIsConfinedToItsRecord) {
  Scenario s = default_scenario();
  s.hamiltonian = PolyOscillator{{0.0, 0.0, 0.0, 1.0}};
  auto bad = make_run("semiquantum", Mode::semiquantum, 2, {0.0, kPi});
  bad.config.leak_limit = 1e-12;
  s.runs = {bad, make_run("quantum", Mode::quantum, 0, {0.0, kPi})};
  const auto recs = run_scenario(s);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_FALSE(recs[0].ok());
  EXPECT_EQ(recs[0].error_code, "fock_leak");
  EXPECT_TRUE(recs[1].ok());
}

TEST(Comparison, FourWayOnSextic) {
  Scenario s = default_scenario();
  s.hamiltonian = PolyOscillator{{0.0, 0.0, 0.0, 1.0}};
  const auto ts = uniform_times(kPi, 16);
  s.runs = {make_run("classical", Mode::classical, 0, ts), make_run("semiclassical", Mode::semiclassical, 2, ts),
            make_run("quantum", Mode::quantum, 0, ts), make_run("semiquantum", Mode::semiquantum, 2, ts)};
  s.runs[3].config.leak_limit = 0.05;
  const auto c = four_way_compare(s);
  ASSERT_EQ(c.labels.size(), 4u);
  EXPECT_LT(c.spread_at_start(), 1e-6);
  EXPECT_GT(c.min_pair_late(), 1e-2);
  for (Eigen::Index a = 0; a < 4; ++a) EXPECT_EQ(c.max_deviation(a, a), 0.0);
}

TEST(Comparison, FourWayNeedsSextic) {
  Scenario s = default_scenario();
  EXPECT_THROW(four_way_compare(s), Error);
}
