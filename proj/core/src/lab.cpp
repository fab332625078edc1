#include "semiquant/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <variant>

#include "semiquant/weyl.hpp"

namespace semiquant {

namespace {

constexpr double kTimeMatch = 1e-12;

bool same_time(double a, double b) { return std::abs(a - b) <= kTimeMatch * std::max(1.0, std::abs(a)); }

bool contains_time(const std::vector<double>& ts, double t) {
  return std::any_of(ts.begin(), ts.end(), [&](double x) { return same_time(x, t); });
}

std::vector<double> merged_schedule(const EvolutionConfig& cfg, const std::vector<double>& extra) {
  std::vector<double> ts = cfg.schedule();
  for (double t : extra) {
    if (t <= cfg.t_final * (1 + 1e-12) && !contains_time(ts, t)) ts.push_back(std::min(t, cfg.t_final));
  }
  std::sort(ts.begin(), ts.end());
  return ts;
}

void fill_extremes(DiagnosticRow& row, const FockOperator& g) {
  const Spectrum sp = hermitian_spectrum(g.hermitian_part());
  const auto& v = sp.values;
  const Eigen::Index n = v.size();
  row.eig_min_1 = v(0);
  row.eig_min_2 = v(std::min<Eigen::Index>(1, n - 1));
  row.eig_max_1 = v(n - 1);
  row.eig_max_2 = v(std::max<Eigen::Index>(n - 2, 0));
}

// Moments from the field, eigenvalues and leak from the operator image.
DiagnosticRow combined_diagnostics(double t, const PhaseSpaceField& w, const FockOperator& g) {
  const PhaseSpaceGrid& grid = w.grid();
  DiagnosticRow row;
  row.t = t;
  row.q_mean = moment(w, PhaseSpaceField::from_polynomial(grid, Polynomial2::q())).real();
  row.p_mean = moment(w, PhaseSpaceField::from_polynomial(grid, Polynomial2::p())).real();
  row.alpha = cplx(row.q_mean, row.p_mean) / std::numbers::sqrt2;
  fill_extremes(row, g);
  row.trace_re = integrate(w).real();
  row.negativity = negativity_volume(w) + 0.0;  // no -0 in outputs
  row.leak = edge_weight(g);
  row.herm_drift = g.hermiticity_drift();
  return row;
}

PhaseSpaceField wigner_of(const FockOperator& g, const PhaseSpaceGrid& grid) {
  PhaseSpaceField w = weyl_transform(g, grid);
  w *= cplx(1.0 / (2.0 * std::numbers::pi * g.params().hbar), 0.0);
  return w;
}

void absorb(TrajectoryRecord& rec, const EngineReport& rep) {
  for (const auto& w : rep.warnings) rec.warnings.push_back(w);
}

}  // namespace

void Scenario::validate() const {
  params.validate();
  semiquant::validate(hamiltonian);
  grid.validate();
  require(grid.params == params, "config", "grid parameters differ from the scenario parameters");
  require(fock_dim >= 2, "config", "fock_dim must be at least 2");
  check_resolution(grid, params, fock_dim);
  // initial state must fit both representations
  (void)gaussian_density(initial.q0, initial.p0, grid);
  const double tail = coherent_tail_mass(coherent_amplitude(initial.q0, initial.p0, params), fock_dim);
  require(tail < 1e-12, "truncation", "initial coherent state does not fit in the Fock basis");
  require(taper_outer <= 0 || taper_outer > taper_inner, "config", "taper_outer must exceed taper_inner");
  std::set<std::string> labels;
  for (const auto& r : runs) {
    require(!r.label.empty(), "config", "evolution label must not be empty");
    require(labels.insert(r.label).second, "config", "duplicate evolution label '" + r.label + "'");
    r.config.validate();
  }
  for (double t : output.field_times) require(t >= 0 && std::isfinite(t), "config", "field times must be nonnegative");
}

Scenario default_scenario() {
  Scenario s;
  s.grid.params = s.params;
  return s;
}

std::vector<double> uniform_times(double t_final, int samples) {
  require(samples >= 1, "config", "need at least one sample interval");
  std::vector<double> ts(static_cast<std::size_t>(samples) + 1);
  for (int j = 0; j <= samples; ++j) ts[static_cast<std::size_t>(j)] = t_final * j / samples;
  ts.back() = t_final;
  return ts;
}

HamiltonianPair build_hamiltonian(const HamiltonianSpec& spec, const OscillatorParams& params,
                                  const PhaseSpaceGrid& grid, int dim) {
  validate(spec);
  require(grid.params == params, "precondition", "grid parameters differ");
  const Polynomial2 h = hamiltonian_symbol(spec, params);
  return {PhaseSpaceField::from_polynomial(grid, h), weyl_quantize(h, params, dim)};
}

DiagnosticRow operator_diagnostics(double t, const FockOperator& g, const PhaseSpaceGrid& grid) {
  const auto ops = build_canonical(g.params(), g.dim());
  DiagnosticRow row;
  row.t = t;
  row.q_mean = expectation(ops.position, g).real();
  row.p_mean = expectation(ops.momentum, g).real();
  row.alpha = cplx(row.q_mean, row.p_mean) / std::numbers::sqrt2;
  fill_extremes(row, g);
  row.trace_re = trace(g).real();
  row.negativity = negativity_volume(wigner_of(g.hermitian_part(), grid)) + 0.0;
  row.leak = edge_weight(g);
  row.herm_drift = g.hermiticity_drift();
  return row;
}

DiagnosticRow field_diagnostics(double t, const PhaseSpaceField& w, int dim) {
  return combined_diagnostics(t, w, groenewold_from_liouville(w, dim));
}

TrajectoryRecord run_evolution(const Scenario& s, const ScenarioRun& run) {
  TrajectoryRecord rec;
  rec.label = run.label;
  rec.mode = run.config.mode;
  rec.order = run.config.order;
  try {
    EvolutionConfig cfg = run.config;
    cfg.snapshot_times = merged_schedule(run.config, s.output.field_times);
    cfg.validate();
    const auto* poly = std::get_if<PolyOscillator>(&s.hamiltonian);
    require(poly || cfg.integrator != Integrator::exponential, "unsupported",
            "the exponential integrator needs a Hamiltonian that is a function of H0");
    const bool exact = poly && cfg.integrator != Integrator::rk4;
    const Polynomial2 h = hamiltonian_symbol(s.hamiltonian, s.params);
    const PhaseSpaceGrid& grid = s.grid;
    const int n = s.fock_dim;
    const FockOperator g0 = coherent_density(coherent_amplitude(s.initial.q0, s.initial.p0, s.params), s.params, n);
    const auto keep = [&](double t) { return contains_time(s.output.field_times, t); };

    auto add_field = [&](double t, const PhaseSpaceField& w, const FockOperator& g) {
      rec.rows.push_back(combined_diagnostics(t, w, g));
      if (keep(t)) rec.snapshots.push_back({t, w, g});
    };
    auto add_operator = [&](double t, const FockOperator& g) {
      rec.rows.push_back(operator_diagnostics(t, g, grid));
      if (keep(t)) rec.snapshots.push_back({t, wigner_of(g.hermitian_part(), grid), g});
    };
    auto add_field_only = [&](double t, const PhaseSpaceField& w) {
      add_field(t, w, groenewold_from_liouville(w, n));
    };

    switch (cfg.mode) {
      case Mode::classical:
        if (exact) {
          rec.engine = "characteristics";
          for (double t : cfg.schedule()) {
            add_field_only(t, classical_characteristics_gaussian(s.initial.q0, s.initial.p0, *poly, grid, t));
          }
        } else {
          rec.engine = "rk4-grid";
          const auto hs = hamiltonian_stack(h, grid, 1, s.taper_inner, s.taper_outer);
          const auto tr = evolve_classical_grid(gaussian_density(s.initial.q0, s.initial.p0, grid), hs, cfg);
          absorb(rec, tr.report);
          for (std::size_t k = 0; k < tr.times.size(); ++k) add_field_only(tr.times[k], tr.states[k]);
        }
        break;
      case Mode::semiclassical:
        if (exact) {
          rec.engine = "band-exponential";
          const BandPropagator prop(semiclassical_generator(h, s.params, n, cfg.order), s.params, n);
          const auto tr = propagate_bands(g0, prop, cfg, false);
          absorb(rec, tr.report);
          // the state is F = W^-1(2 pi hbar W); Tr(q F) is the field moment of W
          for (std::size_t k = 0; k < tr.times.size(); ++k) add_operator(tr.times[k], tr.states[k]);
        } else {
          rec.engine = "rk4-grid";
          const auto hs = hamiltonian_stack(h, grid, cfg.order + 1, s.taper_inner, s.taper_outer);
          const auto tr = evolve_semiclassical(gaussian_density(s.initial.q0, s.initial.p0, grid), hs, cfg);
          absorb(rec, tr.report);
          for (std::size_t k = 0; k < tr.times.size(); ++k) add_field_only(tr.times[k], tr.states[k]);
        }
        break;
      case Mode::quantum:
        if (exact) {
          rec.engine = "exact-phases";
          for (double t : cfg.schedule()) add_operator(t, evolve_quantum_exact(g0, *poly, t));
        } else {
          rec.engine = "rk4";
          const auto tr = evolve_quantum_generic(g0, weyl_quantize(h, s.params, n), cfg);
          absorb(rec, tr.report);
          for (std::size_t k = 0; k < tr.times.size(); ++k) add_operator(tr.times[k], tr.states[k]);
        }
        break;
      case Mode::semiquantum:
        if (exact) {
          rec.engine = "band-exponential";
          const BandPropagator prop(semiquantum_generator(h, s.params, n, cfg.order), s.params, n);
          const auto tr = propagate_bands(g0, prop, cfg, true);
          absorb(rec, tr.report);
          for (std::size_t k = 0; k < tr.times.size(); ++k) add_operator(tr.times[k], tr.states[k]);
        } else {
          rec.engine = "rk4";
          const auto hd = OperatorDerivatives::from_symbol(h, s.params, n + semiquantum_padding(h, cfg.order), cfg.order);
          const auto tr = evolve_semiquantum(g0, hd, cfg);
          absorb(rec, tr.report);
          for (std::size_t k = 0; k < tr.times.size(); ++k) add_operator(tr.times[k], tr.states[k]);
        }
        break;
    }
  } catch (const Error& e) {
    rec.error_code = e.code();
    rec.error_message = e.what();
  }
  return rec;
}

std::vector<TrajectoryRecord> run_scenario(const Scenario& s) {
  s.validate();
  std::vector<TrajectoryRecord> out;
  out.reserve(s.runs.size());
  for (const auto& r : s.runs) out.push_back(run_evolution(s, r));
  return out;
}

double Comparison::min_pair_late() const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < max_deviation_late.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < max_deviation_late.cols(); ++b) m = std::min(m, max_deviation_late(a, b));
  }
  return m;
}

double Comparison::spread_at_start() const {
  double m = 0.0;
  for (const auto& a : alpha) m = std::max(m, std::abs(a.front() - alpha.front().front()));
  return m;
}

Comparison compare_records(const std::vector<TrajectoryRecord>& records) {
  Comparison c;
  for (const auto& r : records) {
    require(r.ok(), "precondition", "record '" + r.label + "' failed: " + r.error_message);
    require(!r.rows.empty(), "precondition", "record '" + r.label + "' is empty");
    if (c.labels.empty()) {
      for (const auto& row : r.rows) c.times.push_back(row.t);
    } else {
      require(r.rows.size() == c.times.size(), "precondition", "records have different time grids");
      for (std::size_t k = 0; k < c.times.size(); ++k) {
        require(same_time(r.rows[k].t, c.times[k]), "precondition", "records have different time grids");
      }
    }
    c.labels.push_back(r.label);
    std::vector<cplx> a;
    for (const auto& row : r.rows) a.push_back(row.alpha);
    c.alpha.push_back(std::move(a));
  }
  const auto m = static_cast<Eigen::Index>(c.labels.size());
  c.max_deviation = Eigen::MatrixXd::Zero(m, m);
  c.max_deviation_late = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      for (std::size_t k = 0; k < c.times.size(); ++k) {
        const double d = std::abs(c.alpha[a][k] - c.alpha[b][k]);
        c.max_deviation(a, b) = std::max(c.max_deviation(a, b), d);
        if (c.times[k] >= 1.0) c.max_deviation_late(a, b) = std::max(c.max_deviation_late(a, b), d);
      }
    }
  }
  return c;
}

Comparison four_way_compare(const Scenario& s) {
  const auto* poly = std::get_if<PolyOscillator>(&s.hamiltonian);
  require(poly != nullptr && poly->coeffs.size() == 4, "precondition",
          "the four-way comparison runs on the cubic oscillator H3");
  std::vector<TrajectoryRecord> recs;
  for (Mode m : {Mode::classical, Mode::semiclassical, Mode::quantum, Mode::semiquantum}) {
    auto it = std::find_if(s.runs.begin(), s.runs.end(), [&](const ScenarioRun& r) { return r.config.mode == m; });
    require(it != s.runs.end(), "precondition", "scenario lacks a " + to_string(m) + " run");
    recs.push_back(run_evolution(s, *it));
  }
  return compare_records(recs);
}

}  // namespace semiquant
