#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semiquant/dynamics.hpp"
#include "semiquant/fock.hpp"
#include "semiquant/hamiltonian.hpp"
#include "semiquant/phasespace.hpp"

namespace semiquant {

struct InitialState {
  double q0 = 0.5;
  double p0 = 0.0;
};

/// One configured evolution, tagged by the name it is reported under.
struct ScenarioRun {
  std::string label;
  EvolutionConfig config;
};

struct OutputOptions {
  /// Times at which fields (and operators) are kept for dumps and heatmaps.
  /// Each must also be reachable by every run (it is merged into its schedule).
  std::vector<double> field_times;
  bool heatmaps = true;
  bool field_dumps = true;
  bool operator_dumps = false;
};

struct Scenario {
  OscillatorParams params;
  HamiltonianSpec hamiltonian = PolyOscillator{{0.0, 0.0, 1.0}};
  InitialState initial;
  PhaseSpaceGrid grid;
  int fock_dim = 64;
  /// Smooth cutoff applied to H for the grid (RK4) engines; outer <= 0 disables.
  double taper_inner = 4.0;
  double taper_outer = 6.0;
  std::vector<ScenarioRun> runs;
  OutputOptions output;

  /// Grid and params agree, the initial Gaussian fits the grid and the Fock
  /// basis, labels are unique and every run config is valid.
  void validate() const;
};

/// The defaults used across the bundled scenarios: m = w = E = 1, hbar = 1/2,
/// 256^2 grid on [-8, 8]^2, N = 64, start at (0.5, 0), H = H2.
Scenario default_scenario();

/// {0, t_final / samples, ..., t_final}
std::vector<double> uniform_times(double t_final, int samples);

struct DiagnosticRow {
  double t = 0.0;
  double q_mean = 0.0;
  double p_mean = 0.0;
  cplx alpha;  // (<q> + i <p>) / sqrt(2)
  double eig_max_1 = 0.0;
  double eig_max_2 = 0.0;
  double eig_min_1 = 0.0;
  double eig_min_2 = 0.0;
  double trace_re = 0.0;  // Tr G, or the field normalisation
  double negativity = 0.0;
  double leak = 0.0;
  double herm_drift = 0.0;
};

struct FieldSnapshot {
  double t = 0.0;
  PhaseSpaceField wigner;               // density / Wigner function
  std::optional<FockOperator> groenewold;  // W^-1(2 pi hbar W)
};

struct TrajectoryRecord {
  std::string label;
  Mode mode = Mode::quantum;
  int order = 0;
  std::string engine;  // which integration route produced it
  std::vector<DiagnosticRow> rows;
  std::vector<FieldSnapshot> snapshots;
  std::vector<std::string> warnings;
  /// Set when the run failed; rows may then be empty.
  std::string error_code;
  std::string error_message;

  bool ok() const { return error_code.empty(); }
};

struct HamiltonianPair {
  PhaseSpaceField symbol;
  FockOperator op;
};

/// H sampled on the grid and its exact Weyl quantisation at dimension N.
HamiltonianPair build_hamiltonian(const HamiltonianSpec& spec, const OscillatorParams& params,
                                  const PhaseSpaceGrid& grid, int dim);

/// Diagnostics of an operator state (quantum, semiquantum).
DiagnosticRow operator_diagnostics(double t, const FockOperator& g, const PhaseSpaceGrid& grid);
/// Diagnostics of a phase-space density; eigenvalues from W^-1(2 pi hbar W).
DiagnosticRow field_diagnostics(double t, const PhaseSpaceField& w, int dim);

/// Runs one evolution. Errors are caught into the record.
TrajectoryRecord run_evolution(const Scenario& s, const ScenarioRun& run);
/// All runs in configuration order.
std::vector<TrajectoryRecord> run_scenario(const Scenario& s);

struct Comparison {
  std::vector<std::string> labels;
  std::vector<double> times;
  std::vector<std::vector<cplx>> alpha;  // [record][time]
  /// max_t |alpha_a - alpha_b| over all times, and over t >= 1.
  Eigen::MatrixXd max_deviation;
  Eigen::MatrixXd max_deviation_late;

  /// smallest off-diagonal entry of max_deviation_late
  double min_pair_late() const;
  /// max over records of |alpha(0) - alpha_0(0)|
  double spread_at_start() const;
};

/// Aligned <alpha> trajectories of successful records sharing one time grid.
Comparison compare_records(const std::vector<TrajectoryRecord>& records);

/// H3 scenario with classical, semiclassical (order 2), quantum and
/// semiquantum (order 2) runs.
Comparison four_way_compare(const Scenario& s);

}  // namespace semiquant
