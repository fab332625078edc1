#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semiquant/fock.hpp"
#include "semiquant/hamiltonian.hpp"
#include "semiquant/phasespace.hpp"
#include "semiquant/weyl.hpp"

namespace semiquant {

enum class Mode { classical, semiclassical, quantum, semiquantum };

std::string to_string(Mode mode);
/// Throws "config" on an unknown name.
Mode parse_mode(const std::string& name);

/// automatic: exact band propagation where the Hamiltonian allows it (a
/// function of H0), fixed-step RK4 otherwise.
enum class Integrator { automatic, rk4, exponential };

std::string to_string(Integrator integrator);
Integrator parse_integrator(const std::string& name);

struct EvolutionConfig {
  Mode mode = Mode::quantum;
  int order = 0;  // 0, 2 or 4; semiclassical and semiquantum only
  double dt = 1e-3;
  double t_final = 3.14159265358979323846;
  /// Sorted, inside [0, t_final]. Empty means {0, t_final}.
  std::vector<double> snapshot_times;
  /// Largest Fock edge weight tolerated by the semiquantum engines.
  double leak_limit = 1e-6;
  /// Split dt into equal substeps so |lambda h| stays inside the RK4
  /// stability region, lambda estimated by power iteration on the RHS.
  bool auto_substep = true;
  Integrator integrator = Integrator::automatic;

  void validate() const;
  std::vector<double> schedule() const;
};

struct EngineReport {
  int substeps = 1;              // RK4 steps per dt
  double spectral_radius = 0.0;  // power-iteration estimate for the RHS
  long long steps = 0;           // RK4 steps taken
  double max_boundary_ratio = 0.0;
  double max_leak = 0.0;
  std::vector<std::string> warnings;
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  EngineReport report;
};

using FieldTrajectory = Trajectory<PhaseSpaceField>;
using OperatorTrajectory = Trajectory<FockOperator>;

/// Substeps per dt needed for RK4 stability given a spectral radius.
int stable_substeps(double spectral_radius, double dt);

// ---- classical --------------------------------------------------------------

/// Exact solution of rho_t = H J rho for H = f(H0): each point turns clockwise
/// in the (sqrt(m w) q, p / sqrt(m w)) plane at angular rate w f'(H0), so
/// rho(t, z) = rho0(flow_{-t}(z)).
PhaseSpaceField characteristics_density(const std::function<double(double, double)>& rho0,
                                        const PolyOscillator& spec, const PhaseSpaceGrid& grid,
                                        double t);

/// Minimum-uncertainty Gaussian at (q0, p0) carried along the characteristics.
PhaseSpaceField classical_characteristics_gaussian(double q0, double p0, const PolyOscillator& spec,
                                                   const PhaseSpaceGrid& grid, double t);

/// Same flow for an arbitrary sampled density, by periodic bicubic (Catmull-Rom)
/// interpolation. When `interpolation_error` is given it receives an estimate:
/// the interpolant's max deviation from the spectral interpolant at cell centres.
PhaseSpaceField evolve_classical_characteristics(const PhaseSpaceField& rho0,
                                                 const PolyOscillator& spec, double t,
                                                 double* interpolation_error = nullptr);

/// Analytic derivative stack of a polynomial Hamiltonian up to `max_order`,
/// optionally multiplied by a radial taper (taper_outer <= 0 disables it).
DerivativeStack hamiltonian_stack(const Polynomial2& h, const PhaseSpaceGrid& grid, int max_order,
                                  double taper_inner = 0.0, double taper_outer = 0.0);

/// RK4 on rho_t = H J rho with spectral derivatives of rho.
FieldTrajectory evolve_classical_grid(const PhaseSpaceField& rho, const DerivativeStack& h,
                                      const EvolutionConfig& cfg);
/// Same with H given by samples (differentiated spectrally, so it must decay).
FieldTrajectory evolve_classical_grid(const PhaseSpaceField& rho, const PhaseSpaceField& h,
                                      const EvolutionConfig& cfg);

/// RK4 on W_t = {H, W}_star truncated at cfg.order. Order 0 is the classical grid engine.
FieldTrajectory evolve_semiclassical(const PhaseSpaceField& w, const DerivativeStack& h,
                                     const EvolutionConfig& cfg);
FieldTrajectory evolve_semiclassical(const PhaseSpaceField& w, const PhaseSpaceField& h,
                                     const EvolutionConfig& cfg);

// ---- quantum ----------------------------------------------------------------

/// rho_mn(t) = exp(-i (E_m - E_n) t / hbar) rho_mn(0) with E_n the Weyl levels.
FockOperator evolve_quantum_exact(const FockOperator& rho0, const PolyOscillator& spec, double t);

/// RK4 on rho_t = [H, rho] / i hbar.
OperatorTrajectory evolve_quantum_generic(const FockOperator& rho, const FockOperator& h,
                                          const EvolutionConfig& cfg);

/// RK4 on G_t = odot_bracket(H, G) truncated at cfg.order. Throws "fock_leak"
/// when the edge weight of G exceeds cfg.leak_limit. When h is built in a
/// larger basis than g, the bracket is evaluated on g embedded there and cut
/// back (a Galerkin compression, which keeps the generator skew-Hermitian);
/// semiquantum_padding gives a sufficient margin for polynomial symbols.
OperatorTrajectory evolve_semiquantum(const FockOperator& g, const OperatorDerivatives& h,
                                      const EvolutionConfig& cfg);
int semiquantum_padding(const Polynomial2& h, int order);
/// H derivatives from nested commutators of the given operator, in its own
/// basis (no compression; the cut rows can feed growing modes).
OperatorTrajectory evolve_semiquantum(const FockOperator& g, const FockOperator& h,
                                      const EvolutionConfig& cfg);

/// G_t = [p^2/2m + V(q), G] / i hbar - (i hbar / 24) [V''(q), G_pp], with both
/// operators quantised exactly. Order 2 only.
OperatorTrajectory evolve_semiquantum_potential(const FockOperator& g, const KineticPotential& spec,
                                                const EvolutionConfig& cfg);

// ---- Fock-basis generators and exact band propagation -----------------------

/// A linear map on dim x dim Fock matrices.
using FockGenerator = std::function<CMatrix(const CMatrix&)>;

/// G -> truncated odot bracket (H, G), evaluated on G embedded in a padded
/// basis with exactly quantised H derivatives and cut back to dim.
FockGenerator semiquantum_generator(const Polynomial2& h, const OscillatorParams& params, int dim,
                                    int order);

/// The truncated star-bracket equation W_t = sum_k s_k hbar^2k H J^(2k+1) W
/// carried to Fock matrices F = W^-1(2 pi hbar W): multiplication by q, p
/// becomes m_q, m_p and d/dq, d/dp become D_q, D_p. Padded and cut as above.
FockGenerator semiclassical_generator(const Polynomial2& h, const OscillatorParams& params, int dim,
                                      int order);

/// exp(t L) for a generator that maps each band m - n = const of a Fock
/// matrix into itself (any Hamiltonian that is a function of H0). The band
/// blocks are read off from dim probes and diagonalised once.
class BandPropagator {
 public:
  BandPropagator(const FockGenerator& gen, const OscillatorParams& params, int dim);

  int dim() const { return dim_; }
  /// max over bands of |L + L^dagger| relative to max |L|; 0 for a skew generator.
  double skew_defect() const { return skew_defect_; }
  /// Relative mismatch between L(R) and the band assembly for a random R.
  double band_residual() const { return band_residual_; }
  double spectral_radius() const { return radius_; }

  FockOperator apply(const FockOperator& x, double t) const;

 private:
  struct Band {
    int offset;             // m - n
    CMatrix vectors;        // eigenvectors of L restricted to the band
    Eigen::VectorXcd rates; // eigenvalues of L
    CMatrix inverse;        // vectors^-1 (adjoint when the block is skew)
  };

  OscillatorParams params_;
  int dim_;
  std::vector<Band> bands_;
  double skew_defect_ = 0.0;
  double band_residual_ = 0.0;
  double radius_ = 0.0;
};

/// Snapshots of exp(t L) x0 on cfg's schedule. With watch_leak, throws
/// "fock_leak" once the edge weight passes cfg.leak_limit.
OperatorTrajectory propagate_bands(const FockOperator& x0, const BandPropagator& prop,
                                   const EvolutionConfig& cfg, bool watch_leak);

}  // namespace semiquant
