#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "semiquant/fock.hpp"
#include "semiquant/hamiltonian.hpp"
#include "semiquant/polynomial.hpp"

namespace semiquant {

/// Uniform periodic sampling of the (q, p) plane. Sample (i, k) sits at
/// (q_min + i dq, p_min + k dp) with dq = (q_max - q_min) / n_q.
struct PhaseSpaceGrid {
  double q_min = -8.0;
  double q_max = 8.0;
  double p_min = -8.0;
  double p_max = 8.0;
  int n_q = 256;
  int n_p = 256;
  OscillatorParams params;

  static PhaseSpaceGrid symmetric(double half_width, int points, const OscillatorParams& params);

  /// n_q, n_p >= 64 and powers of two; bounds ordered; params valid.
  void validate() const;

  double dq() const { return (q_max - q_min) / n_q; }
  double dp() const { return (p_max - p_min) / n_p; }
  double q(int i) const { return q_min + i * dq(); }
  double p(int k) const { return p_min + k * dp(); }
  std::size_t size() const { return static_cast<std::size_t>(n_q) * n_p; }
  std::size_t index(int i, int k) const { return static_cast<std::size_t>(i) * n_p + k; }
  /// Largest radius of a disc centred at the origin inside the domain.
  double inner_radius() const;

  friend bool operator==(const PhaseSpaceGrid&, const PhaseSpaceGrid&) = default;
};

/// Samples on a PhaseSpaceGrid, row-major with q outer and p inner. Real
/// fields are stored with zero imaginary part.
class PhaseSpaceField {
 public:
  explicit PhaseSpaceField(const PhaseSpaceGrid& grid);
  PhaseSpaceField(const PhaseSpaceGrid& grid, Eigen::ArrayXcd values);

  static PhaseSpaceField sample(const PhaseSpaceGrid& grid,
                                const std::function<cplx(double, double)>& f);
  static PhaseSpaceField from_polynomial(const PhaseSpaceGrid& grid, const Polynomial2& poly);

  const PhaseSpaceGrid& grid() const { return grid_; }
  const Eigen::ArrayXcd& values() const { return values_; }
  cplx operator()(int i, int k) const { return values_(static_cast<Eigen::Index>(grid_.index(i, k))); }

  double max_abs() const;
  double max_abs_imag() const;
  /// max |f| on the outermost ring of samples divided by max |f| (0 for f = 0).
  double boundary_ratio() const;

  PhaseSpaceField& operator+=(const PhaseSpaceField& other);
  PhaseSpaceField& operator-=(const PhaseSpaceField& other);
  PhaseSpaceField& operator*=(cplx scale);
  friend PhaseSpaceField operator+(PhaseSpaceField a, const PhaseSpaceField& b) { return a += b; }
  friend PhaseSpaceField operator-(PhaseSpaceField a, const PhaseSpaceField& b) { return a -= b; }
  friend PhaseSpaceField operator*(PhaseSpaceField a, cplx s) { return a *= s; }
  friend PhaseSpaceField operator*(cplx s, PhaseSpaceField a) { return a *= s; }
  /// Pointwise product.
  friend PhaseSpaceField operator*(const PhaseSpaceField& a, const PhaseSpaceField& b);

 private:
  PhaseSpaceGrid grid_;
  Eigen::ArrayXcd values_;
};

void require_same_grid(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b);

/// max |a - b| over the grid.
double max_difference(const PhaseSpaceField& a, const PhaseSpaceField& b);

/// Minimum-uncertainty Gaussian of unit mass centred at (q0, p0):
///   (1 / pi hbar) exp(-m w (q - q0)^2 / hbar - (p - p0)^2 / (m w hbar)).
/// Throws "coverage" if more than 1e-12 of its mass lies outside the domain.
PhaseSpaceField gaussian_density(double q0, double p0, const PhaseSpaceGrid& grid);

/// Fourier (periodic) derivative. Throws "boundary" when the field's
/// boundary_ratio exceeds 1e-4.
PhaseSpaceField partial_derivative(const PhaseSpaceField& f, Axis axis, int order);
PhaseSpaceField mixed_partial(const PhaseSpaceField& f, int q_order, int p_order);

/// Boundary ratio above which spectral differentiation is refused.
inline constexpr double kBoundaryErrorRatio = 1e-4;
/// Boundary ratio above which engines record a warning.
inline constexpr double kBoundaryWarnRatio = 1e-8;

/// Sampled partial derivatives d_q^a d_p^b f of one symbol, either spectral
/// (from samples) or analytic (from a closed-form polynomial).
class DerivativeStack {
 public:
  using Key = std::pair<int, int>;

  /// Every (a, b) with a + b in `total_orders`. With check_boundary the field
  /// must pass the boundary-decay test.
  static DerivativeStack spectral(const PhaseSpaceField& f, const std::set<int>& total_orders,
                                  bool check_boundary = true);
  static DerivativeStack spectral(const PhaseSpaceField& f, int max_order);
  static DerivativeStack analytic(const Polynomial2& poly, const PhaseSpaceGrid& grid,
                                  int max_order);

  const PhaseSpaceGrid& grid() const { return grid_; }
  bool has(int q_order, int p_order) const;
  /// True when the derivative is known to vanish identically.
  bool is_zero(int q_order, int p_order) const;
  const Eigen::ArrayXcd& get(int q_order, int p_order) const;

  /// Multiplies every stored derivative by a real window (coefficient taper).
  void multiply(const Eigen::ArrayXd& window);

 private:
  explicit DerivativeStack(const PhaseSpaceGrid& grid) : grid_(grid) {}

  PhaseSpaceGrid grid_;
  std::map<Key, Eigen::ArrayXcd> data_;
  std::set<Key> zeros_;
};

/// A J^k B = sum_j (-1)^j C(k, j) (d_q^{k-j} d_p^j A)(d_p^{k-j} d_q^j B),
/// with J = d_q(left) d_p(right) - d_p(left) d_q(right); k <= 5.
PhaseSpaceField j_power_bilinear(const PhaseSpaceField& a, const PhaseSpaceField& b, int k);
PhaseSpaceField j_power_bilinear(const DerivativeStack& a, const DerivativeStack& b, int k);
/// Accumulates c * (A J^k B) into `out` (no allocation of a field).
void accumulate_j_power(const DerivativeStack& a, const DerivativeStack& b, int k, cplx c,
                        Eigen::ArrayXcd& out);

/// Riemann sum sum f dq dp.
cplx integrate(const PhaseSpaceField& f);
/// sum g f dq dp
cplx moment(const PhaseSpaceField& f, const PhaseSpaceField& g);

/// -integral of min(f, 0). Throws "complex_field" if |Im f| > 1e-9 anywhere.
double negativity_volume(const PhaseSpaceField& f);
/// 1 where Re f < -1e-9, else 0.
std::vector<std::uint8_t> negativity_mask(const PhaseSpaceField& f);

/// Pointwise H(q, p) of a Hamiltonian spec.
PhaseSpaceField hamiltonian_field(const HamiltonianSpec& spec, const PhaseSpaceGrid& grid);

/// Radial window: 1 for r <= inner, 0 for r >= outer, smooth (C-infinity) in
/// between, r measured in the oscillator-normalised plane.
Eigen::ArrayXd radial_taper(const PhaseSpaceGrid& grid, double inner, double outer);

/// Trigonometric resampling of a periodic field onto the same domain with a
/// different number of points (zero padding or spectral truncation).
PhaseSpaceField resample_spectral(const PhaseSpaceField& f, int n_q, int n_p);

}  // namespace semiquant
