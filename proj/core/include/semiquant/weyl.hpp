#pragma once

#include <map>
#include <utility>

#include <Eigen/Dense>

#include "semiquant/fock.hpp"
#include "semiquant/phasespace.hpp"
#include "semiquant/polynomial.hpp"

namespace semiquant {

/// Oscillator eigenfunctions phi_n(x), n < dim, sampled at arbitrary points by
/// the normalised three-term recurrence. Row = point, column = n.
class HermiteBasisTable {
 public:
  HermiteBasisTable(const OscillatorParams& params, int dim, const Eigen::VectorXd& points);

  int dim() const { return static_cast<int>(values_.cols()); }
  const Eigen::VectorXd& points() const { return points_; }
  const Eigen::MatrixXd& values() const { return values_; }

  /// max |sum_x phi_m phi_n dx - delta_mn| for uniformly spaced points.
  double orthonormality_error(double spacing) const;

 private:
  Eigen::VectorXd points_;
  Eigen::MatrixXd values_;
};

/// Writes phi_0(x) .. phi_{dim-1}(x) into out[0 .. dim-1].
void hermite_functions(const OscillatorParams& params, int dim, double x, double* out);

/// Taylor coefficients of theta / sin(theta) (inverse series, in theta^2) and of
/// sin(theta) / theta (forward series, in theta^2 with theta = hbar J / 2 and the
/// 4^-k absorbed, i.e. coefficients of hbar^2k J^2k+1).
struct SeriesCoefficients {
  static constexpr int kMaxOrder = 4;
  static double inverse(int k);
  static double forward(int k);
};

/// A_K(x, y) = <x|A|y> on a square sample grid.
struct KernelField {
  Eigen::VectorXd axis;
  CMatrix values;

  /// max |K(x, y) - conj K(y, x)|
  double hermiticity_drift() const;
};

KernelField operator_kernel(const FockOperator& a, const Eigen::VectorXd& axis);

/// Largest Fock dimension whose eigenfunctions the grid resolves: the outermost
/// turning point lies inside the domain and the grid spacing stays below a
/// quarter of the local wavelength, in both q and p.
int max_fock_dim(const PhaseSpaceGrid& grid);
/// Throws "resolution" if dim exceeds max_fock_dim(grid) or params differ.
void check_resolution(const PhaseSpaceGrid& grid, const OscillatorParams& params, int dim);

/// Kernel coordinate x_j = (j - n_p/2) dx with dx = 2 pi hbar / (n_p dp).
Eigen::VectorXd kernel_axis(const PhaseSpaceGrid& grid);

/// W(A)(q, p) = int A_K(q + x/2, q - x/2) exp(-i p x / hbar) dx as a discrete
/// Fourier sum over kernel_axis(grid).
PhaseSpaceField weyl_transform(const FockOperator& a, const PhaseSpaceGrid& grid);

/// A_mn = sum over the grid of A(q, p) W(|n><m|)(q, p) dq dp / (2 pi hbar). The
/// weights decay with the Fock cross-Wigner functions, so polynomially growing
/// symbols are accepted.
FockOperator inverse_weyl(const PhaseSpaceField& a, int dim);

/// W^-1(2 pi hbar rho)
FockOperator groenewold_from_liouville(const PhaseSpaceField& rho, int dim);

/// Exact Weyl quantisation of a polynomial symbol, using the symmetrised form
///   q^a p^b -> 2^-a sum_k C(a, k) q^k p^b q^(a-k)
/// built in an enlarged basis and cut to `dim`.
FockOperator weyl_quantize(const Polynomial2& symbol, const OscillatorParams& params, int dim);

/// Exact (through the opposite representation, at Fock dimension `dim`) or a
/// truncated hbar series of order 0, 2 or 4.
struct SeriesMode {
  enum class Kind { exact, truncated };
  Kind kind = Kind::truncated;
  int value = 0;

  static SeriesMode exact(int dim) { return {Kind::exact, dim}; }
  static SeriesMode truncated(int order) { return {Kind::truncated, order}; }
  void validate() const;
};

/// Truncated series work on derivative stacks holding at least order + 1.
PhaseSpaceField star_product(const DerivativeStack& a, const DerivativeStack& b, int order);
PhaseSpaceField star_bracket(const DerivativeStack& a, const DerivativeStack& b, int order);
/// Accumulates scale * truncated star bracket into out.
void accumulate_star_bracket(const DerivativeStack& a, const DerivativeStack& b, int order,
                             double scale, Eigen::ArrayXcd& out);

/// Field versions; truncated mode differentiates spectrally, exact mode goes
/// through W^-1 at the mode's dimension.
PhaseSpaceField star_product(const PhaseSpaceField& a, const PhaseSpaceField& b, SeriesMode mode);
PhaseSpaceField star_bracket(const PhaseSpaceField& a, const PhaseSpaceField& b, SeriesMode mode);

/// W^-1(W(A) W(B))
FockOperator odot_product(const FockOperator& a, const FockOperator& b, const PhaseSpaceGrid& grid);

/// Operator derivatives D_q^a D_p^b of one operator, keyed by (a, b).
class OperatorDerivatives {
 public:
  /// Nested commutators of the operator itself.
  static OperatorDerivatives from_operator(const FockOperator& a, int max_order);
  /// Exact quantisations of the analytic derivatives of a polynomial symbol.
  static OperatorDerivatives from_symbol(const Polynomial2& symbol, const OscillatorParams& params,
                                         int dim, int max_order);

  int dim() const { return dim_; }
  const OscillatorParams& params() const { return params_; }
  bool is_zero(int q_order, int p_order) const;
  const CMatrix& get(int q_order, int p_order) const;

 private:
  OperatorDerivatives(const OscillatorParams& params, int dim) : params_(params), dim_(dim) {}

  OscillatorParams params_;
  int dim_;
  std::map<std::pair<int, int>, CMatrix> data_;
};

/// Truncated odot bracket
///   sum_k a_k (hbar/2)^2k (1/i hbar) sum_j (-1)^j C(2k, j)
///         [D_q^(2k-j) D_p^j A, D_p^(2k-j) D_q^j B]
/// for order 2K in {0, 2, 4}; the B derivatives come from nested commutators.
CMatrix odot_bracket(const OperatorDerivatives& a, const CMatrix& b, const OperatorCalculus& calc,
                     int order);

/// Exact mode: W^-1(W(A) J W(B)) on `grid`. Truncated mode: nested commutators.
FockOperator odot_bracket(const FockOperator& a, const FockOperator& b, SeriesMode mode,
                          const PhaseSpaceGrid& grid);

/// W^-1(H J W(B)) with analytic derivatives of the symbol H.
FockOperator odot_bracket_exact(const Polynomial2& h, const FockOperator& b,
                                const PhaseSpaceGrid& grid);

}  // namespace semiquant
