#pragma once

#include <complex>

#include <Eigen/Dense>

#include "semiquant/error.hpp"

namespace semiquant {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Reference oscillator constants. All quantities are dimensionless.
struct OscillatorParams {
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 0.5;
  double energy = 1.0;  // scale E of the polynomial-oscillator family

  /// hbar * omega / E; derived, never stored.
  double mu() const { return hbar * omega / energy; }

  void validate() const;

  friend bool operator==(const OscillatorParams&, const OscillatorParams&) = default;
};

/// Complex square matrix in the truncated Fock basis {|0>, ..., |N-1>}.
class FockOperator {
 public:
  FockOperator(const OscillatorParams& params, CMatrix entries);

  static FockOperator zero(const OscillatorParams& params, int dim);
  static FockOperator identity(const OscillatorParams& params, int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }
  const OscillatorParams& params() const { return params_; }
  cplx operator()(int m, int n) const { return entries_(m, n); }

  FockOperator adjoint() const;
  /// max_{mn} |A_mn - conj(A_nm)|
  double hermiticity_drift() const;
  /// (A + A^dagger) / 2
  FockOperator hermitian_part() const;

  FockOperator& operator+=(const FockOperator& other);
  FockOperator& operator-=(const FockOperator& other);
  FockOperator& operator*=(cplx scale);

  friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
  friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
  friend FockOperator operator*(FockOperator a, cplx s) { return a *= s; }
  friend FockOperator operator*(cplx s, FockOperator a) { return a *= s; }
  /// Operator (matrix) product.
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);

 private:
  OscillatorParams params_;
  CMatrix entries_;
};

/// Throws unless both operators share dimension and oscillator params.
void require_compatible(const FockOperator& a, const FockOperator& b);

struct CanonicalOperators {
  FockOperator position;
  FockOperator momentum;
  FockOperator number;
};

/// Ladder-algebra q, p and N in dimension `dim` (>= 2). [q, p] = i hbar on
/// rows/columns 0..dim-2; the last diagonal entry carries the truncation defect.
CanonicalOperators build_canonical(const OscillatorParams& params, int dim);

/// Coherent amplitude of the minimum-uncertainty state centred at (q0, p0).
cplx coherent_amplitude(double q0, double p0, const OscillatorParams& params);

/// |alpha><alpha| truncated to `dim` states and renormalised to unit trace.
/// Throws "truncation" when the discarded tail mass reaches 1e-12.
FockOperator coherent_density(cplx alpha, const OscillatorParams& params, int dim);

/// Probability mass of |alpha> outside the first `dim` Fock states.
double coherent_tail_mass(cplx alpha, int dim);

enum class Axis { q, p };

/// Nested-commutator derivatives in a fixed truncated basis.
///   D_q A = [A, p] / (i hbar)      (image of dA/dq)
///   D_p A = [q, A] / (i hbar)      (image of dA/dp)
/// Only the leading (dim - k) x (dim - k) block is exact after k derivatives.
class OperatorCalculus {
 public:
  OperatorCalculus(const OscillatorParams& params, int dim);

  int dim() const { return dim_; }
  const OscillatorParams& params() const { return params_; }

  CMatrix d_q(const CMatrix& a) const;
  CMatrix d_p(const CMatrix& a) const;
  /// D_q^{q_order} D_p^{p_order} a
  CMatrix derivative(const CMatrix& a, int q_order, int p_order) const;

  /// (q A + A q) / 2 and (p A + A p) / 2: the images of multiplying a symbol
  /// by q or p. They commute with each other.
  CMatrix m_q(const CMatrix& a) const;
  CMatrix m_p(const CMatrix& a) const;

 private:
  // Off-diagonal ladder coefficients: q_{n,n+1} = q_{n+1,n} = qc_[n],
  // p_{n,n+1} = -i pc_[n], p_{n+1,n} = +i pc_[n].
  OscillatorParams params_;
  int dim_;
  Eigen::VectorXd qc_;
  Eigen::VectorXd pc_;
};

FockOperator op_derivative(const FockOperator& a, Axis axis, int order = 1);
FockOperator mixed_derivative(const FockOperator& a, int q_order, int p_order);

FockOperator commutator(const FockOperator& a, const FockOperator& b);

struct Spectrum {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns are eigenvectors
  double hermiticity_drift = 0.0;
};

/// Full spectrum of a Hermitian operator. Inputs drifting more than 1e-9
/// from Hermiticity are rejected; the rest are symmetrised first.
Spectrum hermitian_spectrum(const FockOperator& a);

cplx trace(const FockOperator& a);
/// Tr(A B)
cplx expectation(const FockOperator& a, const FockOperator& b);

/// Hilbert-Schmidt mass of the entries with max(m, n) >= dim - rows.
double edge_weight(const FockOperator& a, int rows = 4);
double edge_weight(const CMatrix& a, int rows = 4);

}  // namespace semiquant
