#include "semiquant/fock.hpp"

#include <cmath>
#include <string>

namespace semiquant {

void OscillatorParams::validate() const {
  require(mass > 0 && omega > 0 && hbar > 0 && energy > 0 && std::isfinite(mass) &&
              std::isfinite(omega) && std::isfinite(hbar) && std::isfinite(energy),
          "precondition", "oscillator parameters must be finite and strictly positive");
}

FockOperator::FockOperator(const OscillatorParams& params, CMatrix entries)
    : params_(params), entries_(std::move(entries)) {
  params_.validate();
  require(entries_.rows() == entries_.cols() && entries_.rows() > 0, "precondition",
          "Fock operator must be a non-empty square matrix");
  require(entries_.allFinite(), "precondition", "Fock operator entries must be finite");
}

FockOperator FockOperator::zero(const OscillatorParams& params, int dim) {
  return FockOperator(params, CMatrix::Zero(dim, dim));
}

FockOperator FockOperator::identity(const OscillatorParams& params, int dim) {
  return FockOperator(params, CMatrix::Identity(dim, dim));
}

FockOperator FockOperator::adjoint() const { return FockOperator(params_, entries_.adjoint()); }

double FockOperator::hermiticity_drift() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

FockOperator FockOperator::hermitian_part() const {
  return FockOperator(params_, 0.5 * (entries_ + entries_.adjoint()));
}

FockOperator& FockOperator::operator+=(const FockOperator& other) {
  require_compatible(*this, other);
  entries_ += other.entries_;
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& other) {
  require_compatible(*this, other);
  entries_ -= other.entries_;
  return *this;
}

FockOperator& FockOperator::operator*=(cplx scale) {
  entries_ *= scale;
  return *this;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_compatible(a, b);
  return FockOperator(a.params(), a.matrix() * b.matrix());
}

void require_compatible(const FockOperator& a, const FockOperator& b) {
  require(a.dim() == b.dim(), "dimension_mismatch",
          "Fock dimensions differ: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  require(a.params() == b.params(), "dimension_mismatch", "oscillator parameters differ");
}

CanonicalOperators build_canonical(const OscillatorParams& params, int dim) {
  params.validate();
  require(dim >= 2, "precondition", "Fock dimension must be at least 2");
  const double qs = std::sqrt(params.hbar / (2.0 * params.mass * params.omega));
  const double ps = std::sqrt(params.mass * params.omega * params.hbar / 2.0);
  CMatrix q = CMatrix::Zero(dim, dim);
  CMatrix p = CMatrix::Zero(dim, dim);
  CMatrix n = CMatrix::Zero(dim, dim);
  for (int k = 0; k + 1 < dim; ++k) {
    const double s = std::sqrt(static_cast<double>(k + 1));
    q(k, k + 1) = q(k + 1, k) = qs * s;
    // p = i sqrt(m w hbar / 2) (a^dagger - a)
    p(k, k + 1) = cplx(0.0, -ps * s);
    p(k + 1, k) = cplx(0.0, ps * s);
  }
  for (int k = 0; k < dim; ++k) n(k, k) = k;
  return {FockOperator(params, std::move(q)), FockOperator(params, std::move(p)),
          FockOperator(params, std::move(n))};
}

cplx coherent_amplitude(double q0, double p0, const OscillatorParams& params) {
  params.validate();
  const double mw = params.mass * params.omega;
  return cplx(std::sqrt(mw) * q0, p0 / std::sqrt(mw)) / std::sqrt(2.0 * params.hbar);
}

double coherent_tail_mass(cplx alpha, int dim) {
  // |c_n|^2 = e^{-|a|^2} |a|^{2n} / n!, summed past the cut until negligible.
  const double a2 = std::norm(alpha);
  double term = std::exp(-a2);
  for (int n = 1; n <= dim; ++n) term *= a2 / n;
  double tail = 0.0;
  for (int n = dim; n < dim + 10000; ++n) {
    tail += term;
    term *= a2 / (n + 1);
    if (term < 1e-30 * (tail + 1e-300) && n > a2) break;
  }
  return tail;
}

FockOperator coherent_density(cplx alpha, const OscillatorParams& params, int dim) {
  params.validate();
  require(dim >= 1, "precondition", "Fock dimension must be positive");
  const double tail = coherent_tail_mass(alpha, dim);
  require(tail < 1e-12, "truncation",
          "coherent state tail mass " + std::to_string(tail) + " beyond dimension " +
              std::to_string(dim) + " exceeds 1e-12");
  Eigen::VectorXcd c(dim);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  c /= c.norm();
  return FockOperator(params, c * c.adjoint());
}

OperatorCalculus::OperatorCalculus(const OscillatorParams& params, int dim)
    : params_(params), dim_(dim), qc_(std::max(dim - 1, 0)), pc_(std::max(dim - 1, 0)) {
  params.validate();
  require(dim >= 2, "precondition", "Fock dimension must be at least 2");
  const double qs = std::sqrt(params.hbar / (2.0 * params.mass * params.omega));
  const double ps = std::sqrt(params.mass * params.omega * params.hbar / 2.0);
  for (int k = 0; k + 1 < dim; ++k) {
    qc_(k) = qs * std::sqrt(k + 1.0);
    pc_(k) = ps * std::sqrt(k + 1.0);
  }
}

// [A, p] / (i hbar), with p tridiagonal; O(N^2).
CMatrix OperatorCalculus::d_q(const CMatrix& a) const {
  require(a.rows() == dim_ && a.cols() == dim_, "dimension_mismatch", "operator dimension");
  const int n = dim_;
  CMatrix out(n, n);
  const cplx inv = 1.0 / cplx(0.0, params_.hbar);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cplx ap(0.0, 0.0);  // (A p)_{ij} = A_{i,j-1} p_{j-1,j} + A_{i,j+1} p_{j+1,j}
      if (j > 0) ap += a(i, j - 1) * cplx(0.0, -pc_(j - 1));
      if (j + 1 < n) ap += a(i, j + 1) * cplx(0.0, pc_(j));
      cplx pa(0.0, 0.0);  // (p A)_{ij} = p_{i,i-1} A_{i-1,j} + p_{i,i+1} A_{i+1,j}
      if (i > 0) pa += cplx(0.0, pc_(i - 1)) * a(i - 1, j);
      if (i + 1 < n) pa += cplx(0.0, -pc_(i)) * a(i + 1, j);
      out(i, j) = (ap - pa) * inv;
    }
  }
  return out;
}

// [q, A] / (i hbar)
CMatrix OperatorCalculus::d_p(const CMatrix& a) const {
  require(a.rows() == dim_ && a.cols() == dim_, "dimension_mismatch", "operator dimension");
  const int n = dim_;
  CMatrix out(n, n);
  const cplx inv = 1.0 / cplx(0.0, params_.hbar);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cplx qa(0.0, 0.0);
      if (i > 0) qa += qc_(i - 1) * a(i - 1, j);
      if (i + 1 < n) qa += qc_(i) * a(i + 1, j);
      cplx aq(0.0, 0.0);
      if (j > 0) aq += a(i, j - 1) * qc_(j - 1);
      if (j + 1 < n) aq += a(i, j + 1) * qc_(j);
      out(i, j) = (qa - aq) * inv;
    }
  }
  return out;
}

CMatrix OperatorCalculus::m_q(const CMatrix& a) const {
  require(a.rows() == dim_ && a.cols() == dim_, "dimension_mismatch", "operator dimension");
  const int n = dim_;
  CMatrix out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cplx s(0.0, 0.0);
      if (i > 0) s += qc_(i - 1) * a(i - 1, j);
      if (i + 1 < n) s += qc_(i) * a(i + 1, j);
      if (j > 0) s += a(i, j - 1) * qc_(j - 1);
      if (j + 1 < n) s += a(i, j + 1) * qc_(j);
      out(i, j) = 0.5 * s;
    }
  }
  return out;
}

CMatrix OperatorCalculus::m_p(const CMatrix& a) const {
  require(a.rows() == dim_ && a.cols() == dim_, "dimension_mismatch", "operator dimension");
  const int n = dim_;
  CMatrix out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cplx s(0.0, 0.0);
      if (i > 0) s += cplx(0.0, pc_(i - 1)) * a(i - 1, j);
      if (i + 1 < n) s += cplx(0.0, -pc_(i)) * a(i + 1, j);
      if (j > 0) s += a(i, j - 1) * cplx(0.0, -pc_(j - 1));
      if (j + 1 < n) s += a(i, j + 1) * cplx(0.0, pc_(j));
      out(i, j) = 0.5 * s;
    }
  }
  return out;
}

CMatrix OperatorCalculus::derivative(const CMatrix& a, int q_order, int p_order) const {
  require(q_order >= 0 && p_order >= 0, "precondition", "derivative orders must be nonnegative");
  CMatrix out = a;
  for (int k = 0; k < p_order; ++k) out = d_p(out);
  for (int k = 0; k < q_order; ++k) out = d_q(out);
  return out;
}

FockOperator op_derivative(const FockOperator& a, Axis axis, int order) {
  require(order >= 1 && order <= 6, "precondition", "derivative order must lie in 1..6");
  return axis == Axis::q ? mixed_derivative(a, order, 0) : mixed_derivative(a, 0, order);
}

FockOperator mixed_derivative(const FockOperator& a, int q_order, int p_order) {
  const OperatorCalculus calc(a.params(), a.dim());
  return FockOperator(a.params(), calc.derivative(a.matrix(), q_order, p_order));
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) {
  require_compatible(a, b);
  return FockOperator(a.params(), a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

Spectrum hermitian_spectrum(const FockOperator& a) {
  const double drift = a.hermiticity_drift();
  require(drift < 1e-9, "hermiticity",
          "operator is not Hermitian (drift " + std::to_string(drift) + ")");
  const CMatrix sym = 0.5 * (a.matrix() + a.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  require(solver.info() == Eigen::Success, "numerical", "eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors(), drift};
}

cplx trace(const FockOperator& a) { return a.matrix().trace(); }

cplx expectation(const FockOperator& a, const FockOperator& b) {
  require_compatible(a, b);
  // Tr(AB) = sum_ij A_ij B_ji
  return (a.matrix().array() * b.matrix().transpose().array()).sum();
}

double edge_weight(const CMatrix& a, int rows) {
  const int n = static_cast<int>(a.rows());
  const int cut = std::max(n - rows, 0);
  double mass = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i >= cut || j >= cut) mass += std::norm(a(i, j));
    }
  }
  return std::sqrt(mass);
}

double edge_weight(const FockOperator& a, int rows) { return edge_weight(a.matrix(), rows); }

}  // namespace semiquant
