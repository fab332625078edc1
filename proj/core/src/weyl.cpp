#include "semiquant/weyl.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "semiquant/fft.hpp"

namespace semiquant {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

void require_params(const PhaseSpaceGrid& grid, const OscillatorParams& params) {
  require(grid.params == params, "dimension_mismatch",
          "operator and grid carry different oscillator parameters");
}

// Per-row kernel tables: U(j, n) = phi_n(q + x_j / 2), V(j, n) = phi_n(q - x_j / 2).
struct RowTables {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
};

void fill_row_tables(const OscillatorParams& params, int dim, double q, const Eigen::VectorXd& x,
                     RowTables& t) {
  const int n = static_cast<int>(x.size());
  t.u.resize(n, dim);
  t.v.resize(n, dim);
  std::vector<double> buf(dim);
  // x_j and x_{n-j} are mirror images for j >= 1, so V(j) = U(n - j).
  for (int j = 0; j < n; ++j) {
    hermite_functions(params, dim, q + 0.5 * x(j), buf.data());
    for (int m = 0; m < dim; ++m) t.u(j, m) = buf[m];
  }
  hermite_functions(params, dim, q - 0.5 * x(0), buf.data());
  for (int m = 0; m < dim; ++m) t.v(0, m) = buf[m];
  for (int j = 1; j < n; ++j) t.v.row(j) = t.u.row(n - j);
}

}  // namespace

void hermite_functions(const OscillatorParams& params, int dim, double x, double* out) {
  const double mw = params.mass * params.omega;
  const double xi = std::sqrt(mw / params.hbar) * x;
  const double norm = std::pow(mw / (std::numbers::pi * params.hbar), 0.25);
  double prev = 0.0;
  double cur = norm * std::exp(-0.5 * xi * xi);
  if (dim > 0) out[0] = cur;
  for (int n = 0; n + 1 < dim; ++n) {
    const double next = std::sqrt(2.0 / (n + 1)) * xi * cur - std::sqrt(n / (n + 1.0)) * prev;
    prev = cur;
    cur = next;
    out[n + 1] = cur;
  }
}

HermiteBasisTable::HermiteBasisTable(const OscillatorParams& params, int dim,
                                     const Eigen::VectorXd& points)
    : points_(points), values_(points.size(), dim) {
  params.validate();
  require(dim >= 1, "precondition", "Hermite table needs a positive dimension");
  std::vector<double> buf(dim);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    hermite_functions(params, dim, points(i), buf.data());
    for (int n = 0; n < dim; ++n) values_(i, n) = buf[n];
  }
}

double HermiteBasisTable::orthonormality_error(double spacing) const {
  const Eigen::MatrixXd gram = spacing * (values_.transpose() * values_);
  return (gram - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

double SeriesCoefficients::inverse(int k) {
  static constexpr double a[] = {1.0, 1.0 / 6.0, 7.0 / 360.0};
  require(k >= 0 && k <= 2, "unsupported", "series coefficients are stored through hbar^4");
  return a[k];
}

double SeriesCoefficients::forward(int k) {
  static constexpr double s[] = {1.0, -1.0 / 24.0, 1.0 / 1920.0};
  require(k >= 0 && k <= 2, "unsupported", "series coefficients are stored through hbar^4");
  return s[k];
}

double KernelField::hermiticity_drift() const {
  return (values - values.adjoint()).cwiseAbs().maxCoeff();
}

KernelField operator_kernel(const FockOperator& a, const Eigen::VectorXd& axis) {
  const HermiteBasisTable table(a.params(), a.dim(), axis);
  const Eigen::MatrixXd& phi = table.values();
  KernelField k;
  k.axis = axis;
  k.values = phi.cast<cplx>() * a.matrix() * phi.transpose().cast<cplx>();
  return k;
}

int max_fock_dim(const PhaseSpaceGrid& grid) {
  grid.validate();
  const auto& par = grid.params;
  const double mw = par.mass * par.omega;
  const double rq = std::min(-grid.q_min, grid.q_max);
  const double rp = std::min(-grid.p_min, grid.p_max);
  if (rq <= 0 || rp <= 0) return 0;
  // Turning point of level N-1: sqrt(hbar (2N - 1) / m w) in q, sqrt(hbar m w (2N - 1)) in p.
  const double by_extent = std::min(mw * rq * rq / par.hbar, rp * rp / (mw * par.hbar));
  // Local wavenumber at the origin is kappa = sqrt((2N - 1) m w / hbar); require dq < pi / 2 kappa.
  const double sq = std::numbers::pi / (2.0 * grid.dq());
  const double sp = std::numbers::pi / (2.0 * grid.dp());
  const double by_spacing = std::min(sq * sq * par.hbar / mw, sp * sp * par.hbar * mw);
  const double limit = std::min(by_extent, by_spacing);
  return static_cast<int>(std::floor((limit + 1.0) / 2.0));
}

void check_resolution(const PhaseSpaceGrid& grid, const OscillatorParams& params, int dim) {
  require_params(grid, params);
  const int limit = max_fock_dim(grid);
  require(dim <= limit, "resolution",
          "Fock dimension " + std::to_string(dim) + " exceeds the grid limit " +
              std::to_string(limit));
}

Eigen::VectorXd kernel_axis(const PhaseSpaceGrid& grid) {
  const int n = grid.n_p;
  const double dx = 2.0 * std::numbers::pi * grid.params.hbar / (n * grid.dp());
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) x(j) = (j - n / 2) * dx;
  return x;
}

PhaseSpaceField weyl_transform(const FockOperator& a, const PhaseSpaceGrid& grid) {
  grid.validate();
  check_resolution(grid, a.params(), a.dim());
  const int nq = grid.n_q, np = grid.n_p, dim = a.dim();
  const Eigen::VectorXd x = kernel_axis(grid);
  const double dx = x(1) - x(0);
  const double hbar = grid.params.hbar;

  Eigen::VectorXcd phase(np);
  for (int j = 0; j < np; ++j) phase(j) = dx * std::exp(cplx(0.0, -grid.p_min * x(j) / hbar));

  const Eigen::MatrixXd are = a.matrix().real();
  const Eigen::MatrixXd aim = a.matrix().imag();
  Eigen::ArrayXcd out(static_cast<Eigen::Index>(grid.size()));
  RowTables t;
  Eigen::MatrixXd tr, ti;
  for (int i = 0; i < nq; ++i) {
    fill_row_tables(grid.params, dim, grid.q(i), x, t);
    tr.noalias() = t.u * are;
    ti.noalias() = t.u * aim;
    for (int j = 0; j < np; ++j) {
      const double kr = tr.row(j).dot(t.v.row(j));
      const double ki = ti.row(j).dot(t.v.row(j));
      out(static_cast<Eigen::Index>(grid.index(i, j))) = phase(j) * cplx(kr, ki);
    }
  }
  FftPlan::rows(nq, np).forward(out.data());
  for (int i = 0; i < nq; ++i) {
    for (int k = 1; k < np; k += 2) out(static_cast<Eigen::Index>(grid.index(i, k))) *= -1.0;
  }
  return PhaseSpaceField(grid, std::move(out));
}

FockOperator inverse_weyl(const PhaseSpaceField& a, int dim) {
  const auto& grid = a.grid();
  check_resolution(grid, grid.params, dim);
  const int nq = grid.n_q, np = grid.n_p;
  const Eigen::VectorXd x = kernel_axis(grid);
  const double hbar = grid.params.hbar;

  Eigen::ArrayXcd b = a.values();
  for (int i = 0; i < nq; ++i) {
    for (int k = 1; k < np; k += 2) b(static_cast<Eigen::Index>(grid.index(i, k))) *= -1.0;
  }
  FftPlan::rows(nq, np).backward(b.data());

  Eigen::VectorXcd phase(np);
  for (int j = 0; j < np; ++j) phase(j) = std::exp(cplx(0.0, grid.p_min * x(j) / hbar));

  Eigen::MatrixXd re = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(dim, dim);
  RowTables t;
  Eigen::MatrixXd wr(np, dim), wi(np, dim);
  for (int i = 0; i < nq; ++i) {
    fill_row_tables(grid.params, dim, grid.q(i), x, t);
    for (int j = 0; j < np; ++j) {
      const cplx bij = b(static_cast<Eigen::Index>(grid.index(i, j))) * phase(j);
      wr.row(j) = bij.real() * t.v.row(j);
      wi.row(j) = bij.imag() * t.v.row(j);
    }
    re.noalias() += t.u.transpose() * wr;
    im.noalias() += t.u.transpose() * wi;
  }
  const double scale = grid.dq() / np;
  CMatrix out(dim, dim);
  out.real() = scale * re;
  out.imag() = scale * im;
  return FockOperator(grid.params, std::move(out));
}

FockOperator groenewold_from_liouville(const PhaseSpaceField& rho, int dim) {
  return inverse_weyl(rho * cplx(2.0 * std::numbers::pi * rho.grid().params.hbar, 0.0), dim);
}

FockOperator weyl_quantize(const Polynomial2& symbol, const OscillatorParams& params, int dim) {
  params.validate();
  require(dim >= 1, "precondition", "Fock dimension must be positive");
  const int deg = std::max(symbol.degree(), 0);
  const int big = dim + deg + 2;
  const auto ops = build_canonical(params, big);
  std::vector<CMatrix> qpow{CMatrix::Identity(big, big)}, ppow{CMatrix::Identity(big, big)};
  for (int k = 1; k <= deg; ++k) {
    qpow.push_back(qpow.back() * ops.position.matrix());
    ppow.push_back(ppow.back() * ops.momentum.matrix());
  }
  CMatrix acc = CMatrix::Zero(big, big);
  for (const auto& [key, c] : symbol.terms()) {
    const auto [a, b] = key;
    const double norm = c / std::ldexp(1.0, a);
    for (int k = 0; k <= a; ++k) {
      acc.noalias() += (norm * binomial(a, k)) * (qpow[k] * ppow[b] * qpow[a - k]);
    }
  }
  return FockOperator(params, acc.topLeftCorner(dim, dim));
}

void SeriesMode::validate() const {
  if (kind == Kind::exact) {
    require(value >= 2, "precondition", "exact mode needs a Fock dimension of at least 2");
  } else {
    require(value == 0 || value == 2 || value == 4, "unsupported",
            "truncation order must be 0, 2 or 4");
  }
}

PhaseSpaceField star_product(const DerivativeStack& a, const DerivativeStack& b, int order) {
  SeriesMode::truncated(order).validate();
  require_same_grid(a.grid(), b.grid());
  const double hbar = a.grid().params.hbar;
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(a.grid().size()));
  // sum_n (i hbar / 2)^n / n! A J^n B through n = order + 1
  for (int n = 0; n <= order + 1; ++n) {
    const cplx c = std::pow(cplx(0.0, 0.5 * hbar), n) / factorial(n);
    accumulate_j_power(a, b, n, c, out);
  }
  return PhaseSpaceField(a.grid(), std::move(out));
}

void accumulate_star_bracket(const DerivativeStack& a, const DerivativeStack& b, int order,
                             double scale, Eigen::ArrayXcd& out) {
  SeriesMode::truncated(order).validate();
  const double hbar = a.grid().params.hbar;
  for (int k = 0; 2 * k <= order; ++k) {
    const double c = scale * SeriesCoefficients::forward(k) * std::pow(hbar, 2 * k);
    accumulate_j_power(a, b, 2 * k + 1, c, out);
  }
}

PhaseSpaceField star_bracket(const DerivativeStack& a, const DerivativeStack& b, int order) {
  require_same_grid(a.grid(), b.grid());
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(a.grid().size()));
  accumulate_star_bracket(a, b, order, 1.0, out);
  return PhaseSpaceField(a.grid(), std::move(out));
}

PhaseSpaceField star_product(const PhaseSpaceField& a, const PhaseSpaceField& b, SeriesMode mode) {
  mode.validate();
  require_same_grid(a.grid(), b.grid());
  if (mode.kind == SeriesMode::Kind::exact) {
    const FockOperator prod = inverse_weyl(a, mode.value) * inverse_weyl(b, mode.value);
    return weyl_transform(prod, a.grid());
  }
  const int top = mode.value + 1;
  return star_product(DerivativeStack::spectral(a, top), DerivativeStack::spectral(b, top),
                      mode.value);
}

PhaseSpaceField star_bracket(const PhaseSpaceField& a, const PhaseSpaceField& b, SeriesMode mode) {
  mode.validate();
  require_same_grid(a.grid(), b.grid());
  if (mode.kind == SeriesMode::Kind::exact) {
    FockOperator c = commutator(inverse_weyl(a, mode.value), inverse_weyl(b, mode.value));
    c *= 1.0 / cplx(0.0, a.grid().params.hbar);
    return weyl_transform(c, a.grid());
  }
  std::set<int> orders;
  for (int k = 1; k <= mode.value + 1; k += 2) orders.insert(k);
  return star_bracket(DerivativeStack::spectral(a, orders), DerivativeStack::spectral(b, orders),
                      mode.value);
}

FockOperator odot_product(const FockOperator& a, const FockOperator& b, const PhaseSpaceGrid& grid) {
  require_compatible(a, b);
  return inverse_weyl(weyl_transform(a, grid) * weyl_transform(b, grid), a.dim());
}

OperatorDerivatives OperatorDerivatives::from_operator(const FockOperator& a, int max_order) {
  require(max_order >= 0 && max_order <= 6, "precondition", "derivative order must lie in 0..6");
  OperatorDerivatives out(a.params(), a.dim());
  const OperatorCalculus calc(a.params(), a.dim());
  for (int order = 0; order <= max_order; ++order) {
    for (int qa = 0; qa <= order; ++qa) out.data_[{qa, order - qa}] = calc.derivative(a.matrix(), qa, order - qa);
  }
  return out;
}

OperatorDerivatives OperatorDerivatives::from_symbol(const Polynomial2& symbol,
                                                     const OscillatorParams& params, int dim,
                                                     int max_order) {
  require(max_order >= 0 && max_order <= 6, "precondition", "derivative order must lie in 0..6");
  OperatorDerivatives out(params, dim);
  for (int order = 0; order <= max_order; ++order) {
    for (int qa = 0; qa <= order; ++qa) {
      const Polynomial2 d = symbol.derivative(qa, order - qa);
      if (!d.is_zero()) out.data_[{qa, order - qa}] = weyl_quantize(d, params, dim).matrix();
    }
  }
  return out;
}

bool OperatorDerivatives::is_zero(int q_order, int p_order) const {
  return data_.find({q_order, p_order}) == data_.end();
}

const CMatrix& OperatorDerivatives::get(int q_order, int p_order) const {
  const auto it = data_.find({q_order, p_order});
  require(it != data_.end(), "precondition", "operator derivative not available");
  return it->second;
}

CMatrix odot_bracket(const OperatorDerivatives& a, const CMatrix& b, const OperatorCalculus& calc,
                     int order) {
  SeriesMode::truncated(order).validate();
  require(a.dim() == calc.dim() && b.rows() == calc.dim() && a.params() == calc.params(),
          "dimension_mismatch", "odot bracket operands differ in dimension or parameters");
  const double hbar = calc.params().hbar;
  const cplx inv = 1.0 / cplx(0.0, hbar);
  CMatrix out = CMatrix::Zero(b.rows(), b.cols());
  CMatrix bd, tmp;
  for (int k = 0; 2 * k <= order; ++k) {
    const int m = 2 * k;
    const double ck = SeriesCoefficients::inverse(k) * std::pow(0.5 * hbar, m);
    for (int j = 0; j <= m; ++j) {
      // Left: D_q^(m-j) D_p^j A. Right: D_p^(m-j) D_q^j B.
      if (a.is_zero(m - j, j)) continue;
      const CMatrix& ad = a.get(m - j, j);
      bd = calc.derivative(b, j, m - j);
      const double w = ck * binomial(m, j) * ((j % 2 == 0) ? 1.0 : -1.0);
      tmp.noalias() = ad * bd;
      tmp.noalias() -= bd * ad;
      out += (w * inv) * tmp;
    }
  }
  return out;
}

FockOperator odot_bracket(const FockOperator& a, const FockOperator& b, SeriesMode mode,
                          const PhaseSpaceGrid& grid) {
  mode.validate();
  require_compatible(a, b);
  if (mode.kind == SeriesMode::Kind::exact) {
    const auto wa = DerivativeStack::spectral(weyl_transform(a, grid), std::set<int>{1});
    const auto wb = DerivativeStack::spectral(weyl_transform(b, grid), std::set<int>{1});
    return inverse_weyl(j_power_bilinear(wa, wb, 1), mode.value);
  }
  const OperatorCalculus calc(a.params(), a.dim());
  const auto ad = OperatorDerivatives::from_operator(a, mode.value);
  return FockOperator(a.params(), odot_bracket(ad, b.matrix(), calc, mode.value));
}

FockOperator odot_bracket_exact(const Polynomial2& h, const FockOperator& b,
                                const PhaseSpaceGrid& grid) {
  require_params(grid, b.params());
  const auto hs = DerivativeStack::analytic(h, grid, 1);
  const auto bs = DerivativeStack::spectral(weyl_transform(b, grid), std::set<int>{1});
  return inverse_weyl(j_power_bilinear(hs, bs, 1), b.dim());
}

}  // namespace semiquant
