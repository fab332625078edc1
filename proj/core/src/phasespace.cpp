#include "semiquant/phasespace.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "semiquant/fft.hpp"

namespace semiquant {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Angular wavenumbers of an n-point periodic axis of length L; the Nyquist
// entry is zeroed so odd derivatives of real data stay real.
Eigen::ArrayXd wavenumbers(int n, double length) {
  Eigen::ArrayXd k(n);
  const double base = 2.0 * std::numbers::pi / length;
  for (int j = 0; j < n; ++j) {
    if (j < n / 2) {
      k(j) = base * j;
    } else if (j == n / 2) {
      k(j) = 0.0;
    } else {
      k(j) = base * (j - n);
    }
  }
  return k;
}

cplx ipow(double k, int order) {
  // (i k)^order
  static const cplx units[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return units[order % 4] * std::pow(k, order);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

void require_decay(const PhaseSpaceField& f) {
  const double ratio = f.boundary_ratio();
  require(ratio <= kBoundaryErrorRatio, "boundary",
          "field does not decay at the domain boundary (ratio " + std::to_string(ratio) +
              "); spectral differentiation needs periodic-compatible data");
}

}  // namespace

PhaseSpaceGrid PhaseSpaceGrid::symmetric(double half_width, int points,
                                         const OscillatorParams& params) {
  PhaseSpaceGrid g;
  g.q_min = g.p_min = -half_width;
  g.q_max = g.p_max = half_width;
  g.n_q = g.n_p = points;
  g.params = params;
  g.validate();
  return g;
}

void PhaseSpaceGrid::validate() const {
  params.validate();
  require(is_power_of_two(n_q) && is_power_of_two(n_p) && n_q >= 64 && n_p >= 64, "precondition",
          "grid point counts must be powers of two and at least 64");
  require(q_max > q_min && p_max > p_min && std::isfinite(q_min) && std::isfinite(q_max) &&
              std::isfinite(p_min) && std::isfinite(p_max),
          "precondition", "grid bounds must be finite and ordered");
}

double PhaseSpaceGrid::inner_radius() const {
  return std::min({-q_min, q_max - dq(), -p_min, p_max - dp()});
}

PhaseSpaceField::PhaseSpaceField(const PhaseSpaceGrid& grid)
    : grid_(grid), values_(Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(grid.size()))) {
  grid_.validate();
}

PhaseSpaceField::PhaseSpaceField(const PhaseSpaceGrid& grid, Eigen::ArrayXcd values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  require(values_.size() == static_cast<Eigen::Index>(grid_.size()), "grid_mismatch",
          "field sample count does not match the grid");
  require(values_.allFinite(), "precondition", "field values must be finite");
}

PhaseSpaceField PhaseSpaceField::sample(const PhaseSpaceGrid& grid,
                                        const std::function<cplx(double, double)>& f) {
  Eigen::ArrayXcd v(static_cast<Eigen::Index>(grid.size()));
  for (int i = 0; i < grid.n_q; ++i) {
    const double q = grid.q(i);
    for (int k = 0; k < grid.n_p; ++k) v(static_cast<Eigen::Index>(grid.index(i, k))) = f(q, grid.p(k));
  }
  return PhaseSpaceField(grid, std::move(v));
}

PhaseSpaceField PhaseSpaceField::from_polynomial(const PhaseSpaceGrid& grid, const Polynomial2& poly) {
  // Horner-free but allocation-free evaluation through cached powers.
  const int deg = std::max(poly.degree(), 0);
  Eigen::ArrayXcd v = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(grid.size()));
  std::vector<double> qp(deg + 1), pp(deg + 1);
  for (int i = 0; i < grid.n_q; ++i) {
    const double q = grid.q(i);
    qp[0] = 1.0;
    for (int d = 1; d <= deg; ++d) qp[d] = qp[d - 1] * q;
    for (int k = 0; k < grid.n_p; ++k) {
      const double p = grid.p(k);
      pp[0] = 1.0;
      for (int d = 1; d <= deg; ++d) pp[d] = pp[d - 1] * p;
      double sum = 0.0;
      for (const auto& [key, c] : poly.terms()) sum += c * qp[key.first] * pp[key.second];
      v(static_cast<Eigen::Index>(grid.index(i, k))) = sum;
    }
  }
  return PhaseSpaceField(grid, std::move(v));
}

double PhaseSpaceField::max_abs() const { return values_.abs().maxCoeff(); }

double PhaseSpaceField::max_abs_imag() const { return values_.imag().abs().maxCoeff(); }

double PhaseSpaceField::boundary_ratio() const {
  const double peak = max_abs();
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  const int nq = grid_.n_q, np = grid_.n_p;
  for (int i = 0; i < nq; ++i) {
    edge = std::max({edge, std::abs((*this)(i, 0)), std::abs((*this)(i, np - 1))});
  }
  for (int k = 0; k < np; ++k) {
    edge = std::max({edge, std::abs((*this)(0, k)), std::abs((*this)(nq - 1, k))});
  }
  return edge / peak;
}

PhaseSpaceField& PhaseSpaceField::operator+=(const PhaseSpaceField& other) {
  require_same_grid(grid_, other.grid_);
  values_ += other.values_;
  return *this;
}

PhaseSpaceField& PhaseSpaceField::operator-=(const PhaseSpaceField& other) {
  require_same_grid(grid_, other.grid_);
  values_ -= other.values_;
  return *this;
}

PhaseSpaceField& PhaseSpaceField::operator*=(cplx scale) {
  values_ *= scale;
  return *this;
}

PhaseSpaceField operator*(const PhaseSpaceField& a, const PhaseSpaceField& b) {
  require_same_grid(a.grid(), b.grid());
  return PhaseSpaceField(a.grid(), a.values() * b.values());
}

void require_same_grid(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b) {
  require(a == b, "grid_mismatch", "fields live on different grids");
}

double max_difference(const PhaseSpaceField& a, const PhaseSpaceField& b) {
  require_same_grid(a.grid(), b.grid());
  return (a.values() - b.values()).abs().maxCoeff();
}

PhaseSpaceField gaussian_density(double q0, double p0, const PhaseSpaceGrid& grid) {
  grid.validate();
  const auto& par = grid.params;
  const double mw = par.mass * par.omega;
  const double sq = std::sqrt(par.hbar / (2.0 * mw));  // standard deviations of the marginals
  const double sp = std::sqrt(par.hbar * mw / 2.0);
  auto outside = [](double lo, double hi, double c, double s) {
    return 0.5 * std::erfc((hi - c) / (s * std::numbers::sqrt2)) +
           0.5 * std::erfc((c - lo) / (s * std::numbers::sqrt2));
  };
  const double lost = outside(grid.q_min, grid.q_max, q0, sq) + outside(grid.p_min, grid.p_max, p0, sp);
  require(lost < 1e-12, "coverage",
          "Gaussian mass outside the domain is " + std::to_string(lost) + " (limit 1e-12)");
  const double norm = 1.0 / (std::numbers::pi * par.hbar);
  return PhaseSpaceField::sample(grid, [&](double q, double p) {
    const double dq = q - q0, dp = p - p0;
    return cplx(norm * std::exp(-mw * dq * dq / par.hbar - dp * dp / (mw * par.hbar)), 0.0);
  });
}

PhaseSpaceField partial_derivative(const PhaseSpaceField& f, Axis axis, int order) {
  require(order >= 1, "precondition", "derivative order must be positive");
  return axis == Axis::q ? mixed_partial(f, order, 0) : mixed_partial(f, 0, order);
}

PhaseSpaceField mixed_partial(const PhaseSpaceField& f, int q_order, int p_order) {
  const auto stack = DerivativeStack::spectral(f, std::set<int>{q_order + p_order});
  return PhaseSpaceField(f.grid(), stack.get(q_order, p_order));
}

DerivativeStack DerivativeStack::spectral(const PhaseSpaceField& f, const std::set<int>& total_orders,
                                          bool check_boundary) {
  const auto& g = f.grid();
  DerivativeStack out(g);
  bool needs_transform = false;
  for (int order : total_orders) {
    require(order >= 0 && order <= 8, "precondition", "derivative order must lie in 0..8");
    if (order > 0) needs_transform = true;
  }
  if (total_orders.count(0)) out.data_[{0, 0}] = f.values();
  if (!needs_transform) return out;
  if (check_boundary) require_decay(f);

  const Eigen::ArrayXd kq = wavenumbers(g.n_q, g.q_max - g.q_min);
  const Eigen::ArrayXd kp = wavenumbers(g.n_p, g.p_max - g.p_min);
  Eigen::ArrayXcd hat = f.values();
  const auto& plan = FftPlan::grid(g.n_q, g.n_p);
  plan.forward(hat.data());
  const double scale = 1.0 / static_cast<double>(g.size());

  for (int order : total_orders) {
    if (order == 0) continue;
    for (int a = order; a >= 0; --a) {
      const int b = order - a;
      Eigen::ArrayXcd d(hat.size());
      for (int i = 0; i < g.n_q; ++i) {
        const cplx fq = ipow(kq(i), a) * scale;
        for (int k = 0; k < g.n_p; ++k) {
          const auto idx = static_cast<Eigen::Index>(g.index(i, k));
          d(idx) = hat(idx) * fq * ipow(kp(k), b);
        }
      }
      plan.backward(d.data());
      out.data_[{a, b}] = std::move(d);
    }
  }
  return out;
}

DerivativeStack DerivativeStack::spectral(const PhaseSpaceField& f, int max_order) {
  std::set<int> orders;
  for (int k = 0; k <= max_order; ++k) orders.insert(k);
  return spectral(f, orders);
}

DerivativeStack DerivativeStack::analytic(const Polynomial2& poly, const PhaseSpaceGrid& grid,
                                          int max_order) {
  grid.validate();
  DerivativeStack out(grid);
  for (int order = 0; order <= max_order; ++order) {
    for (int a = order; a >= 0; --a) {
      const int b = order - a;
      const Polynomial2 d = poly.derivative(a, b);
      if (d.is_zero()) {
        out.zeros_.insert({a, b});
      } else {
        out.data_[{a, b}] = PhaseSpaceField::from_polynomial(grid, d).values();
      }
    }
  }
  return out;
}

bool DerivativeStack::has(int q_order, int p_order) const {
  return data_.count({q_order, p_order}) || zeros_.count({q_order, p_order});
}

bool DerivativeStack::is_zero(int q_order, int p_order) const {
  return zeros_.count({q_order, p_order}) > 0;
}

const Eigen::ArrayXcd& DerivativeStack::get(int q_order, int p_order) const {
  const auto it = data_.find({q_order, p_order});
  if (it != data_.end()) return it->second;
  if (is_zero(q_order, p_order)) {
    // Materialise lazily; zero derivatives are rare in lookups.
    static thread_local Eigen::ArrayXcd zero;
    zero = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(grid_.size()));
    return zero;
  }
  fail("precondition", "derivative (" + std::to_string(q_order) + "," + std::to_string(p_order) +
                           ") was not computed");
}

void DerivativeStack::multiply(const Eigen::ArrayXd& window) {
  require(window.size() == static_cast<Eigen::Index>(grid_.size()), "grid_mismatch",
          "window size does not match the grid");
  for (auto& [key, d] : data_) d *= window.cast<cplx>();
}

void accumulate_j_power(const DerivativeStack& a, const DerivativeStack& b, int k, cplx c,
                        Eigen::ArrayXcd& out) {
  require(k >= 0 && k <= 5, "precondition", "J power must lie in 0..5");
  require_same_grid(a.grid(), b.grid());
  for (int j = 0; j <= k; ++j) {
    // left factor d_q^{k-j} d_p^j A, right factor d_q^j d_p^{k-j} B
    if (a.is_zero(k - j, j) || b.is_zero(j, k - j)) continue;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    out += (c * (sign * binomial(k, j))) * a.get(k - j, j) * b.get(j, k - j);
  }
}

PhaseSpaceField j_power_bilinear(const DerivativeStack& a, const DerivativeStack& b, int k) {
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(a.grid().size()));
  accumulate_j_power(a, b, k, 1.0, out);
  return PhaseSpaceField(a.grid(), std::move(out));
}

PhaseSpaceField j_power_bilinear(const PhaseSpaceField& a, const PhaseSpaceField& b, int k) {
  require_same_grid(a.grid(), b.grid());
  require(k >= 0 && k <= 5, "precondition", "J power must lie in 0..5");
  return j_power_bilinear(DerivativeStack::spectral(a, std::set<int>{k}),
                          DerivativeStack::spectral(b, std::set<int>{k}), k);
}

cplx integrate(const PhaseSpaceField& f) {
  return f.values().sum() * (f.grid().dq() * f.grid().dp());
}

cplx moment(const PhaseSpaceField& f, const PhaseSpaceField& g) {
  require_same_grid(f.grid(), g.grid());
  return (f.values() * g.values()).sum() * (f.grid().dq() * f.grid().dp());
}

double negativity_volume(const PhaseSpaceField& f) {
  require(f.max_abs_imag() <= 1e-9, "complex_field", "negativity needs a real field");
  const auto& g = f.grid();
  return -f.values().real().min(0.0).sum() * g.dq() * g.dp();
}

std::vector<std::uint8_t> negativity_mask(const PhaseSpaceField& f) {
  require(f.max_abs_imag() <= 1e-9, "complex_field", "negativity needs a real field");
  std::vector<std::uint8_t> mask(f.grid().size());
  for (std::size_t j = 0; j < mask.size(); ++j) {
    mask[j] = f.values()(static_cast<Eigen::Index>(j)).real() < -1e-9 ? 1 : 0;
  }
  return mask;
}

PhaseSpaceField hamiltonian_field(const HamiltonianSpec& spec, const PhaseSpaceGrid& grid) {
  return PhaseSpaceField::from_polynomial(grid, hamiltonian_symbol(spec, grid.params));
}

Eigen::ArrayXd radial_taper(const PhaseSpaceGrid& grid, double inner, double outer) {
  require(outer > inner && inner >= 0, "precondition", "taper needs 0 <= inner < outer");
  const double mw = grid.params.mass * grid.params.omega;
  auto bump = [](double x) { return x <= 0 ? 0.0 : std::exp(-1.0 / x); };
  Eigen::ArrayXd w(static_cast<Eigen::Index>(grid.size()));
  for (int i = 0; i < grid.n_q; ++i) {
    for (int k = 0; k < grid.n_p; ++k) {
      const double q = grid.q(i), p = grid.p(k);
      const double r = std::sqrt(mw * q * q + p * p / mw);
      const double x = (r - inner) / (outer - inner);
      double v;
      if (x <= 0) {
        v = 1.0;
      } else if (x >= 1) {
        v = 0.0;
      } else {
        v = bump(1 - x) / (bump(1 - x) + bump(x));
      }
      w(static_cast<Eigen::Index>(grid.index(i, k))) = v;
    }
  }
  return w;
}

PhaseSpaceField resample_spectral(const PhaseSpaceField& f, int n_q, int n_p) {
  const auto& src = f.grid();
  PhaseSpaceGrid dst = src;
  dst.n_q = n_q;
  dst.n_p = n_p;
  dst.validate();
  if (dst == src) return f;

  Eigen::ArrayXcd hat = f.values();
  FftPlan::grid(src.n_q, src.n_p).forward(hat.data());
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(dst.size()));
  // Signed mode index of slot j on an n-point axis; Nyquist slots are dropped.
  auto mode = [](int j, int n) { return j < n / 2 ? j : j - n; };
  auto slot = [](int m, int n) { return m >= 0 ? m : m + n; };
  const int kq_lim = std::min(src.n_q, n_q) / 2;
  const int kp_lim = std::min(src.n_p, n_p) / 2;
  for (int i = 0; i < src.n_q; ++i) {
    const int mi = mode(i, src.n_q);
    if (i == src.n_q / 2 || std::abs(mi) >= kq_lim) continue;
    for (int k = 0; k < src.n_p; ++k) {
      const int mk = mode(k, src.n_p);
      if (k == src.n_p / 2 || std::abs(mk) >= kp_lim) continue;
      out(static_cast<Eigen::Index>(dst.index(slot(mi, n_q), slot(mk, n_p)))) =
          hat(static_cast<Eigen::Index>(src.index(i, k)));
    }
  }
  FftPlan::grid(n_q, n_p).backward(out.data());
  out /= static_cast<double>(src.size());
  // Grid origin is shared, so no phase correction is needed: both grids
  // start at (q_min, p_min) and cover the same period.
  return PhaseSpaceField(dst, std::move(out));
}

}  // namespace semiquant
