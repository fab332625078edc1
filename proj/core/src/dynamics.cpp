#include "semiquant/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <numbers>
#include <sstream>
#include <type_traits>

namespace semiquant {

namespace {

template <class V>
using Rhs = std::function<void(const V&, V&)>;

template <class V>
double vec_norm(const V& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), v.size()).norm();
}

// Power iteration on a linear RHS. Skew-like operators have +-i lambda pairs,
// so the iterate need not converge; the largest growth ratio seen is kept.
template <class V>
double estimate_radius(const Rhs<V>& rhs, V v) {
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = cplx(normal(rng), normal(rng));
  if constexpr (std::is_same_v<V, CMatrix>) v = (0.5 * (v + v.adjoint())).eval();
  v /= vec_norm(v);
  V w = v;
  double radius = 0.0;
  for (int it = 0; it < 60; ++it) {
    rhs(v, w);
    const double r = vec_norm(w);
    if (r == 0.0 || !std::isfinite(r)) break;
    if (it >= 10) radius = std::max(radius, r);
    v = w / r;
  }
  return radius;
}

template <class V>
void rk4_step(V& y, double h, const Rhs<V>& rhs, V& k1, V& k2, V& k3, V& k4, V& tmp) {
  rhs(y, k1);
  tmp = y + (0.5 * h) * k1;
  rhs(tmp, k2);
  tmp = y + (0.5 * h) * k2;
  rhs(tmp, k3);
  tmp = y + h * k3;
  rhs(tmp, k4);
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Steps between consecutive snapshot times in equal pieces no longer than dt / substeps.
template <class V>
void drive(V& y, const Rhs<V>& rhs, const EvolutionConfig& cfg, EngineReport& report,
           const std::function<void(double, const V&)>& monitor,
           const std::function<void(double, const V&)>& emit) {
  if (cfg.auto_substep) {
    report.spectral_radius = estimate_radius<V>(rhs, y);
    report.substeps = stable_substeps(report.spectral_radius, cfg.dt);
  }
  const double h = cfg.dt / report.substeps;
  V k1 = y, k2 = y, k3 = y, k4 = y, tmp = y;
  double t = 0.0;
  for (double ts : cfg.schedule()) {
    if (ts > t) {
      const auto n = static_cast<long long>(std::ceil((ts - t) / h - 1e-9));
      const double step = (ts - t) / static_cast<double>(n);
      for (long long s = 0; s < n; ++s) {
        rk4_step(y, step, rhs, k1, k2, k3, k4, tmp);
        ++report.steps;
        monitor(t + (s + 1) * step, y);
      }
      t = ts;
    }
    emit(ts, y);
  }
}

void note(EngineReport& r, const std::string& w) {
  if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) r.warnings.push_back(w);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::set<int> odd_orders(int order) {
  std::set<int> s;
  for (int k = 1; k <= order + 1; k += 2) s.insert(k);
  return s;
}

FieldTrajectory run_field_engine(const PhaseSpaceField& start, const DerivativeStack& h,
                                 const EvolutionConfig& cfg) {
  cfg.validate();
  require_same_grid(start.grid(), h.grid());
  const PhaseSpaceGrid grid = start.grid();
  const double ratio0 = start.boundary_ratio();
  require(ratio0 <= kBoundaryErrorRatio, "boundary",
          "initial field does not decay at the boundary (ratio " + fmt(ratio0) + ")");
  const int order = cfg.mode == Mode::classical ? 0 : cfg.order;
  const std::set<int> orders = odd_orders(order);
  for (int k : orders) {
    for (int a = 0; a <= k; ++a) {
      require(h.has(a, k - a), "precondition", "Hamiltonian stack lacks order " + std::to_string(k));
    }
  }

  Rhs<Eigen::ArrayXcd> rhs = [&](const Eigen::ArrayXcd& y, Eigen::ArrayXcd& dy) {
    const auto ws = DerivativeStack::spectral(PhaseSpaceField(grid, y), orders, false);
    dy.setZero(y.size());
    accumulate_star_bracket(h, ws, order, 1.0, dy);
  };

  FieldTrajectory out;
  EngineReport& rep = out.report;
  rep.max_boundary_ratio = ratio0;
  if (ratio0 > kBoundaryWarnRatio) note(rep, "initial boundary ratio " + fmt(ratio0));

  Eigen::ArrayXcd y = start.values();
  auto monitor = [&](double t, const Eigen::ArrayXcd& v) {
    const PhaseSpaceField f(grid, v);
    const double ratio = f.boundary_ratio();
    rep.max_boundary_ratio = std::max(rep.max_boundary_ratio, ratio);
    require(ratio <= kBoundaryErrorRatio, "boundary",
            "field reached the boundary at t = " + fmt(t) + " (ratio " + fmt(ratio) + ")");
    if (ratio > kBoundaryWarnRatio) note(rep, "boundary ratio above 1e-8");
  };
  auto emit = [&](double t, const Eigen::ArrayXcd& v) {
    out.times.push_back(t);
    out.states.emplace_back(grid, v);
  };
  drive<Eigen::ArrayXcd>(y, rhs, cfg, rep, monitor, emit);

  const double step = cfg.dt / rep.substeps;
  const double grad = std::max(h.get(1, 0).abs().maxCoeff(), h.get(0, 1).abs().maxCoeff());
  const double cfl = step * grad / std::min(grid.dq(), grid.dp());
  if (cfl > 0.5) note(rep, "CFL number " + fmt(cfl) + " exceeds 0.5");
  return out;
}

OperatorTrajectory run_operator_engine(const FockOperator& start, const Rhs<CMatrix>& rhs,
                                       const EvolutionConfig& cfg, bool watch_leak) {
  OperatorTrajectory out;
  EngineReport& rep = out.report;
  CMatrix y = start.matrix();
  const OscillatorParams params = start.params();
  rep.max_leak = edge_weight(y);
  auto monitor = [&](double t, const CMatrix& v) {
    if (!watch_leak) return;
    const double leak = edge_weight(v);
    rep.max_leak = std::max(rep.max_leak, leak);
    require(leak <= cfg.leak_limit, "fock_leak",
            "Fock edge weight " + fmt(leak) + " exceeds " + fmt(cfg.leak_limit) + " at t = " +
                fmt(t) + "; increase the Fock dimension");
  };
  auto emit = [&](double t, const CMatrix& v) {
    out.times.push_back(t);
    out.states.emplace_back(params, v);
  };
  drive<CMatrix>(y, rhs, cfg, rep, monitor, emit);
  return out;
}

struct Term {
  const CMatrix* op;  // derivative of H
  int q_order;        // derivative of G applied on the right
  int p_order;
  double weight;
};

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// D_q^a D_p^b G, built from cached lower derivatives.
const CMatrix& derivative_of(const OperatorCalculus& calc, std::map<std::pair<int, int>, CMatrix>& cache,
                             int a, int b) {
  const auto key = std::make_pair(a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  CMatrix d = b > 0 ? calc.d_p(derivative_of(calc, cache, a, b - 1))
                    : calc.d_q(derivative_of(calc, cache, a - 1, b));
  return cache.emplace(key, std::move(d)).first->second;
}

void require_hermitian(const CMatrix& h) {
  const double drift = (h - h.adjoint()).cwiseAbs().maxCoeff();
  require(drift < 1e-9, "hermiticity", "Hamiltonian operator is not Hermitian (drift " + fmt(drift) + ")");
}

// Catmull-Rom weights for offsets -1, 0, 1, 2 at fractional position s.
void cubic_weights(double s, double w[4]) {
  const double s2 = s * s, s3 = s2 * s;
  w[0] = 0.5 * (-s3 + 2 * s2 - s);
  w[1] = 0.5 * (3 * s3 - 5 * s2 + 2);
  w[2] = 0.5 * (-3 * s3 + 4 * s2 + s);
  w[3] = 0.5 * (s3 - s2);
}

double bicubic(const PhaseSpaceField& f, double q, double p) {
  const auto& g = f.grid();
  const double u = (q - g.q_min) / g.dq();
  const double v = (p - g.p_min) / g.dp();
  const double fu = std::floor(u), fv = std::floor(v);
  double wu[4], wv[4];
  cubic_weights(u - fu, wu);
  cubic_weights(v - fv, wv);
  auto wrap = [](long long i, int n) { return static_cast<int>(((i % n) + n) % n); };
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int i = wrap(static_cast<long long>(fu) - 1 + a, g.n_q);
    for (int b = 0; b < 4; ++b) {
      const int k = wrap(static_cast<long long>(fv) - 1 + b, g.n_p);
      sum += wu[a] * wv[b] * f(i, k).real();
    }
  }
  return sum;
}

// Pre-image of (q, p) under the flow of f(H0) over time t.
std::pair<double, double> flow_back(const PolyOscillator& spec, const OscillatorParams& par, double q,
                                    double p, double t) {
  const double s = std::sqrt(par.mass * par.omega);
  const double x = s * q, y = p / s;
  const double h0 = 0.5 * par.omega * (x * x + y * y);
  const double theta = poly_oscillator_frequency(spec, par, h0) * t;
  const double c = std::cos(theta), sn = std::sin(theta);
  return {(x * c - y * sn) / s, (x * sn + y * c) * s};
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::classical: return "classical";
    case Mode::semiclassical: return "semiclassical";
    case Mode::quantum: return "quantum";
    case Mode::semiquantum: return "semiquantum";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::classical, Mode::semiclassical, Mode::quantum, Mode::semiquantum}) {
    if (to_string(m) == name) return m;
  }
  fail("config", "unknown evolution mode '" + name + "'");
}

std::string to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::automatic: return "auto";
    case Integrator::rk4: return "rk4";
    case Integrator::exponential: return "exponential";
  }
  return "unknown";
}

Integrator parse_integrator(const std::string& name) {
  for (Integrator i : {Integrator::automatic, Integrator::rk4, Integrator::exponential}) {
    if (to_string(i) == name) return i;
  }
  fail("config", "unknown integrator '" + name + "'");
}

void EvolutionConfig::validate() const {
  require(dt > 0 && std::isfinite(dt), "precondition", "dt must be positive");
  require(t_final >= 0 && std::isfinite(t_final), "precondition", "t_final must be nonnegative");
  require(order == 0 || order == 2 || order == 4, "unsupported", "truncation order must be 0, 2 or 4");
  require((mode == Mode::semiclassical || mode == Mode::semiquantum) || order == 0, "precondition",
          "truncation order applies only to semiclassical and semiquantum modes");
  require(leak_limit > 0, "precondition", "leak limit must be positive");
  for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
    const double t = snapshot_times[k];
    require(t >= 0 && t <= t_final * (1 + 1e-12), "precondition",
            "snapshot time " + fmt(t) + " lies outside [0, t_final]");
    require(k == 0 || t > snapshot_times[k - 1], "precondition",
            "snapshot times must be strictly increasing");
  }
}

std::vector<double> EvolutionConfig::schedule() const {
  if (snapshot_times.empty()) return t_final > 0 ? std::vector<double>{0.0, t_final} : std::vector<double>{0.0};
  return snapshot_times;
}

int stable_substeps(double spectral_radius, double dt) {
  // RK4 covers |z| <= 2.8 on the imaginary axis; keep a margin.
  constexpr double kReach = 2.2;
  const double need = spectral_radius * dt / kReach;
  if (!(need > 1.0)) return 1;
  require(need < 1e8, "numerical", "RHS too stiff for explicit RK4 (spectral radius " +
                                       fmt(spectral_radius) + ")");
  return static_cast<int>(std::ceil(need));
}

PhaseSpaceField characteristics_density(const std::function<double(double, double)>& rho0,
                                        const PolyOscillator& spec, const PhaseSpaceGrid& grid,
                                        double t) {
  validate(HamiltonianSpec{spec});
  return PhaseSpaceField::sample(grid, [&](double q, double p) {
    const auto [q0, p0] = flow_back(spec, grid.params, q, p, t);
    return cplx(rho0(q0, p0), 0.0);
  });
}

PhaseSpaceField classical_characteristics_gaussian(double q0, double p0, const PolyOscillator& spec,
                                                   const PhaseSpaceGrid& grid, double t) {
  gaussian_density(q0, p0, grid);  // coverage check only
  const auto& par = grid.params;
  const double mw = par.mass * par.omega;
  const double norm = 1.0 / (std::numbers::pi * par.hbar);
  auto rho0 = [&](double q, double p) {
    const double dq = q - q0, dp = p - p0;
    return norm * std::exp(-mw * dq * dq / par.hbar - dp * dp / (mw * par.hbar));
  };
  return characteristics_density(rho0, spec, grid, t);
}

PhaseSpaceField evolve_classical_characteristics(const PhaseSpaceField& rho0,
                                                 const PolyOscillator& spec, double t,
                                                 double* interpolation_error) {
  require(rho0.max_abs_imag() <= 1e-9, "complex_field", "density must be real");
  const auto& g = rho0.grid();
  if (interpolation_error) {
    const PhaseSpaceField fine = resample_spectral(rho0, 2 * g.n_q, 2 * g.n_p);
    double err = 0.0;
    for (int i = 1; i < fine.grid().n_q; i += 2) {
      for (int k = 1; k < fine.grid().n_p; k += 2) {
        const double q = fine.grid().q(i), p = fine.grid().p(k);
        err = std::max(err, std::abs(bicubic(rho0, q, p) - fine(i, k).real()));
      }
    }
    *interpolation_error = err;
  }
  return characteristics_density([&](double q, double p) { return bicubic(rho0, q, p); }, spec, g, t);
}

DerivativeStack hamiltonian_stack(const Polynomial2& h, const PhaseSpaceGrid& grid, int max_order,
                                  double taper_inner, double taper_outer) {
  DerivativeStack s = DerivativeStack::analytic(h, grid, max_order);
  if (taper_outer > 0) s.multiply(radial_taper(grid, taper_inner, taper_outer));
  return s;
}

FieldTrajectory evolve_classical_grid(const PhaseSpaceField& rho, const DerivativeStack& h,
                                      const EvolutionConfig& cfg) {
  EvolutionConfig c = cfg;
  c.mode = Mode::classical;
  c.order = 0;
  return run_field_engine(rho, h, c);
}

FieldTrajectory evolve_classical_grid(const PhaseSpaceField& rho, const PhaseSpaceField& h,
                                      const EvolutionConfig& cfg) {
  return evolve_classical_grid(rho, DerivativeStack::spectral(h, std::set<int>{1}), cfg);
}

FieldTrajectory evolve_semiclassical(const PhaseSpaceField& w, const DerivativeStack& h,
                                     const EvolutionConfig& cfg) {
  EvolutionConfig c = cfg;
  c.mode = Mode::semiclassical;
  return run_field_engine(w, h, c);
}

FieldTrajectory evolve_semiclassical(const PhaseSpaceField& w, const PhaseSpaceField& h,
                                     const EvolutionConfig& cfg) {
  return evolve_semiclassical(w, DerivativeStack::spectral(h, odd_orders(cfg.order)), cfg);
}

FockOperator evolve_quantum_exact(const FockOperator& rho0, const PolyOscillator& spec, double t) {
  const auto& par = rho0.params();
  const Eigen::VectorXd e = poly_oscillator_levels(spec, par, rho0.dim());
  const int n = rho0.dim();
  CMatrix out = rho0.matrix();
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) out(r, c) *= std::exp(cplx(0.0, -(e(r) - e(c)) * t / par.hbar));
  }
  return FockOperator(par, std::move(out));
}

OperatorTrajectory evolve_quantum_generic(const FockOperator& rho, const FockOperator& h,
                                          const EvolutionConfig& cfg) {
  cfg.validate();
  require_compatible(rho, h);
  require_hermitian(h.matrix());
  const CMatrix hm = h.matrix();
  const cplx inv = 1.0 / cplx(0.0, rho.params().hbar);
  Rhs<CMatrix> rhs = [&](const CMatrix& y, CMatrix& dy) {
    dy.noalias() = hm * y;
    dy.noalias() -= y * hm;
    dy *= inv;
  };
  return run_operator_engine(rho, rhs, cfg, false);
}

OperatorTrajectory evolve_semiquantum(const FockOperator& g, const OperatorDerivatives& h,
                                      const EvolutionConfig& cfg) {
  cfg.validate();
  require(h.dim() >= g.dim() && g.params() == h.params(), "dimension_mismatch",
          "Hamiltonian derivatives must share parameters and cover the state dimension");
  require(!h.is_zero(0, 0), "precondition", "Hamiltonian operator is zero");
  require_hermitian(h.get(0, 0));
  require_hermitian(g.matrix());
  const int order = cfg.mode == Mode::semiquantum ? cfg.order : 0;
  const int n = g.dim(), m = h.dim();
  const OperatorCalculus calc(g.params(), m);
  const double hbar = g.params().hbar;

  // Terms are evaluated on the state embedded in the larger basis of h and the
  // result cut back to n x n. Every operand is Hermitian, so [A, B] = AB - (AB)^dagger.
  std::vector<Term> terms;
  for (int k = 0; 2 * k <= order; ++k) {
    const int mk = 2 * k;
    const double ck = SeriesCoefficients::inverse(k) * std::pow(0.5 * hbar, mk);
    for (int j = 0; j <= mk; ++j) {
      if (h.is_zero(mk - j, j)) continue;
      const double w = ck * binomial(mk, j) * ((j % 2 == 0) ? 1.0 : -1.0);
      terms.push_back({&h.get(mk - j, j), j, mk - j, w / hbar});
    }
  }
  CMatrix big = CMatrix::Zero(m, m), prod(m, m), acc(m, m);
  std::map<std::pair<int, int>, CMatrix> dg;
  Rhs<CMatrix> rhs = [&](const CMatrix& y, CMatrix& dy) {
    big.topLeftCorner(n, n) = y;
    dg.clear();
    dg[{0, 0}] = big;
    acc.setZero();
    for (const Term& t : terms) {
      const CMatrix& b = derivative_of(calc, dg, t.q_order, t.p_order);
      prod.noalias() = *t.op * b;
      // (1/i hbar)(P - P^dagger) = -i (P - P^dagger) / hbar
      acc += cplx(0.0, -t.weight) * (prod - prod.adjoint());
    }
    dy = acc.topLeftCorner(n, n);
  };
  return run_operator_engine(g, rhs, cfg, true);
}

OperatorTrajectory evolve_semiquantum(const FockOperator& g, const FockOperator& h,
                                      const EvolutionConfig& cfg) {
  require_compatible(g, h);
  return evolve_semiquantum(g, OperatorDerivatives::from_operator(h, cfg.order), cfg);
}

int semiquantum_padding(const Polynomial2& h, int order) {
  return std::max(h.degree(), 0) + order + 2;
}

OperatorTrajectory evolve_semiquantum_potential(const FockOperator& g, const KineticPotential& spec,
                                                const EvolutionConfig& cfg) {
  cfg.validate();
  validate(HamiltonianSpec{spec});
  require(cfg.order == 2, "unsupported", "the potential-form engine is order 2 only");
  require_hermitian(g.matrix());
  const auto& par = g.params();
  const Polynomial2 symbol = hamiltonian_symbol(HamiltonianSpec{spec}, par);
  const int n = g.dim();
  const int m = n + semiquantum_padding(symbol, 2);
  const CMatrix h = weyl_quantize(symbol, par, m).matrix();
  const CMatrix vpp = weyl_quantize(potential_symbol(spec).derivative(2, 0), par, m).matrix();
  const OperatorCalculus calc(par, m);
  CMatrix big = CMatrix::Zero(m, m), prod(m, m), acc(m, m);
  Rhs<CMatrix> rhs = [&](const CMatrix& y, CMatrix& dy) {
    big.topLeftCorner(n, n) = y;
    // [H, G] / i hbar
    prod.noalias() = h * big;
    acc = cplx(0.0, -1.0 / par.hbar) * (prod - prod.adjoint());
    // -(i hbar / 24) [V'', G_pp]
    const CMatrix gpp = calc.derivative(big, 0, 2);
    prod.noalias() = vpp * gpp;
    acc += cplx(0.0, -par.hbar / 24.0) * (prod - prod.adjoint());
    dy = acc.topLeftCorner(n, n);
  };
  return run_operator_engine(g, rhs, cfg, true);
}

FockGenerator semiquantum_generator(const Polynomial2& h, const OscillatorParams& params, int dim,
                                    int order) {
  SeriesMode::truncated(order).validate();
  const int m = dim + semiquantum_padding(h, order);
  auto hd = std::make_shared<OperatorDerivatives>(OperatorDerivatives::from_symbol(h, params, m, order));
  auto calc = std::make_shared<OperatorCalculus>(params, m);
  return [hd, calc, dim, m, order](const CMatrix& x) {
    CMatrix big = CMatrix::Zero(m, m);
    big.topLeftCorner(dim, dim) = x;
    return CMatrix(odot_bracket(*hd, big, *calc, order).topLeftCorner(dim, dim));
  };
}

FockGenerator semiclassical_generator(const Polynomial2& h, const OscillatorParams& params, int dim,
                                      int order) {
  SeriesMode::truncated(order).validate();
  const int m = dim + std::max(h.degree(), 0) + order + 3;
  auto calc = std::make_shared<OperatorCalculus>(params, m);
  struct Piece {
    Polynomial2 coeff;  // d_q^(n-j) d_p^j H
    int q_order;        // on W: d_q^j d_p^(n-j)
    int p_order;
    double weight;
  };
  auto pieces = std::make_shared<std::vector<Piece>>();
  for (int k = 0; 2 * k <= order; ++k) {
    const int n = 2 * k + 1;
    const double sk = SeriesCoefficients::forward(k) * std::pow(params.hbar, 2 * k);
    for (int j = 0; j <= n; ++j) {
      Polynomial2 c = h.derivative(n - j, j);
      if (c.is_zero()) continue;
      pieces->push_back({std::move(c), j, n - j, sk * binomial(n, j) * ((j % 2 == 0) ? 1.0 : -1.0)});
    }
  }
  return [pieces, calc, dim, m](const CMatrix& x) {
    CMatrix big = CMatrix::Zero(m, m);
    big.topLeftCorner(dim, dim) = x;
    std::map<std::pair<int, int>, CMatrix> cache;
    cache[{0, 0}] = big;
    CMatrix acc = CMatrix::Zero(m, m);
    for (const Piece& pc : *pieces) {
      const CMatrix& d = derivative_of(*calc, cache, pc.q_order, pc.p_order);
      // coefficient polynomial applied through the commuting maps m_q, m_p
      for (const auto& [key, c] : pc.coeff.terms()) {
        CMatrix y = d;
        for (int a = 0; a < key.first; ++a) y = calc->m_q(y);
        for (int b = 0; b < key.second; ++b) y = calc->m_p(y);
        acc += (pc.weight * c) * y;
      }
    }
    return CMatrix(acc.topLeftCorner(dim, dim));
  };
}

BandPropagator::BandPropagator(const FockGenerator& gen, const OscillatorParams& params, int dim)
    : params_(params), dim_(dim) {
  params.validate();
  require(dim >= 2, "precondition", "Fock dimension must be at least 2");
  const int n = dim;
  // blocks[l + n - 1] holds band l = row - col; element (r, r - l) has index r - max(l, 0).
  std::vector<CMatrix> blocks(2 * n - 1);
  for (int l = -(n - 1); l <= n - 1; ++l) {
    const int len = n - std::abs(l);
    blocks[l + n - 1] = CMatrix::Zero(len, len);
  }
  for (int r = 0; r < n; ++r) {
    CMatrix probe = CMatrix::Zero(n, n);
    probe.row(r).setOnes();
    const CMatrix img = gen(probe);
    for (int c = 0; c < n; ++c) {
      const int l = r - c;
      const int lo = std::max(l, 0);
      CMatrix& blk = blocks[l + n - 1];
      for (int i = lo; i < std::min(n, n + l); ++i) blk(i - lo, r - lo) = img(i, i - l);
    }
  }

  double lmax = 0.0, defect = 0.0;
  for (const auto& b : blocks) {
    lmax = std::max(lmax, b.cwiseAbs().maxCoeff());
    defect = std::max(defect, (b + b.adjoint()).cwiseAbs().maxCoeff());
  }
  skew_defect_ = lmax > 0 ? defect / lmax : 0.0;
  const bool skew = skew_defect_ < 1e-10;

  for (int l = -(n - 1); l <= n - 1; ++l) {
    const CMatrix& blk = blocks[l + n - 1];
    Band band{l, {}, {}, {}};
    if (skew) {
      // i L is Hermitian: L = V diag(-i lambda) V^dagger
      const CMatrix herm = cplx(0.0, 0.5) * (blk - blk.adjoint());
      Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
      require(es.info() == Eigen::Success, "numerical", "band eigendecomposition failed");
      band.vectors = es.eigenvectors();
      band.rates = cplx(0.0, -1.0) * es.eigenvalues().cast<cplx>();
      band.inverse = band.vectors.adjoint();
    } else {
      Eigen::ComplexEigenSolver<CMatrix> es(blk);
      require(es.info() == Eigen::Success, "numerical", "band eigendecomposition failed");
      band.vectors = es.eigenvectors();
      band.rates = es.eigenvalues();
      band.inverse = band.vectors.inverse();
    }
    radius_ = std::max(radius_, band.rates.cwiseAbs().maxCoeff());
    bands_.push_back(std::move(band));
  }

  // Band check with a random probe.
  std::mt19937_64 rng(0xba9d);
  std::normal_distribution<double> normal;
  CMatrix probe(n, n);
  for (Eigen::Index i = 0; i < probe.size(); ++i) probe.data()[i] = cplx(normal(rng), normal(rng));
  const CMatrix direct = gen(probe);
  CMatrix assembled = CMatrix::Zero(n, n);
  for (int l = -(n - 1); l <= n - 1; ++l) {
    const int lo = std::max(l, 0), len = n - std::abs(l);
    Eigen::VectorXcd v(len);
    for (int i = 0; i < len; ++i) v(i) = probe(i + lo, i + lo - l);
    const Eigen::VectorXcd w = blocks[l + n - 1] * v;
    for (int i = 0; i < len; ++i) assembled(i + lo, i + lo - l) = w(i);
  }
  const double scale = std::max(direct.cwiseAbs().maxCoeff(), 1e-300);
  band_residual_ = (direct - assembled).cwiseAbs().maxCoeff() / scale;
  require(band_residual_ < 1e-9, "unsupported",
          "generator does not preserve Fock bands (residual " + fmt(band_residual_) +
              "); the Hamiltonian must be a function of H0");
}

FockOperator BandPropagator::apply(const FockOperator& x, double t) const {
  require(x.dim() == dim_ && x.params() == params_, "dimension_mismatch",
          "state does not match the propagator");
  const int n = dim_;
  CMatrix out = CMatrix::Zero(n, n);
  for (const Band& b : bands_) {
    const int l = b.offset, lo = std::max(l, 0), len = n - std::abs(l);
    Eigen::VectorXcd v(len);
    for (int i = 0; i < len; ++i) v(i) = x(i + lo, i + lo - l);
    Eigen::VectorXcd c = b.inverse * v;
    for (int i = 0; i < len; ++i) c(i) *= std::exp(b.rates(i) * t);
    const Eigen::VectorXcd w = b.vectors * c;
    for (int i = 0; i < len; ++i) out(i + lo, i + lo - l) = w(i);
  }
  return FockOperator(params_, std::move(out));
}

OperatorTrajectory propagate_bands(const FockOperator& x0, const BandPropagator& prop,
                                   const EvolutionConfig& cfg, bool watch_leak) {
  cfg.validate();
  OperatorTrajectory out;
  EngineReport& rep = out.report;
  rep.spectral_radius = prop.spectral_radius();
  rep.substeps = 0;
  for (double t : cfg.schedule()) {
    FockOperator x = prop.apply(x0, t);
    const double leak = edge_weight(x);
    rep.max_leak = std::max(rep.max_leak, leak);
    if (watch_leak) {
      require(leak <= cfg.leak_limit, "fock_leak",
              "Fock edge weight " + fmt(leak) + " exceeds " + fmt(cfg.leak_limit) + " at t = " +
                  fmt(t) + "; increase the Fock dimension");
    }
    out.times.push_back(t);
    out.states.push_back(std::move(x));
  }
  if (prop.skew_defect() >= 1e-10) note(rep, "generator is not skew-Hermitian (defect " + fmt(prop.skew_defect()) + ")");
  return out;
}

}  // namespace semiquant
