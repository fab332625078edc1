#include "semiquant/hamiltonian.hpp"

#include <cmath>
#include <sstream>

namespace semiquant {

namespace {

double level_polynomial(int k, double n) {
  switch (k) {
    case 0: return 1.0;
    case 1: return n + 0.5;
    case 2: return n * n + n + 0.5;
    case 3: return n * n * n + 1.5 * n * n + 2.0 * n + 0.75;
    default: fail("unsupported", "polynomial oscillator supports powers up to 3");
  }
}

}  // namespace

void validate(const HamiltonianSpec& spec) {
  if (const auto* poly = std::get_if<PolyOscillator>(&spec)) {
    require(!poly->coeffs.empty(), "precondition", "polynomial oscillator needs coefficients");
    require(poly->coeffs.size() <= 4, "unsupported",
            "polynomial oscillator supports powers of H0 up to 3");
    for (double b : poly->coeffs) require(std::isfinite(b), "precondition", "non-finite coefficient");
  } else {
    const auto& kp = std::get<KineticPotential>(spec);
    require(kp.mass > 0 && std::isfinite(kp.mass), "precondition", "kinetic mass must be positive");
    require(kp.potential.size() <= 9, "unsupported", "potential degree must be at most 8");
    for (double v : kp.potential) require(std::isfinite(v), "precondition", "non-finite coefficient");
  }
}

std::string describe(const HamiltonianSpec& spec) {
  std::ostringstream os;
  if (const auto* poly = std::get_if<PolyOscillator>(&spec)) {
    os << "poly_oscillator(";
    for (std::size_t k = 0; k < poly->coeffs.size(); ++k) os << (k ? "," : "") << poly->coeffs[k];
    os << ")";
  } else {
    const auto& kp = std::get<KineticPotential>(spec);
    os << "kinetic_potential(m=" << kp.mass << ";V=";
    for (std::size_t k = 0; k < kp.potential.size(); ++k) os << (k ? "," : "") << kp.potential[k];
    os << ")";
  }
  return os.str();
}

Polynomial2 oscillator_energy(const OscillatorParams& params) {
  params.validate();
  return Polynomial2::monomial(0, 2, 0.5 / params.mass) +
         Polynomial2::monomial(2, 0, 0.5 * params.mass * params.omega * params.omega);
}

Polynomial2 potential_symbol(const KineticPotential& spec) {
  Polynomial2 v;
  for (std::size_t i = 0; i < spec.potential.size(); ++i) {
    v += Polynomial2::monomial(static_cast<int>(i), 0, spec.potential[i]);
  }
  return v;
}

Polynomial2 hamiltonian_symbol(const HamiltonianSpec& spec, const OscillatorParams& params) {
  validate(spec);
  if (const auto* poly = std::get_if<PolyOscillator>(&spec)) {
    const Polynomial2 reduced = oscillator_energy(params) * (1.0 / params.energy);
    Polynomial2 h;
    for (std::size_t k = 0; k < poly->coeffs.size(); ++k) {
      h += reduced.pow(static_cast<int>(k)) * (params.energy * poly->coeffs[k]);
    }
    return h;
  }
  const auto& kp = std::get<KineticPotential>(spec);
  return Polynomial2::monomial(0, 2, 0.5 / kp.mass) + potential_symbol(kp);
}

Eigen::VectorXd poly_oscillator_levels(const PolyOscillator& spec, const OscillatorParams& params,
                                       int dim) {
  validate(HamiltonianSpec{spec});
  params.validate();
  const double mu = params.mu();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  for (int n = 0; n < dim; ++n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < spec.coeffs.size(); ++k) {
      sum += spec.coeffs[k] * std::pow(mu, static_cast<double>(k)) *
             level_polynomial(static_cast<int>(k), n);
    }
    e(n) = params.energy * sum;
  }
  return e;
}

double poly_oscillator_frequency(const PolyOscillator& spec, const OscillatorParams& params,
                                 double h0) {
  // d/dH0 [E sum b_k (H0/E)^k] = sum k b_k (H0/E)^{k-1}
  double f = 0.0;
  for (std::size_t k = 1; k < spec.coeffs.size(); ++k) {
    f += static_cast<double>(k) * spec.coeffs[k] *
         std::pow(h0 / params.energy, static_cast<double>(k - 1));
  }
  return params.omega * f;
}

}  // namespace semiquant
