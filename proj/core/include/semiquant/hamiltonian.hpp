#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "semiquant/fock.hpp"
#include "semiquant/polynomial.hpp"

namespace semiquant {

/// H = E sum_k b_k (H0 / E)^k with H0 = p^2/2m + m w^2 q^2/2. The scale E and
/// the oscillator constants come from OscillatorParams. Supports k <= 3.
struct PolyOscillator {
  std::vector<double> coeffs;
};

/// H = p^2 / 2m + V(q), V(q) = sum_i potential[i] q^i, deg V <= 8.
struct KineticPotential {
  double mass = 1.0;
  std::vector<double> potential;
};

using HamiltonianSpec = std::variant<PolyOscillator, KineticPotential>;

void validate(const HamiltonianSpec& spec);
std::string describe(const HamiltonianSpec& spec);

/// H0 = p^2/2m + m w^2 q^2 / 2
Polynomial2 oscillator_energy(const OscillatorParams& params);

/// Closed-form phase-space symbol H(q, p) of a spec.
Polynomial2 hamiltonian_symbol(const HamiltonianSpec& spec, const OscillatorParams& params);

/// V(q) as a polynomial in q alone.
Polynomial2 potential_symbol(const KineticPotential& spec);

/// Eigenvalues e_n, n < dim, of the Weyl quantisation of a polynomial-oscillator
/// Hamiltonian. W^-1(H0^k) is diagonal with entries (hbar w)^k P_k(n):
///   P_0 = 1, P_1 = n + 1/2, P_2 = n^2 + n + 1/2, P_3 = n^3 + 3n^2/2 + 2n + 3/4.
Eigen::VectorXd poly_oscillator_levels(const PolyOscillator& spec, const OscillatorParams& params,
                                       int dim);

/// Instantaneous angular frequency dH/dH0 of a polynomial-oscillator flow at
/// oscillator energy h0, multiplied by w.
double poly_oscillator_frequency(const PolyOscillator& spec, const OscillatorParams& params,
                                 double h0);

}  // namespace semiquant
