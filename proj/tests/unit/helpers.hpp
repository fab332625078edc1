#pragma once

#include <random>

#include <semiquant/fock.hpp>
#include <semiquant/phasespace.hpp>

namespace sqtest {

using namespace semiquant;

inline OscillatorParams half_hbar() { return OscillatorParams{}; }

inline PhaseSpaceGrid default_grid() {
  PhaseSpaceGrid g;
  g.params = half_hbar();
  return g;
}

// Random Hermitian operator supported on the leading `block` states.
inline FockOperator random_hermitian(const OscillatorParams& p, int dim, int block, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int i = 0; i < block; ++i) {
    for (int j = 0; j < block; ++j) a(i, j) = cplx(n(rng), n(rng));
  }
  return FockOperator(p, (0.5 * (a + a.adjoint())).eval());
}

inline double max_abs(const CMatrix& a) { return a.cwiseAbs().maxCoeff(); }

inline double block_diff(const FockOperator& a, const FockOperator& b, int block) {
  return max_abs((a.matrix() - b.matrix()).topLeftCorner(block, block));
}

}  // namespace sqtest
