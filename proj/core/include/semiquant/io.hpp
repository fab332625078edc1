#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "semiquant/fock.hpp"
#include "semiquant/lab.hpp"
#include "semiquant/phasespace.hpp"

namespace semiquant {

// Field dump "PSF1": 64-byte little-endian header
//   char[4] magic, uint16 n_q, uint16 n_p,
//   float64 q_min, q_max, p_min, p_max, hbar, mass, omega
// then n_q * n_p float64 values, q outer and p inner. Fields must be real.
// The energy scale is not stored; read_field takes it as an argument.
void write_field(std::ostream& out, const PhaseSpaceField& f);
void write_field(const std::string& path, const PhaseSpaceField& f);
PhaseSpaceField read_field(std::istream& in, double energy = 1.0);
PhaseSpaceField read_field(const std::string& path, double energy = 1.0);

// Operator dump "FOK1": char[4] magic, uint32 dim, float64 mass, omega, hbar,
// energy, then dim * dim (re, im) float64 pairs, row-major.
void write_operator(std::ostream& out, const FockOperator& a);
void write_operator(const std::string& path, const FockOperator& a);
FockOperator read_operator(std::istream& in);
FockOperator read_operator(const std::string& path);

/// Header plus one line per row, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec);
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec);
extern const char* const kTrajectoryColumns;

/// 8-bit image: nonnegative samples scale linearly from 0 (black) to 128 at
/// the field maximum, samples below -1e-9 are 255 (white). Row 0 is p_max,
/// column 0 is q_min.
struct Heatmap {
  int width = 0;   // n_q
  int height = 0;  // n_p
  std::vector<std::uint8_t> pixels;
  double scale_max = 0.0;  // field value mapped to gray level 128
  double field_min = 0.0;
  std::size_t white_pixels = 0;
};

Heatmap render_heatmap(const PhaseSpaceField& f);
void write_pgm(const std::string& path, const Heatmap& h);
/// key = value lines describing the scale and the domain.
void write_heatmap_sidecar(const std::string& path, const Heatmap& h, const PhaseSpaceGrid& grid, double t);
/// Parses a binary P5 image (maxval 255).
Heatmap read_pgm(const std::string& path);

/// Round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace semiquant
