#include "semiquant/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "semiquant/error.hpp"

namespace semiquant {

static_assert(std::endian::native == std::endian::little, "dump formats assume a little-endian host");

namespace {

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(in), "format", std::string("truncated input while reading ") + what);
  return v;
}

void check_magic(std::istream& in, const char* magic) {
  char m[4];
  in.read(m, 4);
  require(static_cast<bool>(in) && std::memcmp(m, magic, 4) == 0, "format",
          std::string("bad magic, expected ") + magic);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), "io", "cannot write " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), "io", "cannot read " + path);
  return f;
}

void expect_end(std::istream& in) {
  in.peek();
  require(in.eof(), "format", "trailing bytes after dump");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field(std::ostream& out, const PhaseSpaceField& f) {
  const PhaseSpaceGrid& g = f.grid();
  require(f.max_abs_imag() <= 1e-9 * std::max(1.0, f.max_abs()), "complex_field",
          "field dumps hold real fields only");
  require(g.n_q <= 65535 && g.n_p <= 65535, "format", "grid too large for a field dump");
  out.write("PSF1", 4);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(g.n_q));
  put<std::uint16_t>(out, static_cast<std::uint16_t>(g.n_p));
  for (double v : {g.q_min, g.q_max, g.p_min, g.p_max, g.params.hbar, g.params.mass, g.params.omega}) put(out, v);
  for (Eigen::Index j = 0; j < f.values().size(); ++j) put(out, f.values()(j).real());
  require(static_cast<bool>(out), "io", "write failed");
}

void write_field(const std::string& path, const PhaseSpaceField& f) {
  auto out = open_out(path);
  write_field(out, f);
}

PhaseSpaceField read_field(std::istream& in, double energy) {
  check_magic(in, "PSF1");
  PhaseSpaceGrid g;
  g.n_q = get<std::uint16_t>(in, "n_q");
  g.n_p = get<std::uint16_t>(in, "n_p");
  g.q_min = get<double>(in, "q_min");
  g.q_max = get<double>(in, "q_max");
  g.p_min = get<double>(in, "p_min");
  g.p_max = get<double>(in, "p_max");
  g.params.hbar = get<double>(in, "hbar");
  g.params.mass = get<double>(in, "mass");
  g.params.omega = get<double>(in, "omega");
  g.params.energy = energy;
  try {
    g.validate();
  } catch (const Error& e) {
    fail("format", std::string("invalid grid in field dump: ") + e.what());
  }
  Eigen::ArrayXcd v(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = cplx(get<double>(in, "values"), 0.0);
  expect_end(in);
  return PhaseSpaceField(g, std::move(v));
}

PhaseSpaceField read_field(const std::string& path, double energy) {
  auto in = open_in(path);
  return read_field(in, energy);
}

void write_operator(std::ostream& out, const FockOperator& a) {
  const auto& p = a.params();
  out.write("FOK1", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(a.dim()));
  for (double v : {p.mass, p.omega, p.hbar, p.energy}) put(out, v);
  for (int m = 0; m < a.dim(); ++m) {
    for (int n = 0; n < a.dim(); ++n) {
      put(out, a(m, n).real());
      put(out, a(m, n).imag());
    }
  }
  require(static_cast<bool>(out), "io", "write failed");
}

void write_operator(const std::string& path, const FockOperator& a) {
  auto out = open_out(path);
  write_operator(out, a);
}

FockOperator read_operator(std::istream& in) {
  check_magic(in, "FOK1");
  const auto dim = get<std::uint32_t>(in, "dim");
  require(dim >= 1 && dim <= 16384, "format", "implausible operator dimension " + std::to_string(dim));
  OscillatorParams p;
  p.mass = get<double>(in, "mass");
  p.omega = get<double>(in, "omega");
  p.hbar = get<double>(in, "hbar");
  p.energy = get<double>(in, "energy");
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix a(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double re = get<double>(in, "entries");
      const double im = get<double>(in, "entries");
      a(m, k) = cplx(re, im);
    }
  }
  expect_end(in);
  try {
    return FockOperator(p, std::move(a));
  } catch (const Error& e) {
    fail("format", std::string("invalid operator dump: ") + e.what());
  }
}

FockOperator read_operator(const std::string& path) {
  auto in = open_in(path);
  return read_operator(in);
}

const char* const kTrajectoryColumns =
    "t,q_mean,p_mean,alpha_re,alpha_im,eig_max_1,eig_max_2,eig_min_1,eig_min_2,trace_re,negativity,leak,"
    "herm_drift";

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec) {
  out << kTrajectoryColumns << '\n';
  for (const auto& r : rec.rows) {
    const double cols[] = {r.t,         r.q_mean,    r.p_mean,    r.alpha.real(), r.alpha.imag(),
                           r.eig_max_1, r.eig_max_2, r.eig_min_1, r.eig_min_2,    r.trace_re,
                           r.negativity, r.leak,     r.herm_drift};
    bool first = true;
    for (double c : cols) {
      if (!first) out << ',';
      first = false;
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.16e", c);
      out << buf;
    }
    out << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec) {
  auto out = open_out(path);
  write_trajectory_csv(out, rec);
  require(static_cast<bool>(out), "io", "write failed: " + path);
}

Heatmap render_heatmap(const PhaseSpaceField& f) {
  require(f.max_abs_imag() <= 1e-9 * std::max(1.0, f.max_abs()), "complex_field",
          "heatmaps need a real field");
  const PhaseSpaceGrid& g = f.grid();
  Heatmap h;
  h.width = g.n_q;
  h.height = g.n_p;
  h.pixels.assign(g.size(), 0);
  const Eigen::ArrayXd re = f.values().real();
  h.scale_max = std::max(re.maxCoeff(), 0.0);
  h.field_min = re.minCoeff();
  const auto mask = negativity_mask(f);
  for (int i = 0; i < g.n_q; ++i) {
    for (int k = 0; k < g.n_p; ++k) {
      const std::size_t src = g.index(i, k);
      std::uint8_t& px = h.pixels[static_cast<std::size_t>(g.n_p - 1 - k) * g.n_q + i];
      if (mask[src]) {
        px = 255;
        ++h.white_pixels;
      } else if (h.scale_max > 0) {
        const double v = std::max(re(static_cast<Eigen::Index>(src)), 0.0) / h.scale_max;
        px = static_cast<std::uint8_t>(std::lround(128.0 * v));
      }
    }
  }
  return h;
}

void write_pgm(const std::string& path, const Heatmap& h) {
  auto out = open_out(path);
  out << "P5\n" << h.width << ' ' << h.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(h.pixels.data()), static_cast<std::streamsize>(h.pixels.size()));
  require(static_cast<bool>(out), "io", "write failed: " + path);
}

void write_heatmap_sidecar(const std::string& path, const Heatmap& h, const PhaseSpaceGrid& g, double t) {
  auto out = open_out(path);
  out << "t = " << format_double(t) << '\n'
      << "width = " << h.width << '\n'
      << "height = " << h.height << '\n'
      << "q_range = " << format_double(g.q_min) << ' ' << format_double(g.q_max) << '\n'
      << "p_range = " << format_double(g.p_max) << ' ' << format_double(g.p_min) << '\n'
      << "black = 0\n"
      << "gray128 = " << format_double(h.scale_max) << '\n'
      << "white = below -1e-9\n"
      << "field_min = " << format_double(h.field_min) << '\n'
      << "white_pixels = " << h.white_pixels << '\n';
}

Heatmap read_pgm(const std::string& path) {
  auto in = open_in(path);
  std::string magic;
  int maxval = 0;
  Heatmap h;
  in >> magic >> h.width >> h.height >> maxval;
  require(static_cast<bool>(in) && magic == "P5" && maxval == 255 && h.width > 0 && h.height > 0, "format",
          "not an 8-bit binary graymap: " + path);
  in.get();
  h.pixels.resize(static_cast<std::size_t>(h.width) * h.height);
  in.read(reinterpret_cast<char*>(h.pixels.data()), static_cast<std::streamsize>(h.pixels.size()));
  require(static_cast<bool>(in), "format", "truncated graymap: " + path);
  for (auto px : h.pixels) h.white_pixels += px == 255;
  return h;
}

}  // namespace semiquant
