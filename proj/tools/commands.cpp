#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <limits>
#include <ostream>
#include <sstream>

#include "semiquant/config.hpp"
#include "semiquant/error.hpp"
#include "semiquant/io.hpp"
#include "semiquant/lab.hpp"
#include "semiquant/weyl.hpp"

namespace fs = std::filesystem;

namespace semiquant::cli {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

std::string index_name(const char* stem, std::size_t k, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02zu.%s", stem, k, ext);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), "io", "cannot write " + path.string());
  f << text;
}

void write_rows_csv(const fs::path& path, const TrajectoryRecord& rec, const std::vector<double>& times) {
  TrajectoryRecord sub;
  for (const auto& r : rec.rows) {
    for (double t : times) {
      if (std::abs(r.t - t) <= 1e-12 * std::max(1.0, t)) sub.rows.push_back(r);
    }
  }
  write_trajectory_csv(path.string(), sub);
}

void write_record(const fs::path& dir, const Scenario& s, const TrajectoryRecord& rec) {
  fs::create_directories(dir);
  write_trajectory_csv((dir / "trajectory.csv").string(), rec);
  if (!s.output.field_times.empty()) write_rows_csv(dir / "snapshots.csv", rec, s.output.field_times);
  for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
    const auto& snap = rec.snapshots[k];
    if (s.output.field_dumps) write_field((dir / index_name("field", k, "psf")).string(), snap.wigner);
    if (s.output.operator_dumps && snap.groenewold) {
      write_operator((dir / index_name("operator", k, "fok")).string(), *snap.groenewold);
    }
    if (s.output.heatmaps) {
      const Heatmap h = render_heatmap(snap.wigner);
      write_pgm((dir / index_name("heatmap", k, "pgm")).string(), h);
      write_heatmap_sidecar((dir / index_name("heatmap", k, "txt")).string(), h, s.grid, snap.t);
    }
  }
}

std::string summary_text(const Scenario& s, const std::vector<TrajectoryRecord>& recs) {
  std::ostringstream o;
  const cplx a0 = coherent_amplitude(s.initial.q0, s.initial.p0, s.params);
  o << "hamiltonian = " << describe(s.hamiltonian) << '\n'
    << "alpha_0 = " << format_double(s.initial.q0 / std::numbers::sqrt2) << ' '
    << format_double(s.initial.p0 / std::numbers::sqrt2) << "  # (q0 + i p0) / sqrt(2)\n"
    << "alpha_0_hbar_scaled = " << format_double(a0.real()) << ' ' << format_double(a0.imag())
    << "  # (q0 + i p0) / sqrt(2 hbar) in oscillator units\n";
  for (const auto& r : recs) {
    o << "\n[" << r.label << "]\n"
      << "mode = " << to_string(r.mode) << '\n'
      << "order = " << r.order << '\n'
      << "engine = " << (r.engine.empty() ? "none" : r.engine) << '\n'
      << "status = " << (r.ok() ? "ok" : "failed") << '\n';
    if (!r.ok()) o << "error = " << r.error_code << ": " << escape(r.error_message) << '\n';
    if (!r.rows.empty()) {
      double trace_dev = 0.0, max_leak = 0.0, max_drift = 0.0;
      for (const auto& row : r.rows) {
        trace_dev = std::max(trace_dev, std::abs(row.trace_re - 1.0));
        max_leak = std::max(max_leak, row.leak);
        max_drift = std::max(max_drift, row.herm_drift);
      }
      o << "max_trace_deviation = " << format_double(trace_dev) << '\n'
        << "max_leak = " << format_double(max_leak) << '\n'
        << "max_herm_drift = " << format_double(max_drift) << '\n';
    }
    for (const auto& w : r.warnings) o << "warning = " << escape(w) << '\n';
  }
  return o.str();
}

void write_comparison(const fs::path& path, const Comparison& c) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), "io", "cannot write " + path.string());
  f << 't';
  for (const auto& l : c.labels) f << ',' << l << "_re," << l << "_im";
  f << '\n';
  char buf[40];
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.16e", c.times[k]);
    f << buf;
    for (const auto& a : c.alpha) {
      std::snprintf(buf, sizeof buf, ",%.16e", a[k].real());
      f << buf;
      std::snprintf(buf, sizeof buf, ",%.16e", a[k].imag());
      f << buf;
    }
    f << '\n';
  }
  f << "\n# max |alpha_a - alpha_b| over all t, then over t >= 1\n";
  for (std::size_t a = 0; a < c.labels.size(); ++a) {
    for (std::size_t b = a + 1; b < c.labels.size(); ++b) {
      const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      f << "# " << c.labels[a] << " vs " << c.labels[b] << ": " << format_double(c.max_deviation(ia, ib)) << ' '
        << format_double(c.max_deviation_late(ia, ib)) << '\n';
    }
  }
}

}  // namespace

void report_error(std::ostream& err, const std::string& code, const std::string& where, const std::string& message) {
  err << "error code=" << code << " where=" << where << " message=\"" << escape(message) << "\"\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& log, std::ostream& err) {
  Scenario s;
  try {
    s = load_scenario(config_path);
  } catch (const Error& e) {
    report_error(err, e.code(), "config", e.what());
    return kBadInput;
  }
  try {
    const fs::path out(out_dir);
    fs::create_directories(out);
    write_text(out / "scenario.cfg", scenario_to_text(s));
    std::vector<TrajectoryRecord> recs;
    int status = kOk;
    for (const auto& run : s.runs) {
      log << "running " << run.label << " (" << to_string(run.config.mode) << ", order " << run.config.order
          << ")\n";
      recs.push_back(run_evolution(s, run));
      const auto& rec = recs.back();
      if (!rec.ok()) {
        report_error(err, rec.error_code, "mode=" + rec.label, rec.error_message);
        status = kRunFailed;
      }
      write_record(out / rec.label, s, rec);
    }
    write_text(out / "summary.txt", summary_text(s, recs));
    std::vector<TrajectoryRecord> good;
    for (const auto& r : recs) {
      if (r.ok()) good.push_back(r);
    }
    if (good.size() >= 2) write_comparison(out / "comparison.csv", compare_records(good));
    log << "wrote " << out.string() << '\n';
    return status;
  } catch (const Error& e) {
    report_error(err, e.code(), "run", e.what());
    return kRunFailed;
  } catch (const fs::filesystem_error& e) {
    report_error(err, "io", "run", e.what());
    return kRunFailed;
  }
}

int cmd_transform(const std::string& in_path, const std::string& out_path, const TransformOptions& opt,
                  std::ostream& log, std::ostream& err) {
  try {
    std::ifstream in(in_path, std::ios::binary);
    require(static_cast<bool>(in), "io", "cannot read " + in_path);
    char magic[4] = {};
    in.read(magic, 4);
    require(static_cast<bool>(in), "format", "input too short: " + in_path);
    const std::string m(magic, 4);
    if (m == "FOK1") {
      const FockOperator a = read_operator(in_path);
      const PhaseSpaceGrid grid = PhaseSpaceGrid::symmetric(opt.half_width, opt.points, a.params());
      const PhaseSpaceField f = weyl_transform(a, grid);
      write_field(out_path, f);
      log << "operator (dim " << a.dim() << ") -> field (" << grid.n_q << "x" << grid.n_p << ")\n";
      if (opt.check) {
        const FockOperator back = inverse_weyl(f, a.dim());
        log << "round_trip_max_error = " << format_double((back.matrix() - a.matrix()).cwiseAbs().maxCoeff()) << '\n';
      }
    } else if (m == "PSF1") {
      const PhaseSpaceField f = read_field(in_path, opt.energy);
      const FockOperator a = inverse_weyl(f, opt.dim);
      write_operator(out_path, a);
      log << "field (" << f.grid().n_q << "x" << f.grid().n_p << ") -> operator (dim " << opt.dim << ")\n";
      if (opt.check) {
        const PhaseSpaceField back = weyl_transform(a, f.grid());
        log << "round_trip_max_error = " << format_double(max_difference(back, f)) << '\n';
      }
    } else {
      fail("format", "unrecognised magic in " + in_path);
    }
    return kOk;
  } catch (const Error& e) {
    report_error(err, e.code(), "transform", e.what());
    return kBadInput;
  }
}

int cmd_heatmap(const std::string& field_path, const std::string& out_path, std::ostream& log, std::ostream& err) {
  try {
    const PhaseSpaceField f = read_field(field_path);
    const Heatmap h = render_heatmap(f);
    write_pgm(out_path, h);
    write_heatmap_sidecar(fs::path(out_path).replace_extension(".txt").string(), h, f.grid(),
                          std::numeric_limits<double>::quiet_NaN());
    log << "white_pixels = " << h.white_pixels << '\n';
    return kOk;
  } catch (const Error& e) {
    report_error(err, e.code(), "heatmap", e.what());
    return kBadInput;
  }
}

}  // namespace semiquant::cli
