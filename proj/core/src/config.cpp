#include "semiquant/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <variant>

#include "semiquant/error.hpp"
#include "semiquant/io.hpp"

namespace semiquant {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(int line, const std::string& msg) {
  fail("config", "line " + std::to_string(line) + ": " + msg);
}

double parse_atom(const std::string& t) {
  if (t == "pi") return std::numbers::pi;
  double v = 0.0;
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) fail("config", "not a number: '" + t + "'");
  return v;
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
};

// Keys are consumed as they are read; leftovers are reported as unknown.
class Reader {
 public:
  explicit Reader(Section& s) : s_(s) {}

  bool has(const std::string& key) const { return s_.entries.count(key) > 0; }

  int line_of(const std::string& key) const { return has(key) ? s_.entries.at(key).line : s_.line; }

  std::string text(const std::string& key, const std::string& fallback) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    it->second.used = true;
    return it->second.value;
  }

  double number(const std::string& key, double fallback) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    it->second.used = true;
    try {
      return parse_number_expression(it->second.value);
    } catch (const Error& e) {
      config_error(it->second.line, "[" + s_.name + "] " + key + ": " + e.what());
    }
  }

  int integer(const std::string& key, int fallback) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    it->second.used = true;
    const std::string& t = it->second.value;
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      config_error(it->second.line, "[" + s_.name + "] " + key + ": not an integer: '" + t + "'");
    }
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return fallback;
    it->second.used = true;
    const std::string& t = it->second.value;
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    config_error(it->second.line, "[" + s_.name + "] " + key + ": expected true or false, got '" + t + "'");
  }

  std::vector<double> list(const std::string& key) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return {};
    it->second.used = true;
    std::vector<double> out;
    std::stringstream ss(it->second.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(parse_number_expression(trim(item)));
      } catch (const Error& e) {
        config_error(it->second.line, "[" + s_.name + "] " + key + ": " + e.what());
      }
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, e] : s_.entries) {
      if (!e.used) config_error(e.line, "unknown key '" + key + "' in [" + s_.name + "]");
    }
  }

 private:
  Section& s_;
};

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += format_double(v[k]);
  }
  return out;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

double parse_number_expression(const std::string& text) {
  const std::string t = trim(text);
  require(!t.empty(), "config", "empty number");
  double sign = 1.0;
  std::size_t pos = 0;
  if (t[0] == '-' || t[0] == '+') {
    if (t[0] == '-') sign = -1.0;
    pos = 1;
  }
  double value = 1.0;
  char op = '*';
  while (true) {
    const auto next = t.find_first_of("*/", pos);
    const double a = parse_atom(trim(t.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    value = op == '*' ? value * a : value / a;
    if (next == std::string::npos) break;
    op = t[next];
    pos = next + 1;
  }
  require(std::isfinite(value), "config", "not a finite number: '" + t + "'");
  return sign * value;
}

Scenario parse_scenario(std::istream& in, const std::string& source) {
  std::vector<Section> sections;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  try {
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find_first_of("#;");
      const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') config_error(line, "malformed section header");
        const std::string name = trim(s.substr(1, s.size() - 2));
        if (!seen.insert(name).second) config_error(line, "duplicate section [" + name + "]");
        sections.push_back({name, line, {}});
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) config_error(line, "expected 'key = value'");
      if (sections.empty()) config_error(line, "key outside any section");
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (key.empty()) config_error(line, "empty key");
      auto& entries = sections.back().entries;
      if (entries.count(key)) config_error(line, "duplicate key '" + key + "'");
      entries[key] = {value, line, false};
    }

    Scenario sc = default_scenario();
    auto find = [&](const std::string& name) -> Section* {
      for (auto& s : sections) {
        if (s.name == name) return &s;
      }
      return nullptr;
    };
    for (const auto& s : sections) {
      static const std::set<std::string> known = {"params", "grid", "hamiltonian", "initial", "output"};
      if (!known.count(s.name) && s.name.rfind("evolution.", 0) != 0) {
        config_error(s.line, "unknown section [" + s.name + "]");
      }
    }

    if (Section* s = find("params")) {
      Reader r(*s);
      sc.params.mass = r.number("mass", sc.params.mass);
      sc.params.omega = r.number("omega", sc.params.omega);
      sc.params.hbar = r.number("hbar", sc.params.hbar);
      sc.params.energy = r.number("energy", sc.params.energy);
      r.finish();
      try {
        sc.params.validate();
      } catch (const Error& e) {
        config_error(s->line, e.what());
      }
    }

    if (Section* s = find("grid")) {
      Reader r(*s);
      if (r.has("half_width")) {
        const double w = r.number("half_width", 8.0);
        sc.grid.q_min = sc.grid.p_min = -w;
        sc.grid.q_max = sc.grid.p_max = w;
      }
      sc.grid.q_min = r.number("q_min", sc.grid.q_min);
      sc.grid.q_max = r.number("q_max", sc.grid.q_max);
      sc.grid.p_min = r.number("p_min", sc.grid.p_min);
      sc.grid.p_max = r.number("p_max", sc.grid.p_max);
      if (r.has("points")) sc.grid.n_q = sc.grid.n_p = r.integer("points", 256);
      sc.grid.n_q = r.integer("n_q", sc.grid.n_q);
      sc.grid.n_p = r.integer("n_p", sc.grid.n_p);
      sc.fock_dim = r.integer("fock_dim", sc.fock_dim);
      sc.taper_inner = r.number("taper_inner", sc.taper_inner);
      sc.taper_outer = r.number("taper_outer", sc.taper_outer);
      r.finish();
    }
    sc.grid.params = sc.params;

    if (Section* s = find("hamiltonian")) {
      Reader r(*s);
      const std::string family = r.text("family", "poly_oscillator");
      if (family == "poly_oscillator") {
        PolyOscillator p;
        p.coeffs = r.list("coeffs");
        if (p.coeffs.empty()) config_error(r.line_of("coeffs"), "poly_oscillator needs coeffs");
        sc.hamiltonian = p;
      } else if (family == "kinetic_potential") {
        KineticPotential k;
        k.mass = r.number("mass", 1.0);
        k.potential = r.list("potential");
        sc.hamiltonian = k;
      } else {
        config_error(r.line_of("family"), "unknown hamiltonian family '" + family + "'");
      }
      r.finish();
      try {
        validate(sc.hamiltonian);
      } catch (const Error& e) {
        config_error(s->line, e.what());
      }
    }

    if (Section* s = find("initial")) {
      Reader r(*s);
      sc.initial.q0 = r.number("q0", sc.initial.q0);
      sc.initial.p0 = r.number("p0", sc.initial.p0);
      r.finish();
    }

    for (auto& s : sections) {
      if (s.name.rfind("evolution.", 0) != 0) continue;
      Reader r(s);
      ScenarioRun run;
      run.label = s.name.substr(std::string("evolution.").size());
      if (run.label.empty()) config_error(s.line, "evolution section needs a label");
      EvolutionConfig& c = run.config;
      if (!r.has("mode")) config_error(s.line, "[" + s.name + "] needs a mode");
      const int mode_line = r.line_of("mode");
      try {
        c.mode = parse_mode(r.text("mode", ""));
      } catch (const Error& e) {
        config_error(mode_line, e.what());
      }
      c.order = r.integer("order", 0);
      c.dt = r.number("dt", c.dt);
      c.t_final = r.number("t_final", c.t_final);
      c.leak_limit = r.number("leak_limit", c.leak_limit);
      c.auto_substep = r.boolean("auto_substep", c.auto_substep);
      if (r.has("integrator")) {
        const int l = r.line_of("integrator");
        try {
          c.integrator = parse_integrator(r.text("integrator", "auto"));
        } catch (const Error& e) {
          config_error(l, e.what());
        }
      }
      if (r.has("times") && r.has("samples")) config_error(s.line, "give either times or samples, not both");
      if (r.has("times")) {
        c.snapshot_times = r.list("times");
      } else {
        const int l = r.line_of("samples");
        const int n = r.integer("samples", 64);
        if (n < 1) config_error(l, "samples must be at least 1");
        c.snapshot_times = uniform_times(c.t_final, n);
      }
      r.finish();
      try {
        c.validate();
      } catch (const Error& e) {
        config_error(s.line, "[" + s.name + "] " + e.what());
      }
      sc.runs.push_back(std::move(run));
    }

    sc.output.field_times = {0.0, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4,
                             std::numbers::pi};
    if (Section* s = find("output")) {
      Reader r(*s);
      if (r.has("field_times")) sc.output.field_times = r.list("field_times");
      sc.output.heatmaps = r.boolean("heatmaps", sc.output.heatmaps);
      sc.output.field_dumps = r.boolean("field_dumps", sc.output.field_dumps);
      sc.output.operator_dumps = r.boolean("operator_dumps", sc.output.operator_dumps);
      r.finish();
    }
    if (sc.runs.empty()) fail("config", "no [evolution.*] section");
    sc.validate();
    return sc;
  } catch (const Error& e) {
    // what() already starts with the inner code
    const std::string what = e.what();
    const std::string body = e.code() == "config" ? what.substr(e.code().size() + 2) : what;
    throw Error("config", source + ": " + body);
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), "io", "cannot read " + path);
  return parse_scenario(f, path);
}

std::string scenario_to_text(const Scenario& s) {
  std::ostringstream o;
  o << "[params]\n"
    << "mass = " << format_double(s.params.mass) << '\n'
    << "omega = " << format_double(s.params.omega) << '\n'
    << "hbar = " << format_double(s.params.hbar) << '\n'
    << "energy = " << format_double(s.params.energy) << "\n\n";
  o << "[grid]\n"
    << "q_min = " << format_double(s.grid.q_min) << '\n'
    << "q_max = " << format_double(s.grid.q_max) << '\n'
    << "p_min = " << format_double(s.grid.p_min) << '\n'
    << "p_max = " << format_double(s.grid.p_max) << '\n'
    << "n_q = " << s.grid.n_q << '\n'
    << "n_p = " << s.grid.n_p << '\n'
    << "fock_dim = " << s.fock_dim << '\n'
    << "taper_inner = " << format_double(s.taper_inner) << '\n'
    << "taper_outer = " << format_double(s.taper_outer) << "\n\n";
  o << "[hamiltonian]\n";
  if (const auto* p = std::get_if<PolyOscillator>(&s.hamiltonian)) {
    o << "family = poly_oscillator\ncoeffs = " << join(p->coeffs) << "\n\n";
  } else {
    const auto& k = std::get<KineticPotential>(s.hamiltonian);
    o << "family = kinetic_potential\nmass = " << format_double(k.mass) << "\npotential = " << join(k.potential)
      << "\n\n";
  }
  o << "[initial]\n"
    << "q0 = " << format_double(s.initial.q0) << '\n'
    << "p0 = " << format_double(s.initial.p0) << "\n\n";
  for (const auto& r : s.runs) {
    const auto& c = r.config;
    o << "[evolution." << r.label << "]\n"
      << "mode = " << to_string(c.mode) << '\n'
      << "order = " << c.order << '\n'
      << "dt = " << format_double(c.dt) << '\n'
      << "t_final = " << format_double(c.t_final) << '\n'
      << "leak_limit = " << format_double(c.leak_limit) << '\n'
      << "auto_substep = " << bool_text(c.auto_substep) << '\n'
      << "integrator = " << to_string(c.integrator) << '\n'
      << "times = " << join(c.schedule()) << "\n\n";
  }
  o << "[output]\n"
    << "field_times = " << join(s.output.field_times) << '\n'
    << "heatmaps = " << bool_text(s.output.heatmaps) << '\n'
    << "field_dumps = " << bool_text(s.output.field_dumps) << '\n'
    << "operator_dumps = " << bool_text(s.output.operator_dumps) << '\n';
  return o.str();
}

}  // namespace semiquant
