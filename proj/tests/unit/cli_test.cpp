#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include <semiquant/io.hpp>
#include <semiquant/weyl.hpp>

#include "commands.hpp"
#include "helpers.hpp"

using namespace semiquant;
using namespace sqtest;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("semiquant_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

double round_trip_error(const std::string& log) {
  const auto pos = log.find("round_trip_max_error = ");
  EXPECT_NE(pos, std::string::npos) << log;
  return std::stod(log.substr(pos + 23));
}

const char* kSmallRun = R"([hamiltonian]
coeffs = 0, 0, 1
[evolution.quantum]
mode = quantum
t_final = pi/2
samples = 4
[evolution.classical]
mode = classical
t_final = pi/2
samples = 4
[output]
field_times = pi/2
operator_dumps = true
)";

}  // namespace

TEST(CliTransform, IdentityGivesUnitField) {
  const auto d = fresh_dir("identity");
  write_operator((d / "id.fok").string(), FockOperator::identity(half_hbar(), 8));
  std::ostringstream log, err;
  ASSERT_EQ(cli::cmd_transform((d / "id.fok").string(), (d / "id.psf").string(), {}, log, err), cli::kOk) << err.str();
  const auto f = read_field((d / "id.psf").string());
  // pointwise the truncated identity oscillates; its weak form against a coherent state is 1
  const auto gauss = gaussian_density(0.2, -0.1, f.grid());
  EXPECT_NEAR(moment(f, gauss).real(), 1.0, 1e-8);
}

TEST(CliTransform, VacuumPeaksAtTwo) {
  const auto d = fresh_dir("vacuum");
  CMatrix v = CMatrix::Zero(4, 4);
  v(0, 0) = 1.0;
  write_operator((d / "v.fok").string(), FockOperator(half_hbar(), v));
  std::ostringstream log, err;
  ASSERT_EQ(cli::cmd_transform((d / "v.fok").string(), (d / "v.psf").string(), {}, log, err), cli::kOk);
  EXPECT_NEAR(read_field((d / "v.psf").string())(128, 128).real(), 2.0, 1e-10);
}

TEST(CliTransform, RoundTripsBothWays) {
  const auto d = fresh_dir("roundtrip");
  const auto a = random_hermitian(half_hbar(), 64, 32, 11);
  write_operator((d / "a.fok").string(), a);
  cli::TransformOptions opt;
  opt.check = true;
  std::ostringstream log, err;
  ASSERT_EQ(cli::cmd_transform((d / "a.fok").string(), (d / "a.psf").string(), opt, log, err), cli::kOk);
  EXPECT_LT(round_trip_error(log.str()), 1e-8);

  std::ostringstream log2, err2;
  ASSERT_EQ(cli::cmd_transform((d / "a.psf").string(), (d / "b.fok").string(), opt, log2, err2), cli::kOk)
      << err2.str();
  EXPECT_LT(max_abs(read_operator((d / "b.fok").string()).matrix() - a.matrix()), 1e-8);
}

TEST(CliTransform, BadInputIsReported) {
  const auto d = fresh_dir("bad");
  std::ofstream(d / "junk.bin") << "JUNKJUNKJUNK";
  std::ostringstream log, err;
  EXPECT_EQ(cli::cmd_transform((d / "junk.bin").string(), (d / "o").string(), {}, log, err), cli::kBadInput);
  EXPECT_EQ(err.str().rfind("error code=format where=transform", 0), 0u) << err.str();
}

TEST(CliHeatmap, WritesGraymapAndSidecar) {
  const auto d = fresh_dir("heatmap");
  write_field((d / "g.psf").string(), gaussian_density(0.5, 0.0, default_grid()));
  std::ostringstream log, err;
  ASSERT_EQ(cli::cmd_heatmap((d / "g.psf").string(), (d / "g.pgm").string(), log, err), cli::kOk);
  EXPECT_EQ(read_pgm((d / "g.pgm").string()).white_pixels, 0u);
  EXPECT_TRUE(fs::exists(d / "g.txt"));
  EXPECT_NE(log.str().find("white_pixels = 0"), std::string::npos);
}

TEST(CliRun, WritesOutputsDeterministically) {
  const auto d = fresh_dir("run");
  std::ofstream(d / "s.cfg") << kSmallRun;
  std::ostringstream log, err;
  ASSERT_EQ(cli::cmd_run((d / "s.cfg").string(), (d / "out1").string(), log, err), cli::kOk) << err.str();
  ASSERT_EQ(cli::cmd_run((d / "s.cfg").string(), (d / "out2").string(), log, err), cli::kOk) << err.str();
  for (const char* f : {"quantum/trajectory.csv", "classical/trajectory.csv", "quantum/heatmap_00.pgm",
                        "quantum/heatmap_00.txt", "quantum/field_00.psf", "quantum/operator_00.fok",
                        "classical/snapshots.csv", "summary.txt", "comparison.csv", "scenario.cfg"}) {
    ASSERT_TRUE(fs::exists(d / "out1" / f)) << f;
    EXPECT_EQ(slurp(d / "out1" / f), slurp(d / "out2" / f)) << f;
  }
  const std::string csv = slurp(d / "out1/quantum/trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kTrajectoryColumns);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  // common t = 0 moments across modes
  const auto first_row = [](const std::string& s) {
    std::istringstream in(s.substr(s.find('\n') + 1));
    std::vector<double> v;
    std::string cell;
    while (v.size() < 5 && std::getline(in, cell, ',')) v.push_back(std::stod(cell));
    return v;
  };
  const auto a = first_row(csv), b = first_row(slurp(d / "out1/classical/trajectory.csv"));
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(a[k], b[k], 1e-12) << k;
  // the quantum Wigner function at pi/2 is negative somewhere
  EXPECT_GT(read_pgm((d / "out1/quantum/heatmap_00.pgm").string()).white_pixels, 0u);
}

TEST(CliRun, ConfigErrorsExitWithBadInput) {
  const auto d = fresh_dir("badcfg");
  std::ofstream(d / "s.cfg") << "[evolution.q]\nmode = quantum\nwhat = 1\n";
  std::ostringstream log, err;
  EXPECT_EQ(cli::cmd_run((d / "s.cfg").string(), (d / "out").string(), log, err), cli::kBadInput);
  EXPECT_EQ(err.str().rfind("error code=config where=config", 0), 0u) << err.str();
  EXPECT_NE(err.str().find("line 3"), std::string::npos);
}

TEST(CliRun, EngineFailureIsTaggedWithMode) {
  const auto d = fresh_dir("leak");
  std::ofstream(d / "s.cfg") << "[hamiltonian]\ncoeffs = 0, 0, 0, 1\n[evolution.sq]\nmode = semiquantum\norder = 2\n"
                                "t_final = pi\nsamples = 2\nleak_limit = 1e-12\n[output]\nfield_times =\n";
  std::ostringstream log, err;
  EXPECT_EQ(cli::cmd_run((d / "s.cfg").string(), (d / "out").string(), log, err), cli::kRunFailed);
  EXPECT_EQ(err.str().rfind("error code=fock_leak where=mode=sq", 0), 0u) << err.str();
  EXPECT_NE(slurp(d / "out/summary.txt").find("status = failed"), std::string::npos);
}
