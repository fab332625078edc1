#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  namespace cli = semiquant::cli;
  CLI::App app{"Phase-space and Fock-space evolutions of oscillator-family Hamiltonians"};
  app.require_subcommand(1);

  std::string config, out_dir;
  auto* run = app.add_subcommand("run", "Run every evolution of a scenario config and write the outputs");
  run->add_option("config", config, "Scenario config file")->required()->check(CLI::ExistingFile);
  run->add_option("outdir", out_dir, "Output directory (created if missing)")->required();

  std::string in_path, out_path;
  cli::TransformOptions topt;
  auto* transform = app.add_subcommand("transform", "Weyl transform of an operator dump, or inverse of a field dump");
  transform->add_option("input", in_path, "FOK1 operator dump or PSF1 field dump")->required();
  transform->add_option("output", out_path, "Output dump")->required();
  transform->add_option("--dim", topt.dim, "Fock dimension for field -> operator")->capture_default_str();
  transform->add_option("--half-width", topt.half_width, "Grid half width for operator -> field")->capture_default_str();
  transform->add_option("--points", topt.points, "Grid points per axis for operator -> field")->capture_default_str();
  transform->add_option("--energy", topt.energy, "Energy scale attached to a field dump")->capture_default_str();
  transform->add_flag("--check", topt.check, "Transform back and print the round-trip error");

  std::string field_path, pgm_path;
  auto* heatmap = app.add_subcommand("heatmap", "Render a field dump as a graymap (negative regions white)");
  heatmap->add_option("field", field_path, "PSF1 field dump")->required();
  heatmap->add_option("output", pgm_path, "Output .pgm")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    cli::report_error(std::cerr, "usage", "arguments", e.what());
    return cli::kBadInput;
  }

  if (*run) return cli::cmd_run(config, out_dir, std::cout, std::cerr);
  if (*transform) return cli::cmd_transform(in_path, out_path, topt, std::cout, std::cerr);
  return cli::cmd_heatmap(field_path, pgm_path, std::cout, std::cerr);
}
