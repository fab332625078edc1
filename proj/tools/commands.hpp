#pragma once

#include <iosfwd>
#include <string>

namespace semiquant::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kRunFailed = 1;  // some evolution failed, the rest was written
inline constexpr int kBadInput = 2;   // config, format or usage problem

/// One line on `err`: error code=<code> where=<context> message="<text>"
void report_error(std::ostream& err, const std::string& code, const std::string& where, const std::string& message);

int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& log, std::ostream& err);

struct TransformOptions {
  int dim = 64;             // for field -> operator
  double half_width = 8.0;  // grid for operator -> field
  int points = 256;
  double energy = 1.0;      // energy scale attached when reading a field dump
  bool check = false;       // transform back and report the round-trip error
};

/// Direction follows the input's magic: FOK1 -> PSF1 or PSF1 -> FOK1.
int cmd_transform(const std::string& in_path, const std::string& out_path, const TransformOptions& opt,
                  std::ostream& log, std::ostream& err);

int cmd_heatmap(const std::string& field_path, const std::string& out_path, std::ostream& log, std::ostream& err);

}  // namespace semiquant::cli
