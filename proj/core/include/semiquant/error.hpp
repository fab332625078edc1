#pragma once

#include <stdexcept>
#include <string>

namespace semiquant {

/// Exception type for every precondition or numerical-contract violation.
/// `code()` is a short machine-readable tag ("dimension_mismatch",
/// "coverage", "fock_leak", ...) used by the CLI error line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message);

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] void fail(const std::string& code, const std::string& message);

inline void require(bool condition, const std::string& code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace semiquant
