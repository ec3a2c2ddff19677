#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace oddforge {

enum class errc {
  invalid_argument = 1,
  dimension_mismatch,
  parse,
  io,
  degenerate_geometry,
  infeasible_region,
  unsatisfiable_constraint,
  non_convergence,
  version_mismatch,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace oddforge
