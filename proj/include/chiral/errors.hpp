#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chiral {

/// Coarse error classes. The CLI maps each one onto a distinct exit code.
enum class ErrorCategory {
  invalid_parameter,
  undefined_quantity,
  no_dark_state,
  unsupported_regime,
  out_of_domain,
  integration_failure,
  insufficient_counts,
  config,
  io,
};

std::string_view to_string(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace chiral
