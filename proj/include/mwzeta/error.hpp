#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mwzeta {

/// Error raised by any library module. The code is qualified by the module
/// that raised it, e.g. "padic.DivisionByZeroAtPrecision".
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string code, const std::string& detail)
      : std::runtime_error(module + "." + code + ": " + detail),
        module_(std::move(module)),
        code_(std::move(code)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& code() const noexcept { return code_; }
  std::string qualified_code() const { return module_ + "." + code_; }

 private:
  std::string module_;
  std::string code_;
};

namespace detail {

[[noreturn]] inline void fail(const char* module, const char* code, const std::string& detail) {
  throw Error(module, code, detail);
}

}  // namespace detail
}  // namespace mwzeta
