#pragma once

#include <stdexcept>
#include <string>

namespace cfslab {

enum class ErrorKind {
  Structural,  // malformed or mismatched inputs
  Numerical,   // solver or quadrature failure
  Domain,      // argument outside a function's domain
  Resource,    // configured budget exceeded
  Parse,       // unreadable file or config
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::Structural, what);
}

}  // namespace cfslab
