#pragma once

#include <stdexcept>
#include <string>

namespace calibra {

/// Malformed input: bad map spec, bad flag value, unknown gallery name.
/// The CLI maps this to exit code 2.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mathematically invalid request: point outside the domain box, a builtin
/// evaluated where it is undefined, insufficient stencil margin.
/// The CLI maps this to exit code 3.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A broken internal invariant (dimension mismatch between library values,
/// out-of-range degree, ...). The CLI maps this to exit code 4.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

[[noreturn]] inline void internal_fail(const std::string& what) {
  throw InternalError(what);
}

#define CALIBRA_REQUIRE(cond, msg) \
  do {                             \
    if (!(cond)) ::calibra::internal_fail(msg); \
  } while (0)

}  // namespace calibra
