#pragma once

#include <stdexcept>
#include <string>

namespace kq {

// Error categories; the C API maps these one-to-one onto kq_status codes.
enum class ErrorKind {
  Validation,
  Domain,
  Shape,
  Parse,
  Precondition,
  Guard,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string &what) {
  if (!cond)
    throw Error(kind, what);
}

} // namespace kq
