#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace embedkit {

// Error categories; mirror the ek_status codes of the C API one-to-one.
enum class ErrCode {
  InvalidArgument = 1,
  Io = 2,
  Format = 3,
  Shape = 4,
  Config = 5,
  Dataset = 6,
  Numeric = 7,
  Internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrCode code() const { return code_; }

 private:
  ErrCode code_;
};

namespace detail {
inline void concat_into(std::ostringstream&) {}
template <typename T, typename... Rest>
void concat_into(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  concat_into(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  detail::concat_into(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(ErrCode code, const Args&... args) {
  throw Error(code, concat(args...));
}

}  // namespace embedkit
