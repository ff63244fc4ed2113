#ifndef CHAINREG_ERRORS_HPP
#define CHAINREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chainreg {

// Thrown when an enumeration or allocation would exceed a configured cap.
// Distinct from std::invalid_argument so callers (and the CLI, which maps it
// to exit code 2) can tell "too big" apart from "wrong".
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chainreg

#endif
