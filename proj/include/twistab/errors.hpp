#pragma once

#include <stdexcept>
#include <string>

namespace twistab {

/// Base class for every error raised by the toolkit.
///
/// `name()` is the stable identifier written into run manifests; `exit_code()`
/// is the CLI status it maps to (2 for violated preconditions, 3 for numerical
/// non-convergence).
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what, int exit_code)
      : std::runtime_error(what), name_(std::move(name)), exit_code_(exit_code) {}

  const std::string& name() const noexcept { return name_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string name_;
  int exit_code_;
};

#define TWISTAB_DEFINE_ERROR(Type, code)                                   \
  class Type : public Error {                                              \
   public:                                                                 \
    explicit Type(const std::string& what) : Error(#Type, what, code) {}   \
  };

TWISTAB_DEFINE_ERROR(SingularMoire, 2)
TWISTAB_DEFINE_ERROR(NotLatticePoint, 2)
TWISTAB_DEFINE_ERROR(InvalidParameter, 2)
TWISTAB_DEFINE_ERROR(NoClosedForm, 2)
TWISTAB_DEFINE_ERROR(CutoffTooSmall, 2)
TWISTAB_DEFINE_ERROR(ConfigInvalid, 2)
TWISTAB_DEFINE_ERROR(QuadratureNotConverged, 3)
TWISTAB_DEFINE_ERROR(NoRootInBracket, 3)
TWISTAB_DEFINE_ERROR(NotConverged, 3)

#undef TWISTAB_DEFINE_ERROR

}  // namespace twistab
