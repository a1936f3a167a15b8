#pragma once

#include <stdexcept>
#include <string>

namespace detlab {

/// Base of every library failure. `code()` is the stable machine-readable tag
/// written into error JSON by the CLI.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define DETLAB_ERROR_TYPE(Name, tag)                                           \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& what) : Error(tag, what) {}               \
  }

DETLAB_ERROR_TYPE(ConfigurationError, "configuration");
DETLAB_ERROR_TYPE(ArgumentError, "argument");
DETLAB_ERROR_TYPE(DomainError, "domain");
DETLAB_ERROR_TYPE(WraparoundError, "wraparound");
DETLAB_ERROR_TYPE(InstabilityError, "instability");
DETLAB_ERROR_TYPE(StarShapeError, "star-shape");
DETLAB_ERROR_TYPE(DegenerateError, "degenerate");
DETLAB_ERROR_TYPE(BranchError, "branch");
DETLAB_ERROR_TYPE(EnsembleError, "ensemble");
DETLAB_ERROR_TYPE(ResourceError, "resource");

#undef DETLAB_ERROR_TYPE

} // namespace detlab
