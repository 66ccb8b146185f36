#pragma once

#include <stdexcept>
#include <string>

namespace rabisim {

/// Base of every error the library throws. kind() is a stable,
/// machine-readable tag used in CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define RABISIM_DEFINE_ERROR(Name, tag)                              \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(tag, what) {}     \
  }

RABISIM_DEFINE_ERROR(InvalidDimensionError, "invalid-dimension");
RABISIM_DEFINE_ERROR(LayoutError, "layout");
RABISIM_DEFINE_ERROR(ContractViolation, "contract-violation");
RABISIM_DEFINE_ERROR(InvalidStateError, "invalid-state");
RABISIM_DEFINE_ERROR(ModelKindError, "model-kind");
RABISIM_DEFINE_ERROR(SpecError, "spec");
RABISIM_DEFINE_ERROR(ResonanceError, "resonance");
RABISIM_DEFINE_ERROR(ParameterError, "parameter");
RABISIM_DEFINE_ERROR(IntegrationError, "integration");
RABISIM_DEFINE_ERROR(ConfigParseError, "config-parse");
RABISIM_DEFINE_ERROR(ValidationError, "validation");
RABISIM_DEFINE_ERROR(UnknownPresetError, "unknown-preset");
RABISIM_DEFINE_ERROR(IoError, "io");

#undef RABISIM_DEFINE_ERROR

}  // namespace rabisim
