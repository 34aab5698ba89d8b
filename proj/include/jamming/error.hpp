#pragma once

#include <stdexcept>
#include <string>

namespace jam {

enum class Errc {
  NotJammed,
  FlipIneffective,
  IndexOutOfRange,
  WindowOutsideGuard,
  ToleranceUnreachable,
  RuleDomainError,
  PatternUnclassifiable,
  OutsideCone,
  NotADensityMatrix,
  PairNotInCatalog,
  TooLarge,
  SupportOutsideChain,
  LightConeEscape,
  ConfigInvalid,
};

inline const char* errc_name(Errc e) {
  switch (e) {
    case Errc::NotJammed: return "NotJammed";
    case Errc::FlipIneffective: return "FlipIneffective";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::WindowOutsideGuard: return "WindowOutsideGuard";
    case Errc::ToleranceUnreachable: return "ToleranceUnreachable";
    case Errc::RuleDomainError: return "RuleDomainError";
    case Errc::PatternUnclassifiable: return "PatternUnclassifiable";
    case Errc::OutsideCone: return "OutsideCone";
    case Errc::NotADensityMatrix: return "NotADensityMatrix";
    case Errc::PairNotInCatalog: return "PairNotInCatalog";
    case Errc::TooLarge: return "TooLarge";
    case Errc::SupportOutsideChain: return "SupportOutsideChain";
    case Errc::LightConeEscape: return "LightConeEscape";
    case Errc::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace jam
