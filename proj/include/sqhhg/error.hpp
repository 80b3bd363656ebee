#pragma once

#include <stdexcept>
#include <string>

namespace sqhhg {

enum class ErrorKind {
    InvalidArgument,
    DegenerateWeight,
    UnsupportedState,
    ZeroIntensity,
    DegenerateExcursion,
    NonUniformGrid,
    GridTooCoarse,
    NoSignal,
    NumericalFault,
    Unconverged,
    Config,
    Io,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::DegenerateWeight: return "degenerate weight";
        case ErrorKind::UnsupportedState: return "unsupported-state";
        case ErrorKind::ZeroIntensity: return "zero-intensity";
        case ErrorKind::DegenerateExcursion: return "degenerate-excursion";
        case ErrorKind::NonUniformGrid: return "non-uniform grid";
        case ErrorKind::GridTooCoarse: return "grid too coarse";
        case ErrorKind::NoSignal: return "no-signal";
        case ErrorKind::NumericalFault: return "numerical fault";
        case ErrorKind::Unconverged: return "unconverged";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

} // namespace sqhhg
