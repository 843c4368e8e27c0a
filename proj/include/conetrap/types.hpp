#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace conetrap {

using Complex = std::complex<double>;

inline constexpr const char* kVersion = "conetrap 1.0.0";

// Machine-readable failure codes. Every thrown Error carries one; the CLI
// maps them into the output header and the process exit code.
enum class Errc {
  AlphaOutOfRange,
  SignViolation,
  NegativeDissipation,
  GeometryKindMismatch,
  MeshFileInvalid,
  DegenerateTriangle,
  PoleQuadratureFailure,
  MassMatrixSingular,
  NoConvergence,
  EndpointDegeneracy,
  NoSpectralGap,
  TrackingAmbiguity,
  WindowEmpty,
  MultiplicityWarning,
  PointOutsideChart,
  TauOutsidePlateau,
  QuadratureNotConverged,
  ConfigParseError,
  ConfigValidationError,
  IoError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

// Non-fatal conditions accumulated during a run; their presence turns exit
// code 0 into 2 (completed with warnings).
struct Warning {
  Errc code;
  std::string detail;
};

// Pins BLAS/OpenMP backends to one thread (unless the caller already chose a
// value) so identical configs give byte-identical outputs. Call first thing
// in every executable, before any linear algebra.
void init_determinism();

}  // namespace conetrap
