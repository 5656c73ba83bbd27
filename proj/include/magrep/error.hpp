#ifndef MAGREP_ERROR_HPP
#define MAGREP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace magrep {

enum class ErrorCode {
  NotAGroup,
  FlagInconsistent,
  NoHalvingSubgroup,
  DimensionMismatch,
  NoT0,
  InvalidArgument,
  NotHermitian,
  NotCommuting,
  NotSymmetricUnitary,
  NotIdempotent,
  TraceNotInteger,
  InvalidCoRep,
  NotIrreducible,
  IndicatorNotQuantized,
  ElementNotInSubgroup,
  ReductionFailed,
  SingularAction,
  NonIntegerMultiplicity,
  InvalidAction,
  EmptyChannel,
  GaugeFixFailed,
  NotASubgroupEmbedding,
  UnknownName,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotAGroup: return "NotAGroup";
    case ErrorCode::FlagInconsistent: return "FlagInconsistent";
    case ErrorCode::NoHalvingSubgroup: return "NoHalvingSubgroup";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoT0: return "NoT0";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::NotSymmetricUnitary: return "NotSymmetricUnitary";
    case ErrorCode::NotIdempotent: return "NotIdempotent";
    case ErrorCode::TraceNotInteger: return "TraceNotInteger";
    case ErrorCode::InvalidCoRep: return "InvalidCoRep";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::IndicatorNotQuantized: return "IndicatorNotQuantized";
    case ErrorCode::ElementNotInSubgroup: return "ElementNotInSubgroup";
    case ErrorCode::ReductionFailed: return "ReductionFailed";
    case ErrorCode::SingularAction: return "SingularAction";
    case ErrorCode::NonIntegerMultiplicity: return "NonIntegerMultiplicity";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::EmptyChannel: return "EmptyChannel";
    case ErrorCode::GaugeFixFailed: return "GaugeFixFailed";
    case ErrorCode::NotASubgroupEmbedding: return "NotASubgroupEmbedding";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace magrep

#endif
