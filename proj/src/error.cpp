#include "csirecip/error.hpp"

namespace csirecip {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::SubcarrierOutOfRange: return "SubcarrierOutOfRange";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::ConstantPooledRange: return "ConstantPooledRange";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::GapsPresent: return "GapsPresent";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::NoFrequencySelected: return "NoFrequencySelected";
    case ErrorCode::UnusableCoherence: return "UnusableCoherence";
    case ErrorCode::DegenerateBlock: return "DegenerateBlock";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::ListMismatch: return "ListMismatch";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace csirecip
