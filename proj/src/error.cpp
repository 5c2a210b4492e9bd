#include "bfrb/error.hpp"

namespace bfrb {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingChannel: return "MissingChannel";
    case ErrorKind::NonMonotoneTimestamps: return "NonMonotoneTimestamps";
    case ErrorKind::EmptyRecording: return "EmptyRecording";
    case ErrorKind::UnknownBehavior: return "UnknownBehavior";
    case ErrorKind::UnknownHand: return "UnknownHand";
    case ErrorKind::UnknownStage: return "UnknownStage";
    case ErrorKind::NegativeDuration: return "NegativeDuration";
    case ErrorKind::OverlappingStages: return "OverlappingStages";
    case ErrorKind::DuplicateStage: return "DuplicateStage";
    case ErrorKind::MissingBaselineI: return "MissingBaselineI";
    case ErrorKind::EventOutOfRange: return "EventOutOfRange";
    case ErrorKind::StageOutOfRange: return "StageOutOfRange";
    case ErrorKind::InsufficientBaseline: return "InsufficientBaseline";
    case ErrorKind::SessionMismatch: return "SessionMismatch";
    case ErrorKind::InsufficientHrData: return "InsufficientHrData";
    case ErrorKind::EmptySpan: return "EmptySpan";
    case ErrorKind::InvalidWindowSpec: return "InvalidWindowSpec";
    case ErrorKind::InvalidLabelSet: return "InvalidLabelSet";
    case ErrorKind::InsufficientNegativeSpace: return "InsufficientNegativeSpace";
    case ErrorKind::EmptyChannel: return "EmptyChannel";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::FeatureUnavailable: return "FeatureUnavailable";
    case ErrorKind::SingleClassInput: return "SingleClassInput";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::SingleClassLabels: return "SingleClassLabels";
    case ErrorKind::NoPositives: return "NoPositives";
    case ErrorKind::TooFewParticipants: return "TooFewParticipants";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

bool Error::is_io() const noexcept {
    return kind_ == ErrorKind::FileNotFound || kind_ == ErrorKind::Io ||
           kind_ == ErrorKind::InvalidConfig || kind_ == ErrorKind::EmptyDataset;
}

} // namespace bfrb
