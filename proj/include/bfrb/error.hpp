#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bfrb {

enum class ErrorKind {
    FileNotFound,
    ParseError,
    MissingChannel,
    NonMonotoneTimestamps,
    EmptyRecording,
    UnknownBehavior,
    UnknownHand,
    UnknownStage,
    NegativeDuration,
    OverlappingStages,
    DuplicateStage,
    MissingBaselineI,
    EventOutOfRange,
    StageOutOfRange,
    InsufficientBaseline,
    SessionMismatch,
    InsufficientHrData,
    EmptySpan,
    InvalidWindowSpec,
    InvalidLabelSet,
    InsufficientNegativeSpace,
    EmptyChannel,
    InsufficientData,
    FeatureUnavailable,
    SingleClassInput,
    SchemaMismatch,
    NonFiniteFeature,
    InvalidConfig,
    SingleClassLabels,
    NoPositives,
    TooFewParticipants,
    TooFewSamples,
    EmptyDataset,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `kind()` is the machine-readable
/// discriminator; `what()` carries the human-readable context.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail);

    ErrorKind kind() const noexcept { return kind_; }

    /// True for failures caused by the filesystem or by malformed configs
    /// (CLI exit code 2) rather than by the data itself (exit code 1).
    bool is_io() const noexcept;

private:
    ErrorKind kind_;
};

} // namespace bfrb
