#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hydrolstm {

enum class ErrorKind {
    Io,
    MissingColumn,
    MalformedRecord,
    NonContiguousDates,
    NonFiniteValue,
    NegativeValue,
    TminAboveTmax,
    MisalignedDates,
    ZeroVariance,
    SeriesTooShort,
    SpanTooShort,
    InvalidArgument,
    ShapeMismatch,
    LengthMismatch,
    NonFiniteState,
    NonFiniteGradient,
    ConstantObservations,
    ConstantSeries,
    DivergedTraining,
    Checkpoint,
    Config,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` discriminates the failure.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace hydrolstm
