#include "hydrolstm/error.hpp"

namespace hydrolstm {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return "Io";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::MalformedRecord: return "MalformedRecord";
        case ErrorKind::NonContiguousDates: return "NonContiguousDates";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::NegativeValue: return "NegativeValue";
        case ErrorKind::TminAboveTmax: return "TminAboveTmax";
        case ErrorKind::MisalignedDates: return "MisalignedDates";
        case ErrorKind::ZeroVariance: return "ZeroVariance";
        case ErrorKind::SeriesTooShort: return "SeriesTooShort";
        case ErrorKind::SpanTooShort: return "SpanTooShort";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::NonFiniteState: return "NonFiniteState";
        case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
        case ErrorKind::ConstantObservations: return "ConstantObservations";
        case ErrorKind::ConstantSeries: return "ConstantSeries";
        case ErrorKind::DivergedTraining: return "DivergedTraining";
        case ErrorKind::Checkpoint: return "Checkpoint";
        case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace hydrolstm
