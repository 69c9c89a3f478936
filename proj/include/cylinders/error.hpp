#pragma once

#include <stdexcept>
#include <string>

namespace cylinders {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
    ZeroVector,
    InvalidData,
    PathThroughOrigin,
    OriginVertex,
    JunctionMismatch,
    WeightMismatch,
    BendPoint,
    HypothesisViolated,
    NotInTd,
    TangentToWall,
    EndpointOnWall,
    AlphaTooLate,
    NotExtendableSpine,
    NotStraight,
    InvalidSpine,
    Schema,
};

inline const char* to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::InvalidData: return "InvalidData";
    case ErrorKind::PathThroughOrigin: return "PathThroughOrigin";
    case ErrorKind::OriginVertex: return "OriginVertex";
    case ErrorKind::JunctionMismatch: return "JunctionMismatch";
    case ErrorKind::WeightMismatch: return "WeightMismatch";
    case ErrorKind::BendPoint: return "BendPoint";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NotInTd: return "NotInTd";
    case ErrorKind::TangentToWall: return "TangentToWall";
    case ErrorKind::EndpointOnWall: return "EndpointOnWall";
    case ErrorKind::AlphaTooLate: return "AlphaTooLate";
    case ErrorKind::NotExtendableSpine: return "NotExtendableSpine";
    case ErrorKind::NotStraight: return "NotStraight";
    case ErrorKind::InvalidSpine: return "InvalidSpine";
    case ErrorKind::Schema: return "SchemaError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace cylinders
