#include "brt/error.hpp"

namespace brt {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::InvalidGeometry: return "InvalidGeometry";
        case Errc::GrazingIncidence: return "GrazingIncidence";
        case Errc::CornerPoint: return "CornerPoint";
        case Errc::NotOnBoundary: return "NotOnBoundary";
        case Errc::Blocked: return "Blocked";
        case Errc::DegenerateRay: return "DegenerateRay";
        case Errc::NotVisible: return "NotVisible";
        case Errc::BackFacing: return "BackFacing";
        case Errc::ExhaustedCandidates: return "ExhaustedCandidates";
        case Errc::EmptyRow: return "EmptyRow";
        case Errc::AllRaysEmpty: return "AllRaysEmpty";
        case Errc::ZeroRow: return "ZeroRow";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::EmptyRegion: return "EmptyRegion";
        case Errc::IoFailure: return "IoFailure";
        case Errc::ParseError: return "ParseError";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::ZDependentObstacle: return "ZDependentObstacle";
    }
    return "Unknown";
}

}  // namespace brt
