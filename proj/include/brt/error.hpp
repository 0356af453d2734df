#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace brt {

enum class Errc {
    InvalidArgument,
    InvalidGeometry,
    GrazingIncidence,
    CornerPoint,
    NotOnBoundary,
    Blocked,
    DegenerateRay,
    NotVisible,
    BackFacing,
    ExhaustedCandidates,
    EmptyRow,
    AllRaysEmpty,
    ZeroRow,
    DimensionMismatch,
    EmptyRegion,
    IoFailure,
    ParseError,
    InvalidConfig,
    ZDependentObstacle,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    explicit Error(Errc code) : Error(code, "") {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

}  // namespace brt
