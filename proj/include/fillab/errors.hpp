#pragma once

#include <stdexcept>
#include <string>

namespace fillab {

// All library errors derive from Error so callers can catch one base.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonPureComplex : Error {
    explicit NonPureComplex(const std::string& w) : Error(w) {}
};
struct DanglingVertex : Error {
    explicit DanglingVertex(const std::string& w) : Error(w) {}
};
struct SeedNotAllowed : Error {
    explicit SeedNotAllowed(const std::string& w) : Error(w) {}
};
struct RemovalOutOfBounds : Error {
    explicit RemovalOutOfBounds(const std::string& w) : Error(w) {}
};
struct EscapesMargin : Error {
    explicit EscapesMargin(const std::string& w) : Error(w) {}
};
struct DegenerateInput : Error {
    explicit DegenerateInput(const std::string& w) : Error(w) {}
};
struct UnsupportedDimension : Error {
    explicit UnsupportedDimension(const std::string& w) : Error(w) {}
};
struct NotNullHomologous : Error {
    explicit NotNullHomologous(const std::string& w) : Error(w) {}
};
struct RectangleNotStarFillable : Error {
    explicit RectangleNotStarFillable(const std::string& w) : Error(w) {}
};
struct NotFoldedVertex : Error {
    explicit NotFoldedVertex(const std::string& w) : Error(w) {}
};
struct CapFillUnavailable : Error {
    explicit CapFillUnavailable(const std::string& w) : Error(w) {}
};
struct NonDecayingRemainder : Error {
    explicit NonDecayingRemainder(const std::string& w) : Error(w) {}
};
struct NonTerminating : Error {
    explicit NonTerminating(const std::string& w) : Error(w) {}
};
struct NoEmptyAnnulus : Error {
    explicit NoEmptyAnnulus(const std::string& w) : Error(w) {}
};
struct InsufficientPoints : Error {
    explicit InsufficientPoints(const std::string& w) : Error(w) {}
};
struct NonPositiveValue : Error {
    explicit NonPositiveValue(const std::string& w) : Error(w) {}
};
struct EmptyFamily : Error {
    explicit EmptyFamily(const std::string& w) : Error(w) {}
};
struct EmptyRecords : Error {
    explicit EmptyRecords(const std::string& w) : Error(w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(w) {}
};
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& w) : Error(w) {}
};
struct FormatError : Error {
    explicit FormatError(const std::string& w) : Error(w) {}
};

}  // namespace fillab
