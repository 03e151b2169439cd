#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aspui {

/// Base class of every error raised by the library. `code()` is the stable
/// machine-readable name used in HTTP error bodies.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual std::string_view code() const noexcept { return "Error"; }
};

#define ASPUI_DEFINE_ERROR(Name)                                                   \
    class Name : public Error {                                                    \
    public:                                                                        \
        using Error::Error;                                                        \
        std::string_view code() const noexcept override { return #Name; }          \
    }

// configuration and input
ASPUI_DEFINE_ERROR(InvalidConfig);
ASPUI_DEFINE_ERROR(FileNotFound);
ASPUI_DEFINE_ERROR(IoError);
ASPUI_DEFINE_ERROR(UsageError);
ASPUI_DEFINE_ERROR(InvalidSignature);

// solver
ASPUI_DEFINE_ERROR(SolverUnavailable);
ASPUI_DEFINE_ERROR(GroundingError);
ASPUI_DEFINE_ERROR(ProtocolError);
ASPUI_DEFINE_ERROR(SolveFailed);

// session
ASPUI_DEFINE_ERROR(ConflictingTruth);
ASPUI_DEFINE_ERROR(UnknownExternal);
ASPUI_DEFINE_ERROR(NoSolution);
ASPUI_DEFINE_ERROR(UnknownOperation);
ASPUI_DEFINE_ERROR(InvalidOperation);
ASPUI_DEFINE_ERROR(MissingContextKey);
ASPUI_DEFINE_ERROR(InvalidContextValue);

// backends
ASPUI_DEFINE_ERROR(TransformError);
ASPUI_DEFINE_ERROR(NotUnsat);
ASPUI_DEFINE_ERROR(ProbeError);

// user interface
ASPUI_DEFINE_ERROR(NoUIModel);
ASPUI_DEFINE_ERROR(CycleError);
ASPUI_DEFINE_ERROR(DuplicateId);
ASPUI_DEFINE_ERROR(UnknownWidgetType);
ASPUI_DEFINE_ERROR(TreeError);

#undef ASPUI_DEFINE_ERROR

/// Malformed term text. `position` is a byte offset into the parsed input.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::string expected)
    : Error("syntax error at position " + std::to_string(position) + ": expected " + expected)
    , position_(position)
    , expected_(std::move(expected)) {}

    std::string_view code() const noexcept override { return "SyntaxError"; }
    std::size_t position() const noexcept { return position_; }
    std::string const &expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

} // namespace aspui
