#ifndef JCSIM_ERROR_HPP
#define JCSIM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace jcsim {

enum class ErrorKind {
    InvalidParams,
    DimensionMismatch,
    TruncationInsufficient,
    TruncationExplosion,
    SolverSingular,
    StepRejected,
    StepUnderflow,
    GridTooSmall,
    RecurrenceOverflow,
    NoRoot,
    ResonanceSingular,
    CouplingTooWeak,
    BelowThreshold,
    AboveThreshold,
    AboveCollapse,
    ScheduleMismatch,
    BandsOverlap,
    NotBimodal,
    Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure in the library is reported through this exception; `kind()`
/// identifies the condition so callers (the sweep runner in particular) can
/// react without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace jcsim

#endif // JCSIM_ERROR_HPP
