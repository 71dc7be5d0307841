#include "jcsim/error.hpp"

namespace jcsim {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorKind::TruncationExplosion: return "TruncationExplosion";
    case ErrorKind::SolverSingular: return "SolverSingular";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::RecurrenceOverflow: return "RecurrenceOverflow";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::ResonanceSingular: return "ResonanceSingular";
    case ErrorKind::CouplingTooWeak: return "CouplingTooWeak";
    case ErrorKind::BelowThreshold: return "BelowThreshold";
    case ErrorKind::AboveThreshold: return "AboveThreshold";
    case ErrorKind::AboveCollapse: return "AboveCollapse";
    case ErrorKind::ScheduleMismatch: return "ScheduleMismatch";
    case ErrorKind::BandsOverlap: return "BandsOverlap";
    case ErrorKind::NotBimodal: return "NotBimodal";
    case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

} // namespace jcsim
