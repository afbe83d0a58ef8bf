#pragma once

#include <stdexcept>
#include <string>

namespace orants {

/// Machine-readable failure categories, also used as CLI exit codes.
enum class ErrorCategory {
    Internal = 1,
    Usage = 2,
    Scenario = 3,
    PlacementInfeasible = 4,
    Config = 5,
    Checkpoint = 6,
    Data = 7,
};

inline const char* category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Internal: return "internal";
        case ErrorCategory::Usage: return "usage";
        case ErrorCategory::Scenario: return "scenario";
        case ErrorCategory::PlacementInfeasible: return "placement-infeasible";
        case ErrorCategory::Config: return "config";
        case ErrorCategory::Checkpoint: return "checkpoint";
        case ErrorCategory::Data: return "data";
    }
    return "internal";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

} // namespace orants
