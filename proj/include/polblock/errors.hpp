#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polblock {

enum class ErrorKind {
    domain,
    sampling,
    extrapolation,
    numerical_instability,
    singularity,
    resource,
    undefined_correlation,
    parse,
    validation,
    io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::sampling: return "sampling";
        case ErrorKind::extrapolation: return "extrapolation";
        case ErrorKind::numerical_instability: return "numerical_instability";
        case ErrorKind::singularity: return "singularity";
        case ErrorKind::resource: return "resource";
        case ErrorKind::undefined_correlation: return "undefined_correlation";
        case ErrorKind::parse: return "parse";
        case ErrorKind::validation: return "validation";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

// Every library failure carries the module that raised it, so the CLI can
// report provenance without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error(message), kind_(kind), module_(std::move(module))
    {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

} // namespace polblock
