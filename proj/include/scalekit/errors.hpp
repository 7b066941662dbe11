#pragma once

#include <stdexcept>
#include <string>

namespace scalekit {

enum class ErrorCategory {
    Argument,
    InfiniteMass,
    InadmissibleStep,
    Range,
    Divergence,
    Consistency,
    Config,
};

const char* to_string(ErrorCategory category);

// Base of every error raised by the library. The category is what the CLI
// maps onto its exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& w) : Error(ErrorCategory::Argument, w) {}
};

struct InfiniteMassError : Error {
    explicit InfiniteMassError(const std::string& w) : Error(ErrorCategory::InfiniteMass, w) {}
};

struct InadmissibleStepError : Error {
    explicit InadmissibleStepError(const std::string& w)
        : Error(ErrorCategory::InadmissibleStep, w) {}
};

struct RangeError : Error {
    explicit RangeError(const std::string& w) : Error(ErrorCategory::Range, w) {}
};

struct DivergenceError : Error {
    explicit DivergenceError(const std::string& w) : Error(ErrorCategory::Divergence, w) {}
};

struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& w) : Error(ErrorCategory::Consistency, w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorCategory::Config, w) {}
};

}  // namespace scalekit
