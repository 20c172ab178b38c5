#pragma once

#include <stdexcept>
#include <string>

namespace diffsearch {

enum class ErrorCode {
    NonFiniteEvaluation,
    BudgetExhausted,
    NoBracket,
    DivergentTail,
    BadParams,
    NoDensity,
    ZeroDensity,
    NotAdmissible,
    OutOfSupport,
    UnreachableTarget,
    MalformedSpec,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace diffsearch
