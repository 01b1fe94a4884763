#pragma once

#include <stdexcept>
#include <string>

namespace loskit {

// validation: bad configuration or contract violation by the caller (CLI exit 1).
// runtime: bad data, I/O failure, degenerate fit (CLI exit 2).
enum class ErrorKind { validation, runtime };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    static Error validation(const std::string& what) { return {ErrorKind::validation, what}; }
    static Error runtime(const std::string& what) { return {ErrorKind::runtime, what}; }

private:
    ErrorKind kind_;
};

}  // namespace loskit
