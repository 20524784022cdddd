#pragma once

#include <stdexcept>
#include <string>

namespace sgsde {

// Error taxonomy. ValidationError covers bad configuration and misuse
// (exit code 1 at the CLI); NumericError covers method failures such as
// divergence or non-convergence (exit code 2).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg, std::string pointer = {})
        : std::runtime_error(msg), pointer_(std::move(pointer)) {}

    // JSON-pointer style path of the offending field, empty if not applicable.
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sgsde
