#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stefan {

/// Broad fault classes. The CLI maps configuration/validation/input faults
/// to exit status 2 and domain/stability/numerical faults to exit status 3.
enum class ErrorKind {
    configuration,
    validation,
    input,
    domain,
    stability,
    numerical,
};

/// Library exception carrying a dotted machine-readable tag such as
/// `config.lambda.nonpositive` or `stability.cfl`.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string tag, const std::string& message)
        : std::runtime_error(message), kind_(kind), tag_(std::move(tag)) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& tag() const noexcept { return tag_; }

    [[nodiscard]] bool is_configuration_class() const noexcept {
        return kind_ == ErrorKind::configuration || kind_ == ErrorKind::validation ||
               kind_ == ErrorKind::input;
    }

private:
    ErrorKind kind_;
    std::string tag_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string tag, const std::string& message) {
    throw Error(kind, std::move(tag), message);
}

}  // namespace stefan
