#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nblens {

// Every failure carries a stable machine-readable code next to the human text.
// Codes are part of the CLI/service contract, so they never change casually.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string message)
        : std::runtime_error(code + ": " + message),
          code_(std::move(code)),
          message_(std::move(message)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string code_;
    std::string message_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

}  // namespace nblens
