#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wrangle {

// Error categories map onto the CLI exit-code convention:
// usage/config -> 2, data -> 3, transport -> 4.
enum class ErrorKind { usage, config, data, transport };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::usage:
            case ErrorKind::config: return 2;
            case ErrorKind::data: return 3;
            case ErrorKind::transport: return 4;
        }
        return 1;
    }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(std::string message) : Error(ErrorKind::usage, std::move(message)) {}
};

struct ConfigError : Error {
    explicit ConfigError(std::string message) : Error(ErrorKind::config, std::move(message)) {}
};

struct DataError : Error {
    explicit DataError(std::string message) : Error(ErrorKind::data, std::move(message)) {}
};

// Carries the last HTTP status seen before giving up (0 when the failure
// never reached the HTTP layer, e.g. connect errors).
struct TransportError : Error {
    explicit TransportError(std::string message, int last_status = 0)
        : Error(ErrorKind::transport, std::move(message)), last_status(last_status) {}

    int last_status;
};

} // namespace wrangle
