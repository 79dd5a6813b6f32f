#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace acl {

enum class ErrorKind {
    InvalidArgument,    // out-of-range or malformed arguments
    DimensionMismatch,
    Config,             // unusable configuration, unreachable targets
    Dependency,         // missing or stale upstream artifact
    Resource,           // memory cap, allocation failure, I/O
    Numerical,          // solver failure, invalid density matrix
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(what), kind_(kind), index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    // Index of the failing eigenpair / element, when the failure has one.
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

// CLI exit codes: 2 config, 3 resource, 4 numerical.
constexpr int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Resource: return 3;
    case ErrorKind::Numerical: return 4;
    default: return 2;
    }
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

}  // namespace acl
