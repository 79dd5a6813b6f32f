#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace acl {

using Fingerprint = std::array<std::uint8_t, 32>;

Fingerprint sha256(std::string_view bytes);
std::string to_hex(const Fingerprint& fp);
// Exact, locale-independent text form of a double (C99 hex float).
std::string hex_double(double value);

}  // namespace acl
