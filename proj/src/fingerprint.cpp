#include "acl/fingerprint.hpp"

#include <openssl/sha.h>

#include <cstdio>

namespace acl {

Fingerprint sha256(std::string_view bytes) {
    Fingerprint out{};
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), out.data());
    return out;
}

std::string to_hex(const Fingerprint& fp) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(fp.size() * 2);
    for (auto b : fp) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

std::string hex_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", value);
    return buf;
}

}  // namespace acl
