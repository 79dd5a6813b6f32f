#pragma once

#include "acl/error.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

// Asserts that `expr` throws acl::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                                   \
    do {                                                                        \
        bool thrown_ = false;                                                   \
        try {                                                                   \
            (void)(expr);                                                       \
        } catch (const acl::Error& e_) {                                        \
            thrown_ = true;                                                     \
            CHECK(e_.kind() == (expected_kind));                                \
        }                                                                       \
        CHECK_MESSAGE(thrown_, "expected acl::Error from " #expr);              \
    } while (false)

namespace testing {

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / (name + "_" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
