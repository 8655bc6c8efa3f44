#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "nblens/errors.hpp"

namespace testsupport {

inline std::string fixture_dir() {
    if (const char* env = std::getenv("NBLENS_FIXTURE_DIR")) return env;
    return "tests/fixtures";
}

inline std::string fixture_path(const std::string& name) {
    return (std::filesystem::path(fixture_dir()) / name).string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs fn and returns the nblens error code it throws, or "" if it returns.
inline std::string error_code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const nblens::Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace testsupport
