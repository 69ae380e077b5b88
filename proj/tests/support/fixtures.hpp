#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(ASPTEST_FIXTURES) + "/" + name; }

inline std::string read(const std::string& name) {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace fixtures
