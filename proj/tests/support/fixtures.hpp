#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "ssmi/model.hpp"
#include "ssmi/parser.hpp"

namespace ssmi_test {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string fixture_path(const std::string& name) {
    return std::string(FIXTURES_DIR) + "/" + name;
}

inline ssmi::Model load_fixture_model(const std::string& name) {
    return ssmi::parse_model(read_file(fixture_path(name)));
}

}  // namespace ssmi_test
