#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "amalgam/error.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw amalgam::DomainError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string data(const std::string& name) { return read_file(std::string(AMALGAM_DATA_DIR) + "/" + name); }

inline std::string golden(const std::string& name) { return read_file(std::string(AMALGAM_GOLDEN_DIR) + "/" + name); }

}  // namespace testutil
