#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "edgelb/errors.hpp"

namespace edgelb::detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace edgelb::detail
