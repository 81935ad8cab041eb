#pragma once

// Scratch directories and experiment configs for end-to-end tests.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace edgelb::test {

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() / ("edgelb_" + tag + "_" + std::to_string(::getpid()))) {
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

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Shipped experiment with absolute file references and output under `dir`,
// optionally edited, written to dir/experiment.json.
inline std::filesystem::path write_experiment(const std::filesystem::path& dir,
                                              const std::function<void(nlohmann::json&)>& edit = {}) {
  const std::filesystem::path fixtures = EDGELB_FIXTURES;
  auto j = nlohmann::json::parse(slurp(fixtures / "experiment.json"));
  j["profiles"] = (fixtures / "profiles.json").string();
  j["nodes"] = (fixtures / "nodes.json").string();
  j["output_dir"] = (dir / "out").string();
  if (edit) edit(j);
  const auto path = dir / "experiment.json";
  std::ofstream(path) << j.dump(2);
  return path;
}

}  // namespace edgelb::test
