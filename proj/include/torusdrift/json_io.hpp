#pragma once
// Thin wrapper over the vendored nlohmann header. Everything the library
// writes uses ordered_json so output key order is deterministic.

#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace torusdrift {

using json = nlohmann::ordered_json;

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_json_file: cannot open " + path);
  out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_json_file: cannot open " + path);
  return json::parse(in);
}

}  // namespace torusdrift
