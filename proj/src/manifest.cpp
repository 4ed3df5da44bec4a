#include "edgeseq/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace edgeseq {

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["tool_version"] = kVersion;
  for (const auto& [key, value] : fields) j[key] = value;
  for (const auto& [stage, seconds] : stage_seconds) j["timings_seconds"][stage] = seconds;
  return j.dump(2);
}

void write_atomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out << contents;
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  write_atomically(path, manifest.to_json() + "\n");
}

}  // namespace edgeseq
