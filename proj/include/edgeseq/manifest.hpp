#pragma once

#include <map>
#include <string>

namespace edgeseq {

inline constexpr const char* kVersion = "0.1.0";

// Per-run bookkeeping written at each stage boundary. String-valued fields
// keep it trivially diffable; numeric timings are formatted on insert.
struct RunManifest {
  std::map<std::string, std::string> fields;
  std::map<std::string, double> stage_seconds;

  void set(const std::string& key, const std::string& value) { fields[key] = value; }
  void set_stage_time(const std::string& stage, double seconds) {
    stage_seconds[stage] = seconds;
  }
  std::string to_json() const;
};

// Write-then-rename so readers never observe a half-written manifest.
void write_atomically(const std::string& path, const std::string& contents);
void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace edgeseq
