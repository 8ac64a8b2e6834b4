#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace triring::io {

inline constexpr const char* tool_version = "0.1.0";

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

struct ManifestInput {
  std::string path;
  std::string sha256;
};

// Run provenance record. Written atomically (temp file + rename) only after a
// command has fully succeeded, so a failed run never leaves a partial
// manifest behind.
struct RunManifest {
  std::string command;
  std::string config_sha256;
  std::string started_utc;
  std::string finished_utc;
  std::vector<ManifestInput> inputs;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
};

std::string utc_now_iso8601();

// Atomic write via rename; throws IoError on failure.
void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace triring::io
