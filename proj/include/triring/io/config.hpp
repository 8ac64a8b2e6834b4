#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "triring/circuit.hpp"
#include "triring/errors.hpp"

namespace triring::io {

// Validated run configuration. `json` holds the full document after env-var
// overrides; typed accessors below pull the common blocks.
struct RunConfig {
  nlohmann::json json;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 1;
};

inline constexpr int config_version = 1;
inline constexpr const char* env_prefix = "TRIRING_";

// Loads a config file, applies TRIRING_* environment overrides
// (TRIRING_a__b=value sets /a/b; values are parsed as JSON, falling back to
// string), validates the schema for `command`, and rejects unknown keys.
// Throws SchemaError with a JSON-pointer path on any violation.
RunConfig load_config(const std::string& path, const std::string& command);

// Schema validation entry point (exposed for tests); `command` is one of
// spectrum, smatrix, find-working-point, classify, fit, synth.
void validate_config(const nlohmann::json& j, const std::string& command);

// Typed extraction helpers (config must be validated first).
CircuitParams circuit_from_config(const nlohmann::json& j);
BiasPoint bias_from_json(const nlohmann::json& j);
std::vector<double> grid_from_json(const nlohmann::json& j);  // {lo, hi, n}

}  // namespace triring::io
