#include "triring/io/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

extern char** environ;

namespace triring::io {

using nlohmann::json;

namespace {

void fail(const std::string& pointer, const std::string& msg) {
  throw SchemaError(pointer, msg);
}

void require_keys(const json& j, const std::string& pointer,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
  if (!j.is_object()) fail(pointer, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!required.count(key) && !optional.count(key)) {
      fail(pointer + "/" + key, "unknown key");
    }
  }
  for (const auto& key : required) {
    if (!j.contains(key)) fail(pointer + "/" + key, "missing required key");
  }
}

double get_number(const json& j, const std::string& pointer) {
  if (!j.is_number()) fail(pointer, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& pointer) {
  if (!j.is_number_integer()) fail(pointer, "expected an integer");
  return j.get<int>();
}

void check_number(const json& j, const std::string& p) { get_number(j, p); }

void check_int(const json& j, const std::string& p) { get_int(j, p); }

void check_bool(const json& j, const std::string& p) {
  if (!j.is_boolean()) fail(p, "expected a boolean");
}

void check_string(const json& j, const std::string& p) {
  if (!j.is_string()) fail(p, "expected a string");
}

void check_number_array(const json& j, const std::string& p, int size) {
  if (!j.is_array() || static_cast<int>(j.size()) != size) {
    fail(p, "expected an array of " + std::to_string(size) + " numbers");
  }
  for (int i = 0; i < size; ++i) {
    check_number(j[i], p + "/" + std::to_string(i));
  }
}

void check_sectors(const json& j, const std::string& p) {
  if (!j.is_array() || j.empty()) fail(p, "expected a non-empty array");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string pi = p + "/" + std::to_string(i);
    check_string(j[i], pi);
    try {
      sector_from_label(j[i].get<std::string>());
    } catch (const ParameterError& e) {
      fail(pi, e.what());
    }
  }
}

void check_range(const json& j, const std::string& p, bool with_n) {
  require_keys(j, p, with_n ? std::set<std::string>{"lo", "hi", "n"}
                            : std::set<std::string>{"lo", "hi"},
               {});
  const double lo = get_number(j["lo"], p + "/lo");
  const double hi = get_number(j["hi"], p + "/hi");
  if (!(hi >= lo)) fail(p, "hi must be >= lo");
  if (with_n && get_int(j["n"], p + "/n") < 1) fail(p + "/n", "must be >= 1");
}

void check_flux_map(const json& j, const std::string& p) {
  require_keys(j, p, {"a", "b"}, {"breakpoint"});
  if (get_number(j["a"], p + "/a") == 0.0) fail(p + "/a", "must be nonzero");
  check_number(j["b"], p + "/b");
  if (j.contains("breakpoint")) check_number(j["breakpoint"], p + "/breakpoint");
}

void check_circuit(const json& j, const std::string& p) {
  require_keys(j, p, {"ej", "cg", "cc", "ci", "kappa"}, {"cap_matrix"});
  check_number_array(j["ej"], p + "/ej", 3);
  for (const char* key : {"cg", "cc", "ci", "kappa"}) {
    check_number(j[key], p + "/" + std::string(key));
  }
  if (j.contains("cap_matrix")) {
    const json& m = j["cap_matrix"];
    if (!m.is_array() || m.size() != 3) {
      fail(p + "/cap_matrix", "expected a 3x3 matrix");
    }
    for (int r = 0; r < 3; ++r) {
      check_number_array(m[r], p + "/cap_matrix/" + std::to_string(r), 3);
    }
  }
}

void check_bias(const json& j, const std::string& p) {
  require_keys(j, p, {"phi_b", "ng"}, {});
  check_number(j["phi_b"], p + "/phi_b");
  check_number_array(j["ng"], p + "/ng", 3);
}

void validate_spectrum(const json& j, const std::string& p) {
  require_keys(j, p, {"sectors", "flux_map", "ng_left", "control"},
               {"ng_right", "transitions", "cutoff", "synth_map"});
  check_sectors(j["sectors"], p + "/sectors");
  check_flux_map(j["flux_map"], p + "/flux_map");
  check_number_array(j["ng_left"], p + "/ng_left", 3);
  if (j.contains("ng_right")) check_number_array(j["ng_right"], p + "/ng_right", 3);
  check_range(j["control"], p + "/control", true);
  if (j.contains("transitions") && get_int(j["transitions"], p + "/transitions") < 1) {
    fail(p + "/transitions", "must be >= 1");
  }
  if (j.contains("cutoff") && get_int(j["cutoff"], p + "/cutoff") < 1) {
    fail(p + "/cutoff", "must be >= 1");
  }
  if (j.contains("synth_map")) {
    require_keys(j["synth_map"], p + "/synth_map", {"freq", "amplitude"},
                 {"linewidth_ghz"});
    check_range(j["synth_map"]["freq"], p + "/synth_map/freq", true);
    check_number(j["synth_map"]["amplitude"], p + "/synth_map/amplitude");
    if (j["synth_map"].contains("linewidth_ghz")) {
      check_number(j["synth_map"]["linewidth_ghz"],
                   p + "/synth_map/linewidth_ghz");
    }
  }
}

void validate_smatrix(const json& j, const std::string& p) {
  require_keys(j, p, {"bias", "freq"},
               {"sectors", "cutoff", "unitarity_audit"});
  check_bias(j["bias"], p + "/bias");
  check_range(j["freq"], p + "/freq", true);
  if (j.contains("sectors")) check_sectors(j["sectors"], p + "/sectors");
  if (j.contains("cutoff")) check_int(j["cutoff"], p + "/cutoff");
  if (j.contains("unitarity_audit")) {
    check_bool(j["unitarity_audit"], p + "/unitarity_audit");
  }
}

void validate_working_point(const json& j, const std::string& p) {
  require_keys(j, p, {"band"},
               {"sector", "phi", "ng", "phi_steps", "ng_steps",
                "coarse_cutoff", "refine_cutoff", "final_cutoff",
                "top_candidates", "refine_iterations"});
  check_range(j["band"], p + "/band", false);
  if (j.contains("sector")) {
    check_string(j["sector"], p + "/sector");
    try {
      sector_from_label(j["sector"].get<std::string>());
    } catch (const ParameterError& e) {
      fail(p + "/sector", e.what());
    }
  }
  if (j.contains("phi")) check_range(j["phi"], p + "/phi", false);
  if (j.contains("ng")) check_range(j["ng"], p + "/ng", false);
  for (const char* key : {"phi_steps", "ng_steps", "coarse_cutoff",
                          "refine_cutoff", "final_cutoff", "top_candidates",
                          "refine_iterations"}) {
    if (j.contains(key) && get_int(j[key], p + "/" + std::string(key)) < 1) {
      fail(p + "/" + std::string(key), "must be >= 1");
    }
  }
}

void validate_classify(const json& j, const std::string& p) {
  require_keys(j, p, {"input"}, {"sidecar", "k", "restarts", "model_selection"});
  check_string(j["input"], p + "/input");
  if (j.contains("sidecar")) check_string(j["sidecar"], p + "/sidecar");
  if (j.contains("k") && get_int(j["k"], p + "/k") < 1) fail(p + "/k", "must be >= 1");
  if (j.contains("restarts") && get_int(j["restarts"], p + "/restarts") < 1) {
    fail(p + "/restarts", "must be >= 1");
  }
  if (j.contains("model_selection")) {
    check_bool(j["model_selection"], p + "/model_selection");
  }
}

void validate_fit(const json& j, const std::string& p) {
  require_keys(j, p, {"input", "flux_guess"},
               {"input_kind", "threshold", "min_separation_ghz", "sectors",
                "ng_left_init", "ng_right_init", "transitions", "cutoff",
                "restarts", "max_iterations", "ej_bound", "ec_bound",
                "a_bound", "b_bound"});
  check_string(j["input"], p + "/input");
  check_flux_map(j["flux_guess"], p + "/flux_guess");
  if (j.contains("input_kind")) {
    check_string(j["input_kind"], p + "/input_kind");
    const auto kind = j["input_kind"].get<std::string>();
    if (kind != "ridges" && kind != "map") {
      fail(p + "/input_kind", "expected 'ridges' or 'map'");
    }
  }
  for (const char* key : {"threshold", "min_separation_ghz"}) {
    if (j.contains(key)) check_number(j[key], p + "/" + std::string(key));
  }
  if (j.contains("sectors")) check_sectors(j["sectors"], p + "/sectors");
  for (const char* key : {"ng_left_init", "ng_right_init"}) {
    if (j.contains(key)) check_number_array(j[key], p + "/" + std::string(key), 3);
  }
  for (const char* key : {"transitions", "cutoff", "restarts", "max_iterations"}) {
    if (j.contains(key) && get_int(j[key], p + "/" + std::string(key)) < 1) {
      fail(p + "/" + std::string(key), "must be >= 1");
    }
  }
  for (const char* key : {"ej_bound", "ec_bound", "a_bound", "b_bound"}) {
    if (j.contains(key)) check_number_array(j[key], p + "/" + std::string(key), 2);
  }
}

void validate_synth(const json& j, const std::string& p) {
  require_keys(j, p, {}, {"timeseries", "snr_map"});
  if (!j.contains("timeseries") && !j.contains("snr_map")) {
    fail(p, "need at least one of timeseries/snr_map");
  }
  if (j.contains("timeseries")) {
    const std::string pt = p + "/timeseries";
    const json& t = j["timeseries"];
    require_keys(t, pt, {"length", "tau_s", "mean_dwell", "noise_sigma",
                         "bias", "drive_freq"},
                 {"cutoff", "initial"});
    if (get_int(t["length"], pt + "/length") < 1) fail(pt + "/length", "must be >= 1");
    check_number(t["tau_s"], pt + "/tau_s");
    check_number_array(t["mean_dwell"], pt + "/mean_dwell", 4);
    check_number(t["noise_sigma"], pt + "/noise_sigma");
    check_bias(t["bias"], pt + "/bias");
    check_number(t["drive_freq"], pt + "/drive_freq");
    if (t.contains("cutoff")) check_int(t["cutoff"], pt + "/cutoff");
    if (t.contains("initial")) check_number_array(t["initial"], pt + "/initial", 4);
  }
  if (j.contains("snr_map")) {
    const std::string pm = p + "/snr_map";
    const json& m = j["snr_map"];
    require_keys(m, pm, {"control", "freq", "flux_map", "ng_left", "amplitude"},
                 {"ng_right", "sectors", "linewidth_ghz", "transitions", "cutoff"});
    check_range(m["control"], pm + "/control", true);
    check_range(m["freq"], pm + "/freq", true);
    check_flux_map(m["flux_map"], pm + "/flux_map");
    check_number_array(m["ng_left"], pm + "/ng_left", 3);
    if (m.contains("ng_right")) check_number_array(m["ng_right"], pm + "/ng_right", 3);
    check_number(m["amplitude"], pm + "/amplitude");
    if (m.contains("sectors")) check_sectors(m["sectors"], pm + "/sectors");
    if (m.contains("linewidth_ghz")) check_number(m["linewidth_ghz"], pm + "/linewidth_ghz");
    for (const char* key : {"transitions", "cutoff"}) {
      if (m.contains(key) && get_int(m[key], pm + "/" + std::string(key)) < 1) {
        fail(pm + "/" + std::string(key), "must be >= 1");
      }
    }
  }
}

}  // namespace

void validate_config(const json& j, const std::string& command) {
  if (!j.is_object()) fail("", "config root must be an object");
  if (!j.contains("version")) fail("/version", "missing required key");
  if (!j["version"].is_number_integer() ||
      j["version"].get<int>() != config_version) {
    fail("/version", "unsupported config version (expected " +
                         std::to_string(config_version) + ")");
  }

  static const std::set<std::string> command_blocks = {
      "spectrum", "smatrix", "working_point", "classify", "fit", "synth"};
  std::string block = command == "find-working-point" ? "working_point" : command;

  require_keys(j, "", {"version"},
               [&] {
                 std::set<std::string> opt = {"seed", "out", "threads",
                                              "circuit"};
                 opt.insert(command_blocks.begin(), command_blocks.end());
                 return opt;
               }());
  if (j.contains("seed") && !j["seed"].is_number_unsigned() &&
      !j["seed"].is_number_integer()) {
    fail("/seed", "expected an integer");
  }
  if (j.contains("out")) check_string(j["out"], "/out");
  if (j.contains("threads") && get_int(j["threads"], "/threads") < 1) {
    fail("/threads", "must be >= 1");
  }
  if (j.contains("circuit")) check_circuit(j["circuit"], "/circuit");

  if (!j.contains(block)) fail("/" + block, "missing block for command " + command);

  const std::string p = "/" + block;
  if (block == "spectrum") {
    validate_spectrum(j[block], p);
  } else if (block == "smatrix") {
    validate_smatrix(j[block], p);
  } else if (block == "working_point") {
    validate_working_point(j[block], p);
  } else if (block == "classify") {
    validate_classify(j[block], p);
  } else if (block == "fit") {
    validate_fit(j[block], p);
  } else if (block == "synth") {
    validate_synth(j[block], p);
  } else {
    fail(p, "unknown command block");
  }

  // Commands that touch the model need the circuit block.
  const bool needs_circuit =
      block == "spectrum" || block == "smatrix" || block == "working_point" ||
      (block == "fit") || (block == "synth");
  if (needs_circuit && !j.contains("circuit")) {
    fail("/circuit", "missing required key for command " + command);
  }
}

namespace {

json parse_env_value(const std::string& raw) {
  const json parsed = json::parse(raw, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return json(raw);
}

void apply_env_overrides(json& j) {
  for (char** env = environ; *env != nullptr; ++env) {
    const std::string entry(*env);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = entry.substr(0, eq);
    if (key.rfind(env_prefix, 0) != 0) continue;
    key = key.substr(std::string(env_prefix).size());
    std::string pointer;
    std::size_t start = 0;
    while (start <= key.size()) {
      const auto sep = key.find("__", start);
      pointer += "/" + key.substr(start, sep == std::string::npos
                                             ? std::string::npos
                                             : sep - start);
      if (sep == std::string::npos) break;
      start = sep + 2;
    }
    j[json::json_pointer(pointer)] = parse_env_value(entry.substr(eq + 1));
  }
}

}  // namespace

RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw SchemaError("", "config is not valid JSON");

  apply_env_overrides(j);
  validate_config(j, command);

  RunConfig out;
  out.json = j;
  if (j.contains("seed")) out.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) out.out_dir = j["out"].get<std::string>();
  if (j.contains("threads")) out.threads = j["threads"].get<int>();
  return out;
}

CircuitParams circuit_from_config(const nlohmann::json& j) {
  const json& c = j.at("circuit");
  CircuitParams p;
  for (int i = 0; i < 3; ++i) p.ej[i] = c["ej"][i].get<double>();
  p.cg = c["cg"].get<double>();
  p.cc = c["cc"].get<double>();
  p.ci = c["ci"].get<double>();
  p.kappa = c["kappa"].get<double>();
  if (c.contains("cap_matrix")) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) {
        m(r, col) = c["cap_matrix"][r][col].get<double>();
      }
    }
    p.cap_override = m;
  }
  p.validate();
  return p;
}

BiasPoint bias_from_json(const nlohmann::json& j) {
  BiasPoint b;
  b.phi_b = j.at("phi_b").get<double>();
  for (int i = 0; i < 3; ++i) b.ng[i] = j.at("ng")[i].get<double>();
  b.validate();
  return b;
}

std::vector<double> grid_from_json(const nlohmann::json& j) {
  const double lo = j.at("lo").get<double>();
  const double hi = j.at("hi").get<double>();
  const int n = j.at("n").get<int>();
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  return out;
}

}  // namespace triring::io
