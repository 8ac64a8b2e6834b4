#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "triring/classifier.hpp"
#include "triring/errors.hpp"
#include "triring/fitting.hpp"
#include "triring/io/config.hpp"
#include "triring/io/csv.hpp"
#include "triring/io/manifest.hpp"
#include "triring/rng.hpp"
#include "triring/scattering.hpp"
#include "triring/synthetic.hpp"
#include "triring/working_point.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace triring;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_crash = 1;
constexpr int exit_schema = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int threads = 0;
  std::string input_file;  // classify/fit input override
};

struct RunContext {
  io::RunConfig config;
  std::string command;
  fs::path out;
  std::uint64_t seed = 1;
  int threads = 1;
  io::RunManifest manifest;

  void note_input(const std::string& path) {
    manifest.inputs.push_back({path, io::sha256_file(path)});
  }

  std::string out_file(const std::string& name) {
    return (out / name).string();
  }

  void note_output(const std::string& path) {
    manifest.outputs.push_back(path);
  }

  void finish() {
    manifest.finished_utc = io::utc_now_iso8601();
    io::write_manifest((out / "manifest.json").string(), manifest);
  }
};

RunContext make_context(const CliOptions& cli, const std::string& command) {
  RunContext ctx;
  ctx.command = command;
  ctx.config = io::load_config(cli.config_path, command);
  if (cli.seed >= 0) ctx.config.seed = static_cast<std::uint64_t>(cli.seed);
  if (!cli.out_dir.empty()) ctx.config.out_dir = cli.out_dir;
  if (cli.threads > 0) ctx.config.threads = cli.threads;
  ctx.seed = ctx.config.seed;
  ctx.threads = std::max(1, ctx.config.threads);
  ctx.out = ctx.config.out_dir;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw IoError("cannot create output directory " + ctx.out.string());
  ctx.manifest.command = command;
  ctx.manifest.config_sha256 = io::sha256_hex(ctx.config.json.dump());
  ctx.manifest.started_utc = io::utc_now_iso8601();
  ctx.note_input(cli.config_path);
  return ctx;
}

std::vector<Sector> sectors_from(const json& j, const char* key) {
  std::vector<Sector> out;
  if (j.contains(key)) {
    for (const auto& s : j[key]) {
      out.push_back(sector_from_label(s.get<std::string>()));
    }
  } else {
    for (Sector s : all_sectors()) out.push_back(s);
  }
  return out;
}

FluxMap flux_map_from(const json& j) {
  FluxMap fm;
  fm.a = j.at("a").get<double>();
  fm.b = j.at("b").get<double>();
  if (j.contains("breakpoint")) fm.breakpoint = j["breakpoint"].get<double>();
  return fm;
}

std::array<double, 3> triple_from(const json& j) {
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json triple_json(const std::array<double, 3>& t) {
  return json::array({t[0], t[1], t[2]});
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

const char* kSmatrixColumns[] = {"s11", "s12", "s13", "s21", "s22",
                                 "s23", "s31", "s32", "s33"};

json metrics_json(const CirculationMetrics& m) {
  json j{{"peak_f_cw", m.f_cw},
         {"f_ccw_at_peak", m.f_ccw},
         {"r_at_peak", m.r},
         {"il_db", m.il_db},
         {"is_db", m.is_db},
         {"r_db", m.r_db},
         {"peak_frequency_ghz", m.peak_frequency},
         {"bandwidth_defined", m.bandwidth_defined}};
  if (m.bandwidth_defined) j["bandwidth_fwhm_ghz"] = m.bandwidth_fwhm;
  return j;
}

// ---------------------------------------------------------------------------
// spectrum: model transition lines vs flux-bias control (+ optional synthetic
// SNR map built on the same lines).
int cmd_spectrum(const CliOptions& cli) {
  RunContext ctx = make_context(cli, "spectrum");
  const json& blk = ctx.config.json["spectrum"];
  const CircuitParams params = io::circuit_from_config(ctx.config.json);
  const auto sectors = sectors_from(blk, "sectors");
  const FluxMap flux = flux_map_from(blk["flux_map"]);
  const auto ng_left = triple_from(blk["ng_left"]);
  const auto ng_right =
      blk.contains("ng_right") ? triple_from(blk["ng_right"]) : ng_left;
  const auto controls = io::grid_from_json(blk["control"]);
  const int m = blk.value("transitions", 5);
  const int cutoff = blk.value("cutoff", 8);

  const auto lines = model_spectrum_map(params, sectors, flux, ng_left,
                                        ng_right, controls, m, cutoff,
                                        ctx.threads);
  io::CsvTable table;
  table.header = {"control", "sector", "transition", "frequency_ghz"};
  for (const auto& ln : lines) {
    table.rows.push_back({io::format_double(ln.control),
                          sector_label(ln.sector),
                          std::to_string(ln.transition),
                          io::format_double(ln.freq)});
  }
  const auto lines_path = ctx.out_file("transition_lines.csv");
  io::write_csv(lines_path, table);
  ctx.note_output(lines_path);

  if (blk.contains("synth_map")) {
    const json& sm = blk["synth_map"];
    const auto freqs = io::grid_from_json(sm["freq"]);
    const double amplitude = sm["amplitude"].get<double>();
    const double linewidth =
        sm.value("linewidth_ghz", 2.0 * (freqs.back() - freqs.front()) /
                                      std::max<std::size_t>(freqs.size() - 1, 1));
    const auto map = synthesize_snr_map(params, sectors, flux, ng_left,
                                        ng_right, controls, freqs, amplitude,
                                        linewidth, m, ctx.seed, cutoff,
                                        ctx.threads);
    io::CsvTable mt;
    mt.header = {"control"};
    for (double f : map.freq) mt.header.push_back(io::format_double(f));
    for (std::size_t i = 0; i < map.control.size(); ++i) {
      std::vector<std::string> row{io::format_double(map.control[i])};
      for (std::size_t j = 0; j < map.freq.size(); ++j) {
        row.push_back(io::format_double(map.z(i, j)));
      }
      mt.rows.push_back(std::move(row));
    }
    const auto map_path = ctx.out_file("snr_map.csv");
    io::write_csv(map_path, mt);
    ctx.note_output(map_path);
  }
  ctx.finish();
  return exit_ok;
}

// ---------------------------------------------------------------------------
// smatrix: per-sector scattering spectra and circulation metrics.
int cmd_smatrix(const CliOptions& cli) {
  RunContext ctx = make_context(cli, "smatrix");
  const json& blk = ctx.config.json["smatrix"];
  const CircuitParams params = io::circuit_from_config(ctx.config.json);
  const BiasPoint bias = io::bias_from_json(blk["bias"]);
  const auto sectors = sectors_from(blk, "sectors");
  const auto grid = io::grid_from_json(blk["freq"]);
  SmatrixOptions opts;
  opts.cutoff = blk.value("cutoff", 8);

  io::CsvTable table;
  table.header = {"sector", "f_ghz"};
  for (const char* name : kSmatrixColumns) {
    table.header.push_back(std::string("re_") + name);
    table.header.push_back(std::string("im_") + name);
  }

  json metrics = json::object();
  double worst_unitarity = 0.0;
  for (Sector sector : sectors) {
    const auto spec = smatrix_spectrum(params, bias, sector, grid, opts);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> row{sector_label(sector),
                                   io::format_double(grid[i])};
      for (int e = 0; e < 9; ++e) {
        row.push_back(io::format_double(spec.matrices[i](e / 3, e % 3).real()));
        row.push_back(io::format_double(spec.matrices[i](e / 3, e % 3).imag()));
      }
      table.rows.push_back(std::move(row));
      if (blk.value("unitarity_audit", false)) {
        const Eigen::Matrix3cd dev =
            spec.matrices[i].adjoint() * spec.matrices[i] -
            Eigen::Matrix3cd::Identity();
        worst_unitarity =
            std::max(worst_unitarity, dev.cwiseAbs().maxCoeff());
      }
    }
    try {
      metrics[sector_label(sector)] = metrics_json(circulation_metrics(spec));
    } catch (const EvaluationError& e) {
      metrics[sector_label(sector)] = {{"error", e.what()}};
    }
  }
  if (blk.value("unitarity_audit", false)) {
    metrics["unitarity_audit"] = {{"max_deviation", worst_unitarity}};
  }

  const auto spec_path = ctx.out_file("smatrix_spectrum.csv");
  io::write_csv(spec_path, table);
  ctx.note_output(spec_path);
  const auto metrics_path = ctx.out_file("metrics.json");
  write_json_file(metrics_path, metrics);
  ctx.note_output(metrics_path);
  ctx.finish();
  return exit_ok;
}

// ---------------------------------------------------------------------------
// find-working-point: coarse-to-fine circulation search.
int cmd_find_working_point(const CliOptions& cli) {
  RunContext ctx = make_context(cli, "find-working-point");
  const json& blk = ctx.config.json["working_point"];
  const CircuitParams params = io::circuit_from_config(ctx.config.json);
  const Sector sector =
      blk.contains("sector") ? sector_from_label(blk["sector"]) : Sector::eee;

  WorkingPointSearch search;
  search.f_min = blk["band"]["lo"].get<double>();
  search.f_max = blk["band"]["hi"].get<double>();
  if (blk.contains("phi")) {
    search.phi_lo = blk["phi"]["lo"].get<double>();
    search.phi_hi = blk["phi"]["hi"].get<double>();
  }
  if (blk.contains("ng")) {
    search.ng_lo = blk["ng"]["lo"].get<double>();
    search.ng_hi = blk["ng"]["hi"].get<double>();
  }
  search.phi_steps = blk.value("phi_steps", search.phi_steps);
  search.ng_steps = blk.value("ng_steps", search.ng_steps);
  search.coarse_cutoff = blk.value("coarse_cutoff", search.coarse_cutoff);
  search.refine_cutoff = blk.value("refine_cutoff", search.refine_cutoff);
  search.final_cutoff = blk.value("final_cutoff", search.final_cutoff);
  search.top_candidates = blk.value("top_candidates", search.top_candidates);
  search.refine_iterations =
      blk.value("refine_iterations", search.refine_iterations);
  search.seed = ctx.seed;

  const auto res = find_working_point(params, sector, search, ctx.threads);

  json out{{"sector", sector_label(sector)},
           {"best",
            {{"phi_b", res.best.phi_b},
             {"ng", triple_json(res.best.ng)},
             {"metrics", metrics_json(res.metrics)}}},
           {"best_ccw",
            {{"phi_b", res.best_ccw.phi_b},
             {"ng", triple_json(res.best_ccw.ng)},
             {"metrics", metrics_json(res.metrics_ccw)}}},
           {"interior_optimum", res.interior_optimum}};
  if (!res.interior_optimum) {
    out["warning"] = "search budget exhausted without an interior optimum";
  }
  const auto wp_path = ctx.out_file("working_point.json");
  write_json_file(wp_path, out);
  ctx.note_output(wp_path);

  io::CsvTable trace;
  trace.header = {"rank",   "phi_b",     "ng1",
                  "ng2",    "ng3",       "peak_f_cw",
                  "peak_f_ccw", "peak_frequency_ghz"};
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const auto& c = res.trace[i];
    trace.rows.push_back({std::to_string(i),
                          io::format_double(c.bias.phi_b),
                          io::format_double(c.bias.ng[0]),
                          io::format_double(c.bias.ng[1]),
                          io::format_double(c.bias.ng[2]),
                          io::format_double(c.peak_f_cw),
                          io::format_double(c.peak_f_ccw),
                          io::format_double(c.peak_frequency)});
  }
  const auto trace_path = ctx.out_file("search_trace.csv");
  io::write_csv(trace_path, trace);
  ctx.note_output(trace_path);
  ctx.finish();
  return exit_ok;
}

// ---------------------------------------------------------------------------
// Time-series CSV schema shared by classify and synth.
void write_timeseries_csv(const std::string& path,
                          const SectorTimeSeries& series) {
  io::CsvTable table;
  table.header = {"t_index"};
  for (const char* name : kSmatrixColumns) {
    table.header.push_back(std::string("re_") + name);
    table.header.push_back(std::string("im_") + name);
  }
  if (series.true_labels) table.header.push_back("true_label");
  for (std::size_t t = 0; t < series.samples.size(); ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (int e = 0; e < 9; ++e) {
      row.push_back(io::format_double(series.samples[t][e].real()));
      row.push_back(io::format_double(series.samples[t][e].imag()));
    }
    if (series.true_labels) {
      row.push_back(std::to_string((*series.true_labels)[t]));
    }
    table.rows.push_back(std::move(row));
  }
  io::write_csv(path, table);
}

SectorTimeSeries read_timeseries_csv(const std::string& path, double tau_s) {
  const auto table = io::read_csv(path);
  const bool with_labels =
      !table.header.empty() && table.header.back() == "true_label";
  const std::size_t expected = 1 + 18 + (with_labels ? 1 : 0);
  if (table.header.size() != expected) {
    throw ParameterError(path + ": expected " + std::to_string(expected) +
                         " columns, got " + std::to_string(table.header.size()));
  }
  SectorTimeSeries series;
  series.tau_s = tau_s;
  series.samples.resize(table.rows.size());
  std::vector<int> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string ctx_str = path + " row " + std::to_string(r + 2);
    for (int e = 0; e < 9; ++e) {
      series.samples[r][e] = {
          io::parse_double(row[1 + 2 * e], ctx_str),
          io::parse_double(row[2 + 2 * e], ctx_str)};
    }
    if (with_labels) {
      labels.push_back(
          static_cast<int>(io::parse_double(row.back(), ctx_str)));
    }
  }
  if (with_labels) series.true_labels = std::move(labels);
  return series;
}

// classify: K-means sector classification of a scattering time series.
int cmd_classify(const CliOptions& cli) {
  RunContext ctx = make_context(cli, "classify");
  const json& blk = ctx.config.json["classify"];
  std::string input = blk["input"].get<std::string>();
  if (!cli.input_file.empty()) input = cli.input_file;
  const std::string sidecar =
      blk.contains("sidecar") ? blk["sidecar"].get<std::string>()
                              : input + ".meta.json";
  ctx.note_input(input);
  ctx.note_input(sidecar);

  double tau_s = 0.0;
  {
    std::ifstream in(sidecar);
    if (!in) throw IoError("cannot open sidecar " + sidecar);
    const json meta = json::parse(in, nullptr, false);
    if (meta.is_discarded() || !meta.contains("tau_s")) {
      throw SchemaError("/tau_s", "sidecar must carry tau_s");
    }
    tau_s = meta["tau_s"].get<double>();
  }

  const auto series = read_timeseries_csv(input, tau_s);
  const int k = blk.value("k", 4);
  if (k > static_cast<int>(series.samples.size())) {
    throw ParameterError("k exceeds the sample count");
  }
  const int restarts = blk.value("restarts", 8);
  const auto features = featurize(series);
  const auto cls =
      kmeans_classify(features, series, k, ctx.seed, restarts, ctx.threads);
  const auto dwell = dwell_statistics(cls.labels, tau_s, k);

  // labels CSV
  {
    io::CsvTable table;
    table.header = {"t_index", "label"};
    for (std::size_t t = 0; t < cls.labels.size(); ++t) {
      table.rows.push_back({std::to_string(t), std::to_string(cls.labels[t])});
    }
    const auto path = ctx.out_file("labels.csv");
    io::write_csv(path, table);
    ctx.note_output(path);
  }

  // per-sector averaged S-matrix CSV
  {
    io::CsvTable table;
    table.header = {"cluster", "n_samples"};
    for (const char* name : kSmatrixColumns) {
      table.header.push_back(std::string("re_") + name);
      table.header.push_back(std::string("im_") + name);
    }
    for (const char* name : kSmatrixColumns) {
      table.header.push_back(std::string("se_") + name);
    }
    for (int c = 0; c < k; ++c) {
      const auto avg = sector_average_smatrix(series, cls.labels, c);
      std::vector<std::string> row{std::to_string(c),
                                   std::to_string(avg.count)};
      for (int e = 0; e < 9; ++e) {
        row.push_back(io::format_double(avg.mean(e / 3, e % 3).real()));
        row.push_back(io::format_double(avg.mean(e / 3, e % 3).imag()));
      }
      for (int e = 0; e < 9; ++e) {
        row.push_back(io::format_double(avg.standard_error(e / 3, e % 3)));
      }
      table.rows.push_back(std::move(row));
    }
    const auto path = ctx.out_file("sector_smatrix.csv");
    io::write_csv(path, table);
    ctx.note_output(path);
  }

  // dwell statistics CSV
  {
    io::CsvTable table;
    table.header = {"cluster", "dwell_index", "length_samples",
                    "length_seconds"};
    for (int c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < dwell.dwells[c].size(); ++i) {
        table.rows.push_back({std::to_string(c), std::to_string(i),
                              std::to_string(dwell.dwells[c][i]),
                              io::format_double(dwell.dwells[c][i] * tau_s)});
      }
    }
    const auto path = ctx.out_file("dwell_statistics.csv");
    io::write_csv(path, table);
    ctx.note_output(path);
  }

  // cluster summary JSON
  json summary{{"k", k},
               {"seed", ctx.seed},
               {"restarts", restarts},
               {"inertia", cls.inertia},
               {"tau_s", tau_s}};
  json clusters = json::array();
  for (int c = 0; c < k; ++c) {
    json jc{{"cluster", c},
            {"count", cls.counts[c]},
            {"mean_dwell_samples", dwell.mean_dwell_samples[c]},
            {"mean_dwell_seconds", dwell.mean_dwell_seconds[c]}};
    json means = json::object();
    json ellipses = json::object();
    for (int e = 0; e < 9; ++e) {
      means[kSmatrixColumns[e]] =
          json::array({cls.means[c][e].real(), cls.means[c][e].imag()});
      // 2x2 (re, im) covariance projection per complex element.
      ellipses[kSmatrixColumns[e]] = json::array(
          {json::array({cls.covariances[c](2 * e, 2 * e),
                        cls.covariances[c](2 * e, 2 * e + 1)}),
           json::array({cls.covariances[c](2 * e + 1, 2 * e),
                        cls.covariances[c](2 * e + 1, 2 * e + 1)})});
    }
    jc["mean"] = means;
    jc["covariance_projection"] = ellipses;
    clusters.push_back(std::move(jc));
  }
  summary["clusters"] = clusters;

  // transition counts
  json trans = json::array();
  for (int a = 0; a < k; ++a) {
    json row = json::array();
    for (int b = 0; b < k; ++b) row.push_back(dwell.transitions(a, b));
    trans.push_back(row);
  }
  summary["transition_counts"] = trans;

  // accuracy against carried truth labels, when present
  if (series.true_labels) {
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    double best = 0.0;
    std::sort(perm.begin(), perm.end());
    do {
      int hits = 0;
      for (std::size_t i = 0; i < cls.labels.size(); ++i) {
        if (perm[cls.labels[i]] == (*series.true_labels)[i]) ++hits;
      }
      best = std::max(best,
                      static_cast<double>(hits) / cls.labels.size());
    } while (std::next_permutation(perm.begin(), perm.end()) && k <= 6);
    summary["accuracy"] = best;
  }

  const auto path = ctx.out_file("classification.json");
  write_json_file(path, summary);
  ctx.note_output(path);
  ctx.finish();
  return exit_ok;
}

// ---------------------------------------------------------------------------
// fit: circuit parameters from ridge points or an SNR map.
int cmd_fit(const CliOptions& cli) {
  RunContext ctx = make_context(cli, "fit");
  const json& blk = ctx.config.json["fit"];
  std::string input = blk["input"].get<std::string>();
  if (!cli.input_file.empty()) input = cli.input_file;
  ctx.note_input(input);

  FitProblem prob;
  const std::string kind = blk.value("input_kind", "ridges");
  if (kind == "ridges") {
    const auto table = io::read_csv(input);
    if (table.header !=
        std::vector<std::string>{"control", "frequency_ghz", "weight"}) {
      throw ParameterError(input + ": expected columns control,frequency_ghz,weight");
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string ctx_str = input + " row " + std::to_string(r + 2);
      prob.points.push_back({io::parse_double(table.rows[r][0], ctx_str),
                             io::parse_double(table.rows[r][1], ctx_str),
                             io::parse_double(table.rows[r][2], ctx_str)});
    }
  } else {
    const auto table = io::read_csv(input);
    SnrMap map;
    for (std::size_t j = 1; j < table.header.size(); ++j) {
      map.freq.push_back(io::parse_double(table.header[j], input + " header"));
    }
    map.z.resize(table.rows.size(), map.freq.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string ctx_str = input + " row " + std::to_string(r + 2);
      map.control.push_back(io::parse_double(table.rows[r][0], ctx_str));
      for (std::size_t j = 1; j < table.rows[r].size(); ++j) {
        map.z(r, j - 1) = io::parse_double(table.rows[r][j], ctx_str);
      }
    }
    map.validate();
    prob.points = extract_ridges(map, blk.value("threshold", 5.0),
                                 blk.value("min_separation_ghz", 0.05));
  }
  if (prob.points.size() < 10) {
    throw ParameterError("fit needs at least 10 ridge points, got " +
                         std::to_string(prob.points.size()));
  }

  prob.init = io::circuit_from_config(ctx.config.json);
  prob.flux_guess = flux_map_from(blk["flux_guess"]);
  if (blk.contains("ng_left_init")) {
    prob.ng_left_init = triple_from(blk["ng_left_init"]);
  }
  if (blk.contains("ng_right_init")) {
    prob.ng_right_init = triple_from(blk["ng_right_init"]);
  } else {
    prob.ng_right_init = prob.ng_left_init;
  }
  prob.sectors = sectors_from(blk, "sectors");
  prob.m_transitions = blk.value("transitions", 3);
  prob.cutoff = blk.value("cutoff", 4);
  prob.restarts = blk.value("restarts", 2);
  prob.max_iterations = blk.value("max_iterations", 2500);
  prob.seed = ctx.seed;
  if (blk.contains("ej_bound")) {
    prob.ej_bound = {blk["ej_bound"][0].get<double>(),
                     blk["ej_bound"][1].get<double>()};
  }
  if (blk.contains("ec_bound")) {
    prob.ec_bound = {blk["ec_bound"][0].get<double>(),
                     blk["ec_bound"][1].get<double>()};
  }
  if (blk.contains("a_bound")) {
    prob.a_bound = {blk["a_bound"][0].get<double>(),
                    blk["a_bound"][1].get<double>()};
  }
  if (blk.contains("b_bound")) {
    prob.b_bound = {blk["b_bound"][0].get<double>(),
                    blk["b_bound"][1].get<double>()};
  }

  const auto res = fit_parameters(prob, ctx.threads);

  json out{{"ej", triple_json(res.ej)},
           {"ec_sigma_ghz", res.ec_sigma},
           {"flux_map",
            {{"a", res.flux.a}, {"b", res.flux.b}}},
           {"ng_left", triple_json(res.ng_left)},
           {"ng_right", triple_json(res.ng_right)},
           {"residual_rms_ghz", res.residual_rms},
           {"iterations", res.iterations},
           {"evaluations", res.evaluations},
           {"converged", res.converged},
           {"warnings", res.warnings},
           {"n_points", prob.points.size()}};
  if (res.flux.breakpoint) out["flux_map"]["breakpoint"] = *res.flux.breakpoint;
  const auto path = ctx.out_file("fit_result.json");
  write_json_file(path, out);
  ctx.note_output(path);
  ctx.finish();
  return res.converged ? exit_ok : exit_numeric;
}

// ---------------------------------------------------------------------------
// synth: ground-truth-labeled synthetic data (time series and/or SNR map).
int cmd_synth(const CliOptions& cli) {
  RunContext ctx = make_context(cli, "synth");
  const json& blk = ctx.config.json["synth"];
  const CircuitParams params = io::circuit_from_config(ctx.config.json);

  if (blk.contains("timeseries")) {
    const json& ts = blk["timeseries"];
    SectorChainSpec chain;
    chain.k = 4;
    chain.mean_dwell = {ts["mean_dwell"][0].get<double>(),
                        ts["mean_dwell"][1].get<double>(),
                        ts["mean_dwell"][2].get<double>(),
                        ts["mean_dwell"][3].get<double>()};
    if (ts.contains("initial")) {
      chain.initial = {ts["initial"][0].get<double>(),
                       ts["initial"][1].get<double>(),
                       ts["initial"][2].get<double>(),
                       ts["initial"][3].get<double>()};
    }
    chain.seed = ctx.seed;

    const BiasPoint bias = io::bias_from_json(ts["bias"]);
    const double f = ts["drive_freq"].get<double>();
    SmatrixOptions opts;
    opts.cutoff = ts.value("cutoff", 8);
    std::vector<Eigen::Matrix3cd> sector_s;
    for (Sector s : all_sectors()) {
      sector_s.push_back(smatrix(params, bias, s, f, opts).s);
    }
    const auto labels =
        simulate_sector_chain(chain, ts["length"].get<int>());
    const auto series = synthesize_timeseries(
        labels, sector_s, {ts["noise_sigma"].get<double>()},
        ts["tau_s"].get<double>(), derive_seed(ctx.seed, 1));

    const auto csv_path = ctx.out_file("timeseries.csv");
    write_timeseries_csv(csv_path, series);
    ctx.note_output(csv_path);
    const auto meta_path = ctx.out_file("timeseries.csv.meta.json");
    json meta;
    meta["version"] = 1;
    meta["tau_s"] = series.tau_s;
    meta["port_switch_interval_s"] = series.tau_s / 3.0;
    meta["seed"] = ctx.seed;
    write_json_file(meta_path, meta);
    ctx.note_output(meta_path);
  }

  if (blk.contains("snr_map")) {
    const json& sm = blk["snr_map"];
    const auto controls = io::grid_from_json(sm["control"]);
    const auto freqs = io::grid_from_json(sm["freq"]);
    const FluxMap flux = flux_map_from(sm["flux_map"]);
    const auto ng_left = triple_from(sm["ng_left"]);
    const auto ng_right =
        sm.contains("ng_right") ? triple_from(sm["ng_right"]) : ng_left;
    const auto sectors = sectors_from(sm, "sectors");
    const double linewidth = sm.value(
        "linewidth_ghz",
        2.0 * (freqs.back() - freqs.front()) /
            std::max<std::size_t>(freqs.size() - 1, 1));
    const auto map = synthesize_snr_map(
        params, sectors, flux, ng_left, ng_right, controls, freqs,
        sm["amplitude"].get<double>(), linewidth, sm.value("transitions", 3),
        derive_seed(ctx.seed, 2), sm.value("cutoff", 6), ctx.threads);
    io::CsvTable mt;
    mt.header = {"control"};
    for (double f : map.freq) mt.header.push_back(io::format_double(f));
    for (std::size_t i = 0; i < map.control.size(); ++i) {
      std::vector<std::string> row{io::format_double(map.control[i])};
      for (std::size_t j = 0; j < map.freq.size(); ++j) {
        row.push_back(io::format_double(map.z(i, j)));
      }
      mt.rows.push_back(std::move(row));
    }
    const auto map_path = ctx.out_file("snr_map.csv");
    io::write_csv(map_path, mt);
    ctx.note_output(map_path);
  }
  ctx.finish();
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-island superconducting ring circulator simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOptions cli;
  app.add_option("--config", cli.config_path, "JSON run configuration")
      ->required();
  app.add_option("--seed", cli.seed, "Override the config seed");
  app.add_option("--out", cli.out_dir, "Override the output directory");
  app.add_option("--threads", cli.threads, "Worker thread count");

  auto* spectrum = app.add_subcommand(
      "spectrum", "Model transition lines vs flux-bias control");
  auto* smatrix_cmd = app.add_subcommand(
      "smatrix", "Scattering spectra and circulation metrics");
  auto* wp = app.add_subcommand("find-working-point",
                                "Search for the circulation working point");
  auto* classify =
      app.add_subcommand("classify", "K-means quasiparticle sector classifier");
  classify->add_option("input", cli.input_file, "Time-series CSV");
  auto* fit =
      app.add_subcommand("fit", "Fit circuit parameters to spectroscopy data");
  fit->add_option("input", cli.input_file, "Ridge CSV or SNR map CSV");
  auto* synth =
      app.add_subcommand("synth", "Generate labeled synthetic data");

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed()) return cmd_spectrum(cli);
    if (smatrix_cmd->parsed()) return cmd_smatrix(cli);
    if (wp->parsed()) return cmd_find_working_point(cli);
    if (classify->parsed()) return cmd_classify(cli);
    if (fit->parsed()) return cmd_fit(cli);
    if (synth->parsed()) return cmd_synth(cli);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return exit_schema;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return exit_schema;
  } catch (const SolverError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_crash;
  }
  return exit_crash;
}
