#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "txnforge/abm.hpp"
#include "txnforge/features.hpp"

namespace txnforge::io {

/// FNV-1a 64-bit over raw bytes, rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

/// fnv1a64_hex of a file's bytes. Throws DataError when unreadable.
std::string hash_file(const std::filesystem::path& path);

/// 24-hour clock string for a step index: step 88 -> "22:00".
std::string step_to_hhmm(int step);

/// Per-file entry recorded in manifest.json.
struct FileStamp {
    std::string hash;       // fnv1a64 of the file bytes
    std::size_t rows = 0;   // data rows, header excluded (0 for JSON files)
};

struct RunArtifacts {
    std::filesystem::path dir;
    std::map<std::string, FileStamp> files;  // keyed by file name
};

/// Writes transactions.csv, agents.csv, config.json, manifest.json and,
/// for graph runs, edges.csv. Amounts are rendered with exactly two
/// decimals (generation quantizes to cents, so this is lossless); every
/// writer is deterministic, and the manifest carries no timestamps.
/// Throws IoError on write failures.
RunArtifacts write_run(const abm::SimRun& run, const std::filesystem::path& dir);

/// Reads a run back from write_run artifacts (config.json, agents.csv,
/// transactions.csv). Throws DataError on missing or malformed files.
abm::SimRun read_run(const std::filesystem::path& dir);

/// Recomputes the hash of every file listed in dir's manifest.json and
/// compares; returns the names of mismatched or missing files.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

/// config.json <-> ModelConfig. Field names mirror the struct exactly;
/// the nested params objects omit `label` (implied by their key).
/// Unknown keys are ConfigError; omitted params fields fall back to the
/// per-type defaults. `has_seed`/`has_model_kind` record whether those
/// keys were present, for the CLI's override chains.
struct LoadedConfig {
    abm::ModelConfig config;
    bool has_seed = false;
    bool has_model_kind = false;
};

LoadedConfig load_config(const std::filesystem::path& path);
void save_config(const abm::ModelConfig& config, const std::filesystem::path& path);

/// DOT digraph of a graph run. Suspicious nodes carry class="suspicious";
/// self-loops are kept. Without a window every agent gets a node line;
/// with --window style filtering (window_start_hour in [0,24)) only the
/// steps [4h, 4h+4) are exported and only agents incident to those edges
/// appear. Throws UnsupportedError for non-graph runs.
void export_graph_dot(const abm::SimRun& run, const std::filesystem::path& path,
                      std::optional<int> window_start_hour = std::nullopt);

/// Hand-assembled SVG histogram: one bar per bin per class (normal and
/// suspicious overlaid with distinct fills), axis labelled in hours.
/// Bars carry data-hour/data-count attributes. bin_hours must divide 24.
void plot_histogram_svg(const abm::SimRun& run, const std::filesystem::path& path,
                        int bin_hours = 1);

/// features.csv, header `agent_id,label,txn_mean_time,num_txns,in_degree,
/// out_degree`; txn_mean_time is empty for agents without events and is
/// rendered shortest-round-trip.
void write_features_csv(const std::vector<features::AgentFeatures>& rows,
                        const std::filesystem::path& path);
std::vector<features::AgentFeatures> read_features_csv(const std::filesystem::path& path);

} // namespace txnforge::io
