#pragma once
// Run directory layout under an output root:
//   <root>/<run-id>/config.yaml     byte copy of the config file used
//                   resolved.yaml   the config after overrides and defaults
//                   manifest.json   run id, config hash, overrides, layout
//                   metrics.csv
//                   checkpoints/

#include <filesystem>
#include <string>
#include <vector>

#include "asymdex/config.hpp"

namespace asymdex::cli {

struct RunManifest {
  std::string run_id;
  std::filesystem::path dir;
  std::string config_source;  // path of the config file as given
  std::string config_hash;    // git blob SHA-1 of the snapshot bytes
  std::vector<config::Override> overrides;

  std::filesystem::path config_snapshot() const { return dir / "config.yaml"; }
  std::filesystem::path resolved_config() const { return dir / "resolved.yaml"; }
  std::filesystem::path manifest_file() const { return dir / "manifest.json"; }
  std::filesystem::path metrics_file() const { return dir / "metrics.csv"; }
  std::filesystem::path checkpoint_dir() const { return dir / "checkpoints"; }
};

/// SHA-1 of "blob <size>\0<bytes>", lowercase hex.
std::string git_blob_sha1(const std::string& bytes);

/// Output root: the explicit value, else $ASYMDEX_OUTPUT_ROOT, else the config's
/// output_root, else "runs".
std::filesystem::path resolve_output_root(const std::string& explicit_root, const config::RunConfig& cfg);

/// Creates a fresh run directory named <task>-<variant>-<phase>-s<seed>-<n>
/// with the smallest unused n, and writes the snapshot, resolved config and
/// manifest.
RunManifest create_run(const std::filesystem::path& root, const std::string& config_path,
                       const std::string& config_bytes, const config::RunConfig& cfg,
                       const std::vector<config::Override>& overrides);

std::string manifest_json(const RunManifest& m, const config::RunConfig& cfg);

}  // namespace asymdex::cli
