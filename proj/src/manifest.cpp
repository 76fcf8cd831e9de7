#include "asymdex/manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "asymdex/error.hpp"

namespace asymdex::cli {

namespace fs = std::filesystem;

std::string git_blob_sha1(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 && EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

fs::path resolve_output_root(const std::string& explicit_root, const config::RunConfig& cfg) {
  if (!explicit_root.empty()) return explicit_root;
  if (const char* env = std::getenv("ASYMDEX_OUTPUT_ROOT"); env && *env) return env;
  if (!cfg.output_root.empty()) return cfg.output_root;
  return "runs";
}

namespace {

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

std::string manifest_json(const RunManifest& m, const config::RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["run_id"] = m.run_id;
  j["config_source"] = m.config_source;
  j["config_sha1"] = m.config_hash;
  auto ov = nlohmann::ordered_json::array();
  for (const auto& o : m.overrides) ov.push_back({{"key", o.key}, {"value", o.value}});
  j["overrides"] = ov;
  j["task"] = std::string(sim::to_string(cfg.run.task));
  j["variant"] = std::string(spaces::to_string(cfg.run.variant));
  j["phase"] = std::string(train::to_string(cfg.run.phase));
  j["seed"] = cfg.run.seed;
  j["budget"] = cfg.run.budget;
  j["layout"] = {{"config", "config.yaml"},
                 {"resolved", "resolved.yaml"},
                 {"metrics", "metrics.csv"},
                 {"checkpoints", "checkpoints"}};
  return j.dump(2) + "\n";
}

RunManifest create_run(const fs::path& root, const std::string& config_path, const std::string& config_bytes,
                       const config::RunConfig& cfg, const std::vector<config::Override>& overrides) {
  fs::create_directories(root);
  const std::string stem = std::string(sim::to_string(cfg.run.task)) + "-" +
                           std::string(spaces::to_string(cfg.run.variant)) + "-" +
                           std::string(train::to_string(cfg.run.phase)) + "-s" + std::to_string(cfg.run.seed);
  RunManifest m;
  for (int n = 0;; ++n) {
    const std::string id = stem + "-" + std::to_string(n);
    // create_directory is the uniqueness test: it fails when the id is taken
    if (fs::create_directory(root / id)) {
      m.run_id = id;
      m.dir = root / id;
      break;
    }
    if (n > 100000) throw std::runtime_error("no free run id under " + root.string());
  }
  m.config_source = config_path;
  m.config_hash = git_blob_sha1(config_bytes);
  m.overrides = overrides;
  fs::create_directories(m.checkpoint_dir());
  write_file(m.config_snapshot(), config_bytes);
  write_file(m.resolved_config(), config::dump_run_config(cfg));
  write_file(m.manifest_file(), manifest_json(m, cfg));
  return m;
}

}  // namespace asymdex::cli
