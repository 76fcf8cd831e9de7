#pragma once
// Versioned binary checkpoint:
//   magic "ASDXCKPT" (8 bytes), u32 version, u64 payload size, payload, u32 crc32(payload).
// The payload holds network sizes and parameters, log_std, the observation
// normalizer, the PPO settings, the current learning rate, the env-step count
// and the textual state of the random engine. Integers are little-endian
// int64, reals are IEEE-754 doubles.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "asymdex/gaussian_policy.hpp"
#include "asymdex/ppo.hpp"

namespace asymdex::rl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ActorCritic model;
  PpoConfig ppo;
  double lr = 0.0;
  long long env_steps = 0;
  std::mt19937_64 rng;
  std::string tag;  // free-form run description (task/variant)
};

std::string encode_checkpoint(const Checkpoint& c);
/// Throws std::runtime_error on bad magic, version, size or checksum.
Checkpoint decode_checkpoint(const std::string& bytes);

/// Writes to `path` through a temporary file and an atomic rename.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace asymdex::rl
