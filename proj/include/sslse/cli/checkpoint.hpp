#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sslse/ssl/pretrain.hpp"

namespace sslse::cli {

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
  /// Effective run configuration as compact JSON.
  std::string config_json;
  ssl::PretrainState state;
};

/// Little-endian layout:
///   "SSEE" | version u16 | blob length u32 + JSON {"config", "loss_history"}
///   | tensor count u32 | tensors | optimizer tensor count u32 | tensors
///   | epoch u32 | RNG state 4 x u64
/// tensor: name length u16 + name | dtype u8 (0 f32, 1 f64) | rank u8
///         | dims u32 each | data
/// Optimizer tensors are adam.m.<param>, adam.v.<param> for each contrastive
/// parameter and adam.step (f64, shape {1}).
std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ckpt);

/// Errors: BadMagic, VersionMismatch, BadCheckpoint, TruncatedPayload,
/// TrailingGarbage.
Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace sslse::cli
