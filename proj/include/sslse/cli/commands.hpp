#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sslse/cli/config.hpp"
#include "sslse/imaging/encode.hpp"

namespace sslse::cli {

struct CommandOptions {
  std::filesystem::path out_dir = "runs";
  /// pretrain: continue from this checkpoint.
  std::optional<std::filesystem::path> resume;
  /// finetune: encoder weights to probe.
  std::optional<std::filesystem::path> checkpoint;
  /// transfer: configuration of the fine-tuning corpus.
  std::optional<RunConfig> target;
  /// JSON-lines log sink besides the run directory's log.jsonl; null silences it.
  std::ostream* log = nullptr;
  /// Human-readable summary sink; null silences it.
  std::ostream* summary = nullptr;
};

/// Creates <out_dir>/<command>-<UTC timestamp>, adding a numeric suffix
/// rather than reusing an existing directory.
std::filesystem::path make_run_dir(const std::filesystem::path& out_dir, const std::string& command);

/// Images described by the ingest, window and imaging sections.
std::vector<imaging::EegImage> load_dataset(const RunConfig& cfg);

/// Each command returns its run directory, which holds config.json (the
/// effective configuration), log.jsonl and the command's outputs.
std::filesystem::path cmd_synth(const RunConfig& cfg, const CommandOptions& opts);     // recording.edf, recording.labels.json, manifest.jsonl
std::filesystem::path cmd_encode(const RunConfig& cfg, const CommandOptions& opts);    // images/*.eegimg, manifest.jsonl
std::filesystem::path cmd_pretrain(const RunConfig& cfg, const CommandOptions& opts);  // checkpoint.ssee, loss_history.jsonl
std::filesystem::path cmd_finetune(const RunConfig& cfg, const CommandOptions& opts);  // metrics.json
std::filesystem::path cmd_ablate(const RunConfig& cfg, const CommandOptions& opts);    // ablation.json, ablation.txt
std::filesystem::path cmd_transfer(const RunConfig& cfg, const CommandOptions& opts);  // metrics.json

/// Parses argv, dispatches, and maps failures to a categorized error line
/// on stderr. Returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace sslse::cli
