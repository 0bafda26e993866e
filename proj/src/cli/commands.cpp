#include "sslse/cli/commands.hpp"

#include <cctype>
#include <chrono>
#include <map>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sslse/cli/checkpoint.hpp"
#include "sslse/error.hpp"
#include "sslse/imaging/io.hpp"
#include "sslse/imaging/lut.hpp"
#include "sslse/ingest/csv.hpp"
#include "sslse/ingest/edf.hpp"

namespace sslse::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class RunLog {
 public:
  RunLog(const fs::path& dir, const CommandOptions& opts) : file_(dir / "log.jsonl"), opts_(opts) {
    if (!file_) throw Error(Errc::Io, "cannot write " + (dir / "log.jsonl").string());
  }

  void event(const std::string& name, json fields = json::object()) {
    json line;
    line["event"] = name;
    for (auto& [k, v] : fields.items()) line[k] = v;
    const std::string text = line.dump();
    file_ << text << '\n';
    file_.flush();
    if (opts_.log) *opts_.log << text << std::endl;
  }

  void summary(const std::string& text) {
    if (opts_.summary) *opts_.summary << text << std::flush;
  }

 private:
  std::ofstream file_;
  const CommandOptions& opts_;
};

struct Run {
  fs::path dir;
  RunLog log;
};

Run start_run(const RunConfig& cfg, const CommandOptions& opts, const std::string& command) {
  const fs::path dir = make_run_dir(opts.out_dir, command);
  std::ofstream(dir / "config.json") << config_to_json(cfg);
  Run run{dir, RunLog(dir, opts)};
  run.log.event("start", {{"command", command}, {"run_dir", dir.string()}, {"seed", cfg.seed}});
  return run;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  const auto bytes = imaging::read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

std::string labels_sidecar(const ingest::EegRecording& rec) {
  json labels = json::array();
  for (const auto& [index, label] : rec.window_labels) labels.push_back({index, label});
  json j;
  j["label_window_s"] = rec.label_window_s;
  j["num_classes"] = rec.num_classes;
  j["window_labels"] = labels;
  return j.dump() + "\n";
}

void apply_labels_sidecar(ingest::EegRecording& rec, const fs::path& path) {
  try {
    const auto j = json::parse(read_text(path));
    rec.label_window_s = j.at("label_window_s").get<double>();
    rec.num_classes = j.at("num_classes").get<std::size_t>();
    rec.window_labels.clear();
    for (const auto& pair : j.at("window_labels")) {
      rec.window_labels[pair.at(0).get<std::size_t>()] = pair.at(1).get<int>();
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigParse, path.string() + ": " + e.what());
  }
  rec.validate();
}

std::string file_stem_for(const imaging::EegImage& img) {
  std::string stem;
  for (char c : img.source_id) stem += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  if (stem.empty()) stem = "recording";
  std::ostringstream name;
  name << stem << "-w" << std::setw(6) << std::setfill('0') << img.window_index;
  return name.str();
}

void check_encoder_tensors(const model::ParamSet<float>& loaded, const model::EncoderConfig& encoder) {
  const auto expected = model::init_params<float>(encoder, 0);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& name = expected.names()[i];
    if (name.starts_with(model::kHeadPrefix)) continue;
    if (!loaded.contains(name)) throw Error(Errc::BadCheckpoint, "checkpoint lacks " + name + " required by the model config");
    if (loaded.at(name).shape() != expected.tensors()[i].shape()) {
      throw Error(Errc::BadCheckpoint, name + " is " + ad::shape_string(loaded.at(name).shape()) + " in the checkpoint, " +
                                           ad::shape_string(expected.tensors()[i].shape()) + " in the model config");
    }
  }
}

json parse_json(const std::string& text) { return json::parse(text); }

}  // namespace

fs::path make_run_dir(const fs::path& out_dir, const std::string& command) {
  fs::create_directories(out_dir);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream base;
  base << command << '-' << std::put_time(&utc, "%Y%m%dT%H%M%SZ");
  for (int attempt = 0;; ++attempt) {
    const fs::path dir = out_dir / (attempt == 0 ? base.str() : base.str() + "-" + std::to_string(attempt));
    if (fs::create_directory(dir)) return dir;
  }
}

std::vector<imaging::EegImage> load_dataset(const RunConfig& cfg) {
  if (cfg.ingest.source) {
    const fs::path source(*cfg.ingest.source);
    if (!fs::exists(source)) throw Error(Errc::MissingInput, "ingest.source " + source.string() + " not found");
    const std::string ext = source.extension().string();
    if (ext == ".jsonl") return imaging::load_manifest_images(source);

    ingest::EegRecording rec;
    if (ext == ".edf" || ext == ".EDF") {
      rec = ingest::parse_edf(imaging::read_file_bytes(source));
    } else if (ext == ".csv") {
      rec = ingest::parse_csv(read_text(source), cfg.ingest.csv_rate_hz);
    } else {
      throw Error(Errc::ConfigParse, "ingest.source: unsupported file type '" + ext + "' (expected .edf, .csv or .jsonl)");
    }
    if (rec.source_id.empty()) rec.source_id = source.stem().string();
    fs::path sidecar = source;
    sidecar.replace_extension(".labels.json");
    if (fs::exists(sidecar)) apply_labels_sidecar(rec, sidecar);
    return imaging::encode_recording(rec, cfg.window, imaging::resolve_lut(cfg.imaging.lut), cfg.encode_options());
  }
  const auto rec = ingest::synthesize_recording(cfg.synth_spec());
  return imaging::encode_recording(rec, cfg.window, imaging::resolve_lut(cfg.imaging.lut), cfg.encode_options());
}

fs::path cmd_synth(const RunConfig& cfg, const CommandOptions& opts) {
  auto run = start_run(cfg, opts, "synth");
  const auto rec = ingest::synthesize_recording(cfg.synth_spec());
  imaging::write_file_bytes(run.dir / "recording.edf", ingest::write_edf(rec));
  write_text(run.dir / "recording.labels.json", labels_sidecar(rec));

  json entry;
  entry["file"] = "recording.edf";
  entry["labels"] = "recording.labels.json";
  entry["source_id"] = rec.source_id;
  entry["sample_rate_hz"] = rec.sample_rate_hz;
  entry["channels"] = rec.channel_count();
  entry["samples"] = rec.sample_count();
  write_text(run.dir / "manifest.jsonl", entry.dump() + "\n");

  run.log.event("recording", entry);
  run.log.event("done", {{"run_dir", run.dir.string()}});
  run.log.summary("synth: " + std::to_string(rec.sample_count()) + " samples x " + std::to_string(rec.channel_count()) +
              " channels, " + std::to_string(rec.window_labels.size()) + " labeled windows -> " + run.dir.string() + "\n");
  return run.dir;
}

fs::path cmd_encode(const RunConfig& cfg, const CommandOptions& opts) {
  auto run = start_run(cfg, opts, "encode");
  const auto images = load_dataset(cfg);
  const fs::path image_dir = run.dir / cfg.imaging.out_dir;
  fs::create_directories(image_dir);

  std::string manifest;
  std::size_t labeled = 0;
  for (const auto& img : images) {
    const std::string stem = file_stem_for(img);
    const fs::path rel = fs::path(cfg.imaging.out_dir) / (stem + ".eegimg");
    imaging::write_image(run.dir / rel, img);
    if (cfg.imaging.png) imaging::write_png(image_dir / (stem + ".png"), img.image);
    manifest += imaging::manifest_line(
        imaging::ManifestEntry{rel.generic_string(), img.label, img.source_id, static_cast<std::uint32_t>(img.window_index)});
    manifest += '\n';
    if (img.label) ++labeled;
  }
  write_text(run.dir / "manifest.jsonl", manifest);

  run.log.event("encoded", {{"images", images.size()}, {"labeled", labeled}});
  run.log.event("done", {{"run_dir", run.dir.string()}});
  run.log.summary("encode: " + std::to_string(images.size()) + " images (" + std::to_string(labeled) + " labeled) -> " +
              run.dir.string() + "\n");
  return run.dir;
}

fs::path cmd_pretrain(const RunConfig& cfg, const CommandOptions& opts) {
  auto run = start_run(cfg, opts, "pretrain");
  const auto images = load_dataset(cfg);
  const auto pcfg = cfg.pretrain_config();
  const std::string snapshot = parse_json(config_to_json(cfg)).dump();

  ssl::PretrainState state;
  if (opts.resume) {
    auto ckpt = read_checkpoint(*opts.resume);
    check_encoder_tensors(ckpt.state.params, pcfg.encoder);
    state = std::move(ckpt.state);
    run.log.event("resume", {{"checkpoint", opts.resume->string()}, {"epoch", state.epoch}});
  } else {
    state = ssl::start_pretrain(pcfg);
  }

  ssl::PretrainHooks hooks;
  hooks.on_warning = [&](std::string_view msg) { run.log.event("warning", {{"message", std::string(msg)}}); };
  hooks.on_epoch = [&](const ssl::PretrainState& st, const ssl::EpochRecord& rec) {
    auto fields = parse_json(ssl::epoch_json(rec));
    run.log.event("epoch", fields);
    if (pcfg.checkpoint_every && rec.epoch % pcfg.checkpoint_every == 0) {
      write_checkpoint(run.dir / ("checkpoint-epoch" + std::to_string(rec.epoch) + ".ssee"), Checkpoint{snapshot, st});
    }
  };
  run.log.event("dataset", {{"images", images.size()}});
  ssl::continue_pretrain(state, images, pcfg, hooks);

  write_checkpoint(run.dir / "checkpoint.ssee", Checkpoint{snapshot, state});
  std::string history;
  for (const auto& rec : state.history) history += ssl::epoch_json(rec) + "\n";
  write_text(run.dir / "loss_history.jsonl", history);

  run.log.event("done", {{"run_dir", run.dir.string()}, {"epochs", state.epoch}});
  std::ostringstream summary;
  summary << "pretrain: " << state.epoch << " epochs on " << images.size() << " images";
  if (!state.history.empty()) summary << ", final loss " << state.history.back().mean_loss;
  summary << " -> " << run.dir.string() << "\n";
  run.log.summary(summary.str());
  return run.dir;
}

fs::path cmd_finetune(const RunConfig& cfg, const CommandOptions& opts) {
  if (!opts.checkpoint) throw Error(Errc::MissingInput, "finetune needs --checkpoint");
  auto run = start_run(cfg, opts, "finetune");
  const auto ckpt = read_checkpoint(*opts.checkpoint);
  check_encoder_tensors(ckpt.state.params, cfg.model);
  const auto images = load_dataset(cfg);
  const auto result = eval::finetune(ckpt.state.params, cfg.model, images, cfg.finetune_config());
  const std::string metrics = result.report.to_json();
  write_text(run.dir / "metrics.json", metrics + "\n");

  run.log.event("split", {{"labeled", result.plan.labeled.size()},
                          {"train", result.plan.train.size()},
                          {"heldout", result.plan.heldout.size()}});
  run.log.event("metrics", parse_json(metrics));
  run.log.event("done", {{"run_dir", run.dir.string()}});
  std::ostringstream summary;
  summary << std::fixed << std::setprecision(2) << "finetune: held-out accuracy " << 100.0 * result.report.accuracy
          << "%, macro F1 " << std::setprecision(4) << result.report.macro_f1 << " (n=" << result.report.n << ") -> "
          << run.dir.string() << "\n";
  run.log.summary(summary.str());
  return run.dir;
}

fs::path cmd_ablate(const RunConfig& cfg, const CommandOptions& opts) {
  auto run = start_run(cfg, opts, "ablate");
  const auto images = load_dataset(cfg);
  const auto report = eval::run_ablation(images, eval::AblationConfig{cfg.pretrain_config(), cfg.finetune_config()});
  write_text(run.dir / "ablation.json", report.to_json() + "\n");
  write_text(run.dir / "ablation.txt", report.table());
  for (const auto& cell : report.cells) run.log.event("metrics", parse_json(cell.report.to_json()));
  run.log.event("done", {{"run_dir", run.dir.string()}});
  run.log.summary(report.table() + "-> " + run.dir.string() + "\n");
  return run.dir;
}

fs::path cmd_transfer(const RunConfig& cfg, const CommandOptions& opts) {
  if (!opts.target) throw Error(Errc::MissingInput, "transfer needs --target-config");
  auto run = start_run(cfg, opts, "transfer");
  write_text(run.dir / "target_config.json", config_to_json(*opts.target));
  const auto source = load_dataset(cfg);
  const auto target = load_dataset(*opts.target);
  const auto result = eval::run_transfer(source, target, eval::AblationConfig{cfg.pretrain_config(), opts.target->finetune_config()},
                                         opts.target->model.num_classes);
  const std::string metrics = result.report.to_json();
  write_text(run.dir / "metrics.json", metrics + "\n");
  run.log.event("metrics", parse_json(metrics));
  run.log.event("done", {{"run_dir", run.dir.string()}});
  std::ostringstream summary;
  summary << std::fixed << std::setprecision(2) << "transfer: held-out accuracy " << 100.0 * result.report.accuracy
          << "%, macro F1 " << std::setprecision(4) << result.report.macro_f1 << " -> " << run.dir.string() << "\n";
  run.log.summary(summary.str());
  return run.dir;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"EEG-to-image self-supervised encoder pipeline"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "runs";
    std::optional<std::string> se;
    std::optional<std::size_t> epochs;
    std::optional<std::string> resume;
    std::optional<std::string> checkpoint;
    std::optional<std::string> target_config;
  } flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration")->required();
    sub->add_option("--seed", flags.seed, "override the top-level seed");
    sub->add_option("--out", flags.out, "parent directory for run directories")->capture_default_str();
    sub->add_option("--se", flags.se, "override model.se_enabled")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--epochs", flags.epochs, "override ssl.epochs");
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"synth", "write a synthetic labeled recording as EDF"},
      {"encode", "turn recordings into .eegimg files and a manifest"},
      {"pretrain", "contrastive pretraining of encoder and projection head"},
      {"finetune", "linear probe on a pretrained encoder"},
      {"ablate", "SE on/off x SSL/supervised grid"},
      {"transfer", "pretrain on one corpus, fine-tune on another"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    subs[name] = app.add_subcommand(name, help);
    add_common(subs[name]);
  }
  subs["pretrain"]->add_option("--resume", flags.resume, "continue from a checkpoint");
  subs["finetune"]->add_option("--checkpoint", flags.checkpoint, "pretrained checkpoint")->required();
  subs["transfer"]->add_option("--target-config", flags.target_config, "configuration of the fine-tuning corpus")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto apply = [&](RunConfig c) {
      if (flags.seed) c.seed = *flags.seed;
      if (flags.se) c.model.se_enabled = *flags.se == "on";
      if (flags.epochs) c.ssl.epochs = *flags.epochs;
      return c;
    };
    const RunConfig cfg = apply(load_config(flags.config));
    CommandOptions opts;
    opts.out_dir = flags.out;
    opts.log = &std::cout;
    opts.summary = &std::cerr;
    if (flags.resume) opts.resume = fs::path(*flags.resume);
    if (flags.checkpoint) opts.checkpoint = fs::path(*flags.checkpoint);
    if (flags.target_config) opts.target = apply(load_config(*flags.target_config));

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "synth") cmd_synth(cfg, opts);
    else if (name == "encode") cmd_encode(cfg, opts);
    else if (name == "pretrain") cmd_pretrain(cfg, opts);
    else if (name == "finetune") cmd_finetune(cfg, opts);
    else if (name == "ablate") cmd_ablate(cfg, opts);
    else cmd_transfer(cfg, opts);
    return 0;
  } catch (const Error& e) {
    std::cerr << "sslse: error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sslse: error: Internal: " << e.what() << std::endl;
    return 3;
  }
}

}  // namespace sslse::cli
