#include "sslse/cli/config.hpp"

#include <algorithm>
#include <concepts>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "sslse/error.hpp"

namespace sslse::cli {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void parse_error(const std::string& msg) { throw Error(Errc::ConfigParse, msg); }

class Section {
 public:
  Section(const json& node, std::string path, std::initializer_list<const char*> keys) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) parse_error(where() + ": expected an object");
    for (const auto& [key, _] : node_.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        parse_error("unknown key '" + qualified(key) + "'");
      }
    }
  }

  const json* child(const char* key) const {
    const auto it = node_.find(key);
    return it == node_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void read(const char* key, double& out) const {
    if (const json* v = child(key)) out = as_double(*v, qualified(key));
  }
  template <std::unsigned_integral U>
    requires(!std::is_same_v<U, bool>)
  void read(const char* key, U& out) const {
    if (const json* v = child(key)) out = static_cast<U>(as_unsigned(*v, qualified(key)));
  }
  void read(const char* key, bool& out) const {
    if (const json* v = child(key)) {
      if (!v->is_boolean()) parse_error(qualified(key) + ": expected a boolean");
      out = v->get<bool>();
    }
  }
  void read(const char* key, std::string& out) const {
    if (const json* v = child(key)) out = as_string(*v, qualified(key));
  }
  template <typename T>
  void read(const char* key, std::optional<T>& out) const {
    if (child(key)) {
      T value{};
      read(key, value);
      out = value;
    }
  }

  static double as_double(const json& v, const std::string& where) {
    if (!v.is_number()) parse_error(where + ": expected a number");
    return v.get<double>();
  }
  static std::uint64_t as_unsigned(const json& v, const std::string& where) {
    if (!v.is_number_unsigned()) parse_error(where + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  static std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) parse_error(where + ": expected a string");
    return v.get<std::string>();
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& node_;
  std::string path_;
};

std::string resize_mode_name(imaging::ResizeMode mode) {
  return mode == imaging::ResizeMode::Bilinear ? "bilinear" : "nearest";
}

void read_synth(const Section& parent, IngestSection& ingest) {
  const json* node = parent.child("synth");
  if (!node) return;
  Section s(*node, "ingest.synth",
            {"classes", "windows_per_class", "sample_rate_hz", "channels", "noise_sigma", "seed", "window_s", "f0_hz",
             "delta_f_hz", "amplitude_uv"});
  auto& spec = ingest.synth;
  s.read("classes", spec.classes);
  s.read("windows_per_class", spec.windows_per_class);
  s.read("sample_rate_hz", spec.sample_rate_hz);
  s.read("channels", spec.channels);
  s.read("noise_sigma", spec.noise_sigma);
  s.read("seed", ingest.synth_seed);
  s.read("window_s", spec.window_s);
  s.read("f0_hz", spec.f0_hz);
  s.read("delta_f_hz", spec.delta_f_hz);
  s.read("amplitude_uv", spec.amplitude_uv);
}

void read_model(const json& node, model::EncoderConfig& m) {
  Section s(node, "model",
            {"input_channels", "stem_kernel", "stem_stride", "stage_channels", "blocks_per_stage", "se_enabled",
             "se_ratio", "embedding_dim", "projection_hidden", "projection_dim", "num_classes"});
  s.read("input_channels", m.input_channels);
  s.read("stem_kernel", m.stem_kernel);
  s.read("stem_stride", m.stem_stride);
  if (const json* stages = s.child("stage_channels")) {
    if (!stages->is_array()) parse_error("model.stage_channels: expected an array");
    m.stage_channels.clear();
    for (const auto& v : *stages) m.stage_channels.push_back(Section::as_unsigned(v, "model.stage_channels"));
  }
  s.read("blocks_per_stage", m.blocks_per_stage);
  s.read("se_enabled", m.se_enabled);
  s.read("se_ratio", m.se_ratio);
  s.read("embedding_dim", m.embedding_dim);
  s.read("projection_hidden", m.projection_hidden);
  s.read("projection_dim", m.projection_dim);
  s.read("num_classes", m.num_classes);
}

void read_ssl(const json& node, ssl::PretrainConfig& p) {
  Section s(node, "ssl", {"epochs", "batch_size", "learning_rate", "temperature", "augment", "checkpoint_every"});
  s.read("epochs", p.epochs);
  s.read("batch_size", p.batch_size);
  s.read("learning_rate", p.learning_rate);
  s.read("temperature", p.loss.temperature);
  s.read("checkpoint_every", p.checkpoint_every);
  if (const json* chain = s.child("augment")) {
    if (!chain->is_array()) parse_error("ssl.augment: expected an array");
    p.augment.steps.clear();
    for (std::size_t i = 0; i < chain->size(); ++i) {
      const std::string path = "ssl.augment[" + std::to_string(i) + "]";
      Section step(chain->at(i), path, {"op", "probability", "lo", "hi"});
      ssl::AugStep out;
      std::string op;
      step.read("op", op);
      if (op.empty()) parse_error(path + ".op: required");
      try {
        out.op = ssl::parse_aug_op(op);
      } catch (const Error& e) {
        parse_error(path + ".op: " + e.what());
      }
      step.read("probability", out.probability);
      step.read("lo", out.lo);
      step.read("hi", out.hi);
      p.augment.steps.push_back(out);
    }
  }
}

void read_eval(const json& node, eval::FinetuneConfig& f) {
  Section s(node, "eval",
            {"labeled_fraction", "labeled_count", "holdout_fraction", "epochs", "learning_rate", "batch_size",
             "freeze_encoder", "zero_init_head", "supervised_epochs", "supervised_learning_rate"});
  s.read("labeled_fraction", f.labeled_fraction);
  s.read("labeled_count", f.labeled_count);
  s.read("holdout_fraction", f.holdout_fraction);
  s.read("epochs", f.epochs);
  s.read("learning_rate", f.learning_rate);
  s.read("batch_size", f.batch_size);
  s.read("freeze_encoder", f.freeze_encoder);
  s.read("zero_init_head", f.zero_init_head);
  s.read("supervised_epochs", f.supervised_epochs);
  s.read("supervised_learning_rate", f.supervised_learning_rate);
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

ingest::SynthSpec RunConfig::synth_spec() const {
  ingest::SynthSpec spec = ingest.synth;
  spec.seed = ingest.synth_seed.value_or(seed);
  return spec;
}

ssl::PretrainConfig RunConfig::pretrain_config() const {
  ssl::PretrainConfig p = ssl;
  p.encoder = model;
  p.seed = seed;
  return p;
}

eval::FinetuneConfig RunConfig::finetune_config() const {
  eval::FinetuneConfig f = eval;
  f.seed = seed;
  return f;
}

imaging::EncodeOptions RunConfig::encode_options() const {
  return imaging::EncodeOptions{imaging.out_height, imaging.out_width, imaging.resize_mode};
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
  Section top(root, "", {"schema_version", "seed", "ingest", "window", "imaging", "model", "ssl", "eval"});
  const json* version = top.child("schema_version");
  if (!version) parse_error("schema_version is required");
  if (!version->is_number_integer() || version->get<std::int64_t>() != kSchemaVersion) {
    throw Error(Errc::SchemaVersionMismatch,
                "config schema_version " + version->dump() + ", this build reads " + std::to_string(kSchemaVersion));
  }

  RunConfig cfg;
  top.read("seed", cfg.seed);

  if (const json* node = top.child("ingest")) {
    Section s(*node, "ingest", {"source", "csv_rate_hz", "synth"});
    s.read("source", cfg.ingest.source);
    if (cfg.ingest.source && !base_dir.empty()) {
      const std::filesystem::path p(*cfg.ingest.source);
      if (p.is_relative()) cfg.ingest.source = (base_dir / p).lexically_normal().string();
    }
    s.read("csv_rate_hz", cfg.ingest.csv_rate_hz);
    read_synth(s, cfg.ingest);
  }
  if (const json* node = top.child("window")) {
    Section s(*node, "window", {"window_s", "segment_ms", "stride_s"});
    s.read("window_s", cfg.window.window_s);
    s.read("segment_ms", cfg.window.segment_ms);
    s.read("stride_s", cfg.window.stride_s);
  }
  if (const json* node = top.child("imaging")) {
    Section s(*node, "imaging", {"lut", "resize_mode", "out_height", "out_width", "out_dir", "png"});
    s.read("lut", cfg.imaging.lut);
    std::string mode = resize_mode_name(cfg.imaging.resize_mode);
    s.read("resize_mode", mode);
    try {
      cfg.imaging.resize_mode = imaging::parse_resize_mode(mode);
    } catch (const Error& e) {
      parse_error(std::string("imaging.resize_mode: ") + e.what());
    }
    s.read("out_height", cfg.imaging.out_height);
    s.read("out_width", cfg.imaging.out_width);
    s.read("out_dir", cfg.imaging.out_dir);
    s.read("png", cfg.imaging.png);
  }
  if (const json* node = top.child("model")) read_model(*node, cfg.model);
  if (const json* node = top.child("ssl")) read_ssl(*node, cfg.ssl);
  if (const json* node = top.child("eval")) read_eval(*node, cfg.eval);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingInput, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::filesystem::absolute(path).parent_path());
}

std::string config_to_json(const RunConfig& cfg) {
  json root;
  root["schema_version"] = kSchemaVersion;
  root["seed"] = cfg.seed;

  const auto& sp = cfg.ingest.synth;
  json synth;
  synth["classes"] = sp.classes;
  synth["windows_per_class"] = sp.windows_per_class;
  synth["sample_rate_hz"] = sp.sample_rate_hz;
  synth["channels"] = sp.channels;
  synth["noise_sigma"] = sp.noise_sigma;
  synth["seed"] = optional_json(cfg.ingest.synth_seed);
  synth["window_s"] = sp.window_s;
  synth["f0_hz"] = sp.f0_hz;
  synth["delta_f_hz"] = sp.delta_f_hz;
  synth["amplitude_uv"] = sp.amplitude_uv;
  root["ingest"] = {{"source", optional_json(cfg.ingest.source)}, {"csv_rate_hz", cfg.ingest.csv_rate_hz}, {"synth", synth}};

  root["window"] = {{"window_s", cfg.window.window_s},
                    {"segment_ms", cfg.window.segment_ms},
                    {"stride_s", optional_json(cfg.window.stride_s)}};
  root["imaging"] = {{"lut", cfg.imaging.lut},
                     {"resize_mode", resize_mode_name(cfg.imaging.resize_mode)},
                     {"out_height", cfg.imaging.out_height},
                     {"out_width", cfg.imaging.out_width},
                     {"out_dir", cfg.imaging.out_dir},
                     {"png", cfg.imaging.png}};

  const auto& m = cfg.model;
  root["model"] = {{"input_channels", m.input_channels},
                   {"stem_kernel", m.stem_kernel},
                   {"stem_stride", m.stem_stride},
                   {"stage_channels", m.stage_channels},
                   {"blocks_per_stage", m.blocks_per_stage},
                   {"se_enabled", m.se_enabled},
                   {"se_ratio", m.se_ratio},
                   {"embedding_dim", m.embedding_dim},
                   {"projection_hidden", m.projection_hidden},
                   {"projection_dim", m.projection_dim},
                   {"num_classes", m.num_classes}};

  json chain = json::array();
  for (const auto& step : cfg.ssl.augment.steps) {
    chain.push_back({{"op", ssl::aug_op_name(step.op)}, {"probability", step.probability}, {"lo", step.lo}, {"hi", step.hi}});
  }
  root["ssl"] = {{"epochs", cfg.ssl.epochs},
                 {"batch_size", cfg.ssl.batch_size},
                 {"learning_rate", cfg.ssl.learning_rate},
                 {"temperature", cfg.ssl.loss.temperature},
                 {"augment", chain},
                 {"checkpoint_every", cfg.ssl.checkpoint_every}};

  const auto& f = cfg.eval;
  root["eval"] = {{"labeled_fraction", f.labeled_fraction},
                  {"labeled_count", optional_json(f.labeled_count)},
                  {"holdout_fraction", f.holdout_fraction},
                  {"epochs", f.epochs},
                  {"learning_rate", f.learning_rate},
                  {"batch_size", f.batch_size},
                  {"freeze_encoder", f.freeze_encoder},
                  {"zero_init_head", f.zero_init_head},
                  {"supervised_epochs", f.supervised_epochs},
                  {"supervised_learning_rate", f.supervised_learning_rate}};
  return root.dump(2) + "\n";
}

}  // namespace sslse::cli
