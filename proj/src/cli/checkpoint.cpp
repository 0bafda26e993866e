#include "sslse/cli/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "json.hpp"
#include "sslse/error.hpp"
#include "sslse/imaging/io.hpp"

namespace sslse::cli {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'S', 'S', 'E', 'E'};
constexpr std::uint8_t kF32 = 0;
constexpr std::uint8_t kF64 = 1;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  std::vector<std::uint8_t>& result() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  const std::uint8_t* take(std::size_t n) {
    if (in_.size() - pos_ < n) {
      throw Error(Errc::TruncatedPayload, "checkpoint ends at byte " + std::to_string(in_.size()) + ", needed " +
                                              std::to_string(pos_ + n));
    }
    const auto* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

template <typename T>
void put_tensor(Writer& w, const std::string& name, const ad::Tensor<T>& t) {
  if (name.size() > std::numeric_limits<std::uint16_t>::max()) throw Error(Errc::BadCheckpoint, "tensor name too long");
  w.put(static_cast<std::uint16_t>(name.size()));
  w.bytes(name.data(), name.size());
  w.put(std::is_same_v<T, float> ? kF32 : kF64);
  w.put(static_cast<std::uint8_t>(t.rank()));
  for (std::size_t d : t.shape()) w.put(static_cast<std::uint32_t>(d));
  w.bytes(t.data().data(), t.size() * sizeof(T));
}

struct RawTensor {
  std::string name;
  std::uint8_t dtype = kF32;
  ad::Shape shape;
  const std::uint8_t* data = nullptr;
};

RawTensor get_tensor(Reader& r) {
  RawTensor t;
  const auto len = r.get<std::uint16_t>();
  const auto* name = r.take(len);
  t.name.assign(reinterpret_cast<const char*>(name), len);
  t.dtype = r.get<std::uint8_t>();
  if (t.dtype != kF32 && t.dtype != kF64) {
    throw Error(Errc::BadCheckpoint, "tensor " + t.name + " has dtype tag " + std::to_string(t.dtype));
  }
  const auto rank = r.get<std::uint8_t>();
  for (std::uint8_t i = 0; i < rank; ++i) t.shape.push_back(r.get<std::uint32_t>());
  t.data = r.take(ad::numel(t.shape) * (t.dtype == kF32 ? 4 : 8));
  return t;
}

ad::Tensor<float> to_f32(const RawTensor& raw) {
  if (raw.dtype != kF32) throw Error(Errc::BadCheckpoint, "tensor " + raw.name + " must be f32");
  ad::Tensor<float> t(raw.shape);
  std::memcpy(t.data().data(), raw.data, t.size() * sizeof(float));
  return t;
}

std::vector<std::string> optimized_names(const model::ParamSet<float>& params) {
  std::vector<std::string> out;
  for (const char* prefix : {model::kEncoderPrefix, model::kProjectionPrefix}) {
    for (const auto& n : params.names()) {
      if (n.starts_with(prefix)) out.push_back(n);
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ckpt) {
  const auto& st = ckpt.state;
  nlohmann::ordered_json blob;
  try {
    blob["config"] = nlohmann::ordered_json::parse(ckpt.config_json.empty() ? "{}" : ckpt.config_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::BadCheckpoint, std::string("config snapshot is not JSON: ") + e.what());
  }
  blob["loss_history"] = nlohmann::ordered_json::array();
  for (const auto& rec : st.history) {
    blob["loss_history"].push_back({{"epoch", rec.epoch}, {"mean_loss", rec.mean_loss}, {"wall_ms", rec.wall_ms}});
  }
  const std::string text = blob.dump();

  Writer w;
  w.bytes(kMagic, 4);
  w.put(kCheckpointVersion);
  w.put(static_cast<std::uint32_t>(text.size()));
  w.bytes(text.data(), text.size());

  w.put(static_cast<std::uint32_t>(st.params.size()));
  for (std::size_t i = 0; i < st.params.size(); ++i) put_tensor(w, st.params.names()[i], st.params.tensors()[i]);

  const auto names = optimized_names(st.params);
  const auto& adam = st.adam;
  if (!adam.first_moment.empty() && (adam.first_moment.size() != names.size() || adam.second_moment.size() != names.size())) {
    throw Error(Errc::BadCheckpoint, "optimizer state does not match the parameter set");
  }
  w.put(static_cast<std::uint32_t>(adam.first_moment.size() + adam.second_moment.size() + 1));
  for (std::size_t i = 0; i < adam.first_moment.size(); ++i) put_tensor(w, "adam.m." + names[i], adam.first_moment[i]);
  for (std::size_t i = 0; i < adam.second_moment.size(); ++i) put_tensor(w, "adam.v." + names[i], adam.second_moment[i]);
  put_tensor(w, "adam.step", ad::Tensor<double>(ad::Shape{1}, std::vector<double>{static_cast<double>(adam.step)}));

  w.put(static_cast<std::uint32_t>(st.epoch));
  for (std::uint64_t word : st.rng.state()) w.put(word);
  return std::move(w.result());
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw Error(Errc::BadMagic, "not a checkpoint");
  r.take(4);
  const auto version = r.get<std::uint16_t>();
  if (version != kCheckpointVersion) {
    throw Error(Errc::VersionMismatch, "checkpoint version " + std::to_string(version) + ", expected " +
                                           std::to_string(kCheckpointVersion));
  }

  Checkpoint ckpt;
  auto& st = ckpt.state;
  const auto blob_len = r.get<std::uint32_t>();
  const auto* blob_data = r.take(blob_len);
  try {
    const auto blob = nlohmann::ordered_json::parse(blob_data, blob_data + blob_len);
    ckpt.config_json = blob.at("config").dump();
    for (const auto& rec : blob.at("loss_history")) {
      st.history.push_back(ssl::EpochRecord{rec.at("epoch").get<std::size_t>(), rec.at("mean_loss").get<double>(),
                                            rec.at("wall_ms").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadCheckpoint, std::string("metadata blob: ") + e.what());
  }

  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto raw = get_tensor(r);
    if (st.params.contains(raw.name)) throw Error(Errc::BadCheckpoint, "duplicate tensor " + raw.name);
    st.params.add(raw.name, to_f32(raw));
  }

  const auto names = optimized_names(st.params);
  const auto opt_count = r.get<std::uint32_t>();
  bool have_step = false;
  for (std::uint32_t i = 0; i < opt_count; ++i) {
    const auto raw = get_tensor(r);
    if (raw.name == "adam.step") {
      if (raw.dtype != kF64 || ad::numel(raw.shape) != 1) throw Error(Errc::BadCheckpoint, "adam.step must be one f64");
      double step;
      std::memcpy(&step, raw.data, sizeof(double));
      st.adam.step = static_cast<std::uint64_t>(step);
      have_step = true;
      continue;
    }
    const bool first = raw.name.starts_with("adam.m.");
    if (!first && !raw.name.starts_with("adam.v.")) throw Error(Errc::BadCheckpoint, "unknown optimizer tensor " + raw.name);
    auto& moments = first ? st.adam.first_moment : st.adam.second_moment;
    const std::size_t slot = moments.size();
    if (slot >= names.size() || raw.name.substr(7) != names[slot]) {
      throw Error(Errc::BadCheckpoint, "optimizer tensor " + raw.name + " out of order");
    }
    auto t = to_f32(raw);
    if (t.shape() != st.params.at(names[slot]).shape()) throw Error(Errc::BadCheckpoint, raw.name + " has the wrong shape");
    moments.push_back(std::move(t));
  }
  if (!have_step) throw Error(Errc::BadCheckpoint, "adam.step missing");
  if (st.adam.first_moment.size() != st.adam.second_moment.size() ||
      (!st.adam.first_moment.empty() && st.adam.first_moment.size() != names.size())) {
    throw Error(Errc::BadCheckpoint, "incomplete optimizer state");
  }

  st.epoch = r.get<std::uint32_t>();
  Rng::State rng{};
  for (auto& word : rng) word = r.get<std::uint64_t>();
  st.rng = Rng::from_state(rng);
  if (r.remaining() != 0) {
    throw Error(Errc::TrailingGarbage, std::to_string(r.remaining()) + " bytes after the checkpoint");
  }
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  imaging::write_file_bytes(path, save_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(Errc::MissingInput, "checkpoint " + path.string() + " not found");
  return load_checkpoint(imaging::read_file_bytes(path));
}

}  // namespace sslse::cli
