#include "sslse/ingest/edf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>

#include "sslse/error.hpp"

namespace sslse::ingest {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string_view field(std::size_t width) {
    std::string_view out(reinterpret_cast<const char*>(bytes_.data()) + pos_, width);
    pos_ += width;
    return trim(out);
  }

  template <typename Number>
  Number number(std::size_t width, const char* what) {
    const auto text = field(width);
    Number value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(Errc::InvalidSpec, std::string("EDF header field '") + what + "' is not numeric: '" +
                                         std::string(text) + "'");
    }
    return value;
  }

  void skip(std::size_t width) { pos_ += width; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_field(std::vector<std::uint8_t>& out, std::string_view text, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) out.push_back(i < text.size() ? static_cast<std::uint8_t>(text[i]) : ' ');
}

double parse_plain(const std::string& s) {
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

// Fixed-point text of at most 8 characters that is <= v (round_down) or >= v.
std::string edf_number(double v, bool round_down) {
  for (int decimals = 6; decimals >= 0; --decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (s.size() > 8) continue;
    const double step = std::pow(10.0, -decimals);
    double parsed = parse_plain(s);
    double adjusted = v;
    while (round_down ? parsed > v : parsed < v) {
      adjusted += round_down ? -step : step;
      std::snprintf(buf, sizeof buf, "%.*f", decimals, adjusted);
      s = buf;
      parsed = parse_plain(s);
    }
    if (s.size() <= 8) return s;
  }
  throw Error(Errc::InvalidSpec, "value " + std::to_string(v) + " does not fit an 8-character EDF field");
}

}  // namespace

EdfHeader parse_edf_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 256) {
    throw Error(Errc::TruncatedHeader, "EDF needs at least 256 header bytes, got " + std::to_string(bytes.size()));
  }
  HeaderReader r(bytes);
  EdfHeader h;
  h.version = std::string(r.field(8));
  if (h.version != "0") throw Error(Errc::BadMagic, "EDF version field is '" + h.version + "', expected '0'");
  h.patient_id = std::string(r.field(80));
  h.recording_id = std::string(r.field(80));
  r.skip(8 + 8 + 8);  // start date, start time, header byte count
  const auto reserved = r.field(44);
  if (reserved.starts_with("EDF+")) throw Error(Errc::BadMagic, "EDF+ files are not supported");
  h.num_records = r.number<std::int64_t>(8, "number of records");
  h.record_duration_s = r.number<double>(8, "record duration");
  const auto ns = r.number<std::int64_t>(4, "number of signals");
  if (ns < 1) throw Error(Errc::InvalidSpec, "EDF declares " + std::to_string(ns) + " signals");
  const std::size_t signals = static_cast<std::size_t>(ns);
  if (bytes.size() < 256 + 256 * signals) {
    throw Error(Errc::TruncatedHeader, "EDF with " + std::to_string(signals) + " signals needs " +
                                           std::to_string(256 + 256 * signals) + " header bytes, got " +
                                           std::to_string(bytes.size()));
  }
  h.signals.resize(signals);
  for (auto& s : h.signals) s.label = std::string(r.field(16));
  r.skip(80 * signals);  // transducer
  for (auto& s : h.signals) s.physical_dimension = std::string(r.field(8));
  for (auto& s : h.signals) s.physical_min = r.number<double>(8, "physical minimum");
  for (auto& s : h.signals) s.physical_max = r.number<double>(8, "physical maximum");
  for (auto& s : h.signals) s.digital_min = r.number<std::int32_t>(8, "digital minimum");
  for (auto& s : h.signals) s.digital_max = r.number<std::int32_t>(8, "digital maximum");
  r.skip(80 * signals);  // prefiltering
  for (auto& s : h.signals) {
    const auto spr = r.number<std::int64_t>(8, "samples per record");
    if (spr < 1) throw Error(Errc::InvalidSpec, "signal '" + s.label + "' has no samples per record");
    s.samples_per_record = static_cast<std::size_t>(spr);
  }
  return h;
}

EegRecording parse_edf(std::span<const std::uint8_t> bytes) {
  const EdfHeader h = parse_edf_header(bytes);
  const std::size_t spr = h.signals.front().samples_per_record;
  for (const auto& s : h.signals) {
    if (s.samples_per_record != spr) {
      throw Error(Errc::InconsistentRates, "signal '" + s.label + "' has " + std::to_string(s.samples_per_record) +
                                               " samples per record, expected " + std::to_string(spr));
    }
    if (s.digital_max == s.digital_min) {
      throw Error(Errc::ScaleUndefined, "signal '" + s.label + "' has digital_min == digital_max");
    }
  }
  if (!(h.record_duration_s > 0.0)) throw Error(Errc::InvalidSpec, "EDF record duration must be > 0");

  const std::size_t ns = h.signals.size();
  const std::size_t record_bytes = 2 * spr * ns;
  const std::size_t payload = bytes.size() - h.header_bytes();
  std::size_t records = 0;
  if (h.num_records < 0) {
    records = payload / record_bytes;
  } else {
    records = static_cast<std::size_t>(h.num_records);
    if (payload < records * record_bytes) {
      throw Error(Errc::TruncatedPayload, "EDF declares " + std::to_string(records) + " records but holds " +
                                              std::to_string(payload) + " data bytes");
    }
  }

  EegRecording rec;
  rec.sample_rate_hz = static_cast<double>(spr) / h.record_duration_s;
  rec.source_id = h.recording_id.empty() ? h.patient_id : h.recording_id;
  rec.samples.assign(ns, std::vector<double>(records * spr));
  for (const auto& s : h.signals) rec.channel_labels.push_back(s.label);

  const std::uint8_t* p = bytes.data() + h.header_bytes();
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < ns; ++c) {
      const auto& sig = h.signals[c];
      const double scale = (sig.physical_max - sig.physical_min) /
                           static_cast<double>(sig.digital_max - sig.digital_min);
      for (std::size_t i = 0; i < spr; ++i) {
        const auto digital = static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0] | (p[1] << 8)));
        p += 2;
        rec.samples[c][r * spr + i] = sig.physical_min + (digital - sig.digital_min) * scale;
      }
    }
  }
  return rec;
}

std::vector<std::uint8_t> write_edf(const EegRecording& rec) {
  rec.validate();
  const std::size_t n = rec.sample_count();
  const std::size_t ns = rec.channel_count();
  const double rate = rec.sample_rate_hz;

  // One-second records when the rate and length allow it, else a single record.
  std::size_t spr = n;
  double duration = static_cast<double>(n) / rate;
  if (rate == std::floor(rate) && rate >= 1.0 && n % static_cast<std::size_t>(rate) == 0) {
    spr = static_cast<std::size_t>(rate);
    duration = 1.0;
  }
  const std::size_t records = spr == 0 ? 0 : n / spr;
  const std::string duration_text = edf_number(duration, false);
  if (std::abs(parse_plain(duration_text) - duration) > 0.0) {
    throw Error(Errc::InvalidSpec, "record duration " + std::to_string(duration) + " s is not exactly representable");
  }

  constexpr std::int32_t dmin = -32768, dmax = 32767;
  std::vector<EdfSignalHeader> sigs(ns);
  for (std::size_t c = 0; c < ns; ++c) {
    const auto [lo, hi] = std::minmax_element(rec.samples[c].begin(), rec.samples[c].end());
    double pmin = n ? *lo : 0.0, pmax = n ? *hi : 0.0;
    if (pmax - pmin < 1e-6) {
      pmin -= 1.0;
      pmax += 1.0;
    }
    sigs[c].label = c < rec.channel_labels.size() ? rec.channel_labels[c] : "EEG " + std::to_string(c);
    sigs[c].physical_dimension = "uV";
    sigs[c].physical_min = parse_plain(edf_number(pmin, true));
    sigs[c].physical_max = parse_plain(edf_number(pmax, false));
    sigs[c].samples_per_record = spr;
  }

  std::vector<std::uint8_t> out;
  out.reserve(256 + 256 * ns + 2 * n * ns);
  put_field(out, "0", 8);
  put_field(out, "X X X X", 80);
  put_field(out, rec.source_id.empty() ? "Startdate X X X X" : rec.source_id, 80);
  put_field(out, "01.01.00", 8);
  put_field(out, "00.00.00", 8);
  put_field(out, std::to_string(256 + 256 * ns), 8);
  put_field(out, "", 44);
  put_field(out, std::to_string(records), 8);
  put_field(out, duration_text, 8);
  put_field(out, std::to_string(ns), 4);
  for (const auto& s : sigs) put_field(out, s.label, 16);
  for (std::size_t c = 0; c < ns; ++c) put_field(out, "", 80);
  for (const auto& s : sigs) put_field(out, s.physical_dimension, 8);
  for (const auto& s : sigs) put_field(out, edf_number(s.physical_min, true), 8);
  for (const auto& s : sigs) put_field(out, edf_number(s.physical_max, false), 8);
  for (std::size_t c = 0; c < ns; ++c) put_field(out, std::to_string(dmin), 8);
  for (std::size_t c = 0; c < ns; ++c) put_field(out, std::to_string(dmax), 8);
  for (std::size_t c = 0; c < ns; ++c) put_field(out, "", 80);
  for (const auto& s : sigs) put_field(out, std::to_string(s.samples_per_record), 8);
  for (std::size_t c = 0; c < ns; ++c) put_field(out, "", 32);

  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < ns; ++c) {
      const auto& s = sigs[c];
      const double scale = static_cast<double>(dmax - dmin) / (s.physical_max - s.physical_min);
      for (std::size_t i = 0; i < spr; ++i) {
        const double x = rec.samples[c][r * spr + i];
        const double d = std::clamp(std::round((x - s.physical_min) * scale + dmin), double(dmin), double(dmax));
        const auto v = static_cast<std::uint16_t>(static_cast<std::int16_t>(d));
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
      }
    }
  }
  return out;
}

}  // namespace sslse::ingest
