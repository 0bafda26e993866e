#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sslse/rng.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("sslse-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Magnitude spectrum by the textbook O(n^2) sum.
inline std::vector<double> dft_magnitude(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> mag(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc{};
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    mag[k] = std::abs(acc);
  }
  return mag;
}

inline std::vector<double> random_vector(sslse::Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

/// Rows of an r x d matrix scaled to unit length.
inline std::vector<double> random_unit_rows(sslse::Rng& rng, std::size_t rows, std::size_t d) {
  std::vector<double> v(rows * d);
  for (std::size_t r = 0; r < rows; ++r) {
    double norm = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      v[r * d + c] = rng.normal();
      norm += v[r * d + c] * v[r * d + c];
    }
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < d; ++c) v[r * d + c] /= norm;
  }
  return v;
}

/// Contrastive loss evaluated term by term from its definition.
inline double brute_force_nt_xent(const std::vector<double>& z, std::size_t rows, std::size_t d, double tau) {
  auto sim = [&](std::size_t i, std::size_t k) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += z[i * d + c] * z[k * d + c];
    return s;
  };
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = (i % 2 == 0) ? i + 1 : i - 1;
    double denom = 0.0;
    for (std::size_t k = 0; k < rows; ++k) {
      if (k != i) denom += std::exp(sim(i, k) / tau);
    }
    total += -std::log(std::exp(sim(i, j) / tau) / denom);
  }
  return total / static_cast<double>(rows);
}

struct EdfSignalDef {
  std::string label = "EEG";
  double pmin = -1.0, pmax = 1.0;
  int dmin = -100, dmax = 100;
  int samples_per_record = 4;
};

inline std::string field(const std::string& v, std::size_t width) {
  std::string out = v.substr(0, width);
  out.resize(width, ' ');
  return out;
}

// Builds an EDF file byte by byte from the format description.
inline std::vector<std::uint8_t> hand_edf(const std::vector<EdfSignalDef>& sigs, int records, double duration,
                                   const std::vector<std::int16_t>& payload, const std::string& version = "0") {
  const std::size_t ns = sigs.size();
  std::string h;
  h += field(version, 8);
  h += field("X", 80);
  h += field("test", 80);
  h += field("01.01.01", 8);
  h += field("00.00.00", 8);
  h += field(std::to_string(256 + 256 * ns), 8);
  h += field("", 44);
  h += field(std::to_string(records), 8);
  std::string dur = std::to_string(duration);
  h += field(dur, 8);
  h += field(std::to_string(ns), 4);
  for (const auto& s : sigs) h += field(s.label, 16);
  for (std::size_t i = 0; i < ns; ++i) h += field("", 80);
  for (std::size_t i = 0; i < ns; ++i) h += field("uV", 8);
  for (const auto& s : sigs) h += field(std::to_string(s.pmin).substr(0, 8), 8);
  for (const auto& s : sigs) h += field(std::to_string(s.pmax).substr(0, 8), 8);
  for (const auto& s : sigs) h += field(std::to_string(s.dmin), 8);
  for (const auto& s : sigs) h += field(std::to_string(s.dmax), 8);
  for (std::size_t i = 0; i < ns; ++i) h += field("", 80);
  for (const auto& s : sigs) h += field(std::to_string(s.samples_per_record), 8);
  for (std::size_t i = 0; i < ns; ++i) h += field("", 32);
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  for (std::int16_t v : payload) {
    bytes.push_back(static_cast<std::uint8_t>(static_cast<std::uint16_t>(v) & 0xff));
    bytes.push_back(static_cast<std::uint8_t>(static_cast<std::uint16_t>(v) >> 8));
  }
  return bytes;
}

}  // namespace testing
