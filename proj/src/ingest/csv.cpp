#include "sslse/ingest/csv.hpp"

#include <charconv>
#include <string>
#include <vector>

#include "sslse/error.hpp"

namespace sslse::ingest {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

EegRecording parse_csv(std::string_view text, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) throw Error(Errc::InvalidSpec, "CSV sample rate must be > 0");
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = trim(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty()) throw Error(Errc::EmptyInput, "CSV input has no rows");

  EegRecording rec;
  rec.sample_rate_hz = sample_rate_hz;
  std::size_t first_data = 0;
  const auto header = split_cells(lines.front());
  bool any_numeric = false;
  for (auto cell : header) {
    double v;
    any_numeric = any_numeric || parse_number(cell, v);
  }
  if (!any_numeric) {
    for (auto cell : header) rec.channel_labels.emplace_back(cell);
    first_data = 1;
  }
  if (first_data >= lines.size()) throw Error(Errc::EmptyInput, "CSV input has a header but no samples");

  const std::size_t channels = split_cells(lines[first_data]).size();
  if (rec.channel_labels.empty()) {
    for (std::size_t c = 0; c < channels; ++c) rec.channel_labels.push_back("ch" + std::to_string(c));
  } else if (rec.channel_labels.size() != channels) {
    throw Error(Errc::RaggedRow, "header has " + std::to_string(rec.channel_labels.size()) + " columns, data has " +
                                     std::to_string(channels));
  }
  rec.samples.assign(channels, {});
  for (auto& ch : rec.samples) ch.reserve(lines.size() - first_data);
  for (std::size_t row = first_data; row < lines.size(); ++row) {
    const auto cells = split_cells(lines[row]);
    if (cells.size() != channels) {
      throw Error(Errc::RaggedRow, "row " + std::to_string(row + 1) + " has " + std::to_string(cells.size()) +
                                       " cells, expected " + std::to_string(channels));
    }
    for (std::size_t c = 0; c < channels; ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) {
        throw Error(Errc::NonNumericCell, "row " + std::to_string(row + 1) + ", column " + std::to_string(c + 1) +
                                              ": '" + std::string(cells[c]) + "'");
      }
      rec.samples[c].push_back(v);
    }
  }
  return rec;
}

}  // namespace sslse::ingest
