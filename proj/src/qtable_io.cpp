#include "ucql/qtable_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ucql {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  return s;
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw std::runtime_error("bad number in Q-table: '" + text + "'");
  return v;
}

std::uint64_t parse_count(const std::string& text) {
  std::uint64_t v = 0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc() || ptr != last) throw std::runtime_error("bad count in Q-table sidecar: '" + text + "'");
  return v;
}

template <typename RowFn>
void read_rows(std::istream& in, const std::vector<std::string>& header, RowFn&& on_row) {
  std::string line;
  if (!std::getline(in, line) || split(chomp(line), ',') != header) {
    throw std::runtime_error("malformed Q-table header");
  }
  std::vector<bool> seen(kNumTransitionStates, false);
  while (std::getline(in, line)) {
    line = chomp(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw std::runtime_error("malformed Q-table row: " + line);
    TransitionState s;
    try {
      s = TransitionState::parse(cells[0]);
    } catch (const std::exception&) {
      throw std::runtime_error("malformed Q-table state: " + cells[0]);
    }
    if (seen[s.index()]) throw std::runtime_error("duplicate Q-table row: " + cells[0]);
    seen[s.index()] = true;
    on_row(s, cells);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::runtime_error("Q-table is missing states");
  }
}

std::vector<std::string> q_header() {
  std::vector<std::string> h{"state"};
  for (const Action& a : action_table()) h.push_back(a.symbol());
  return h;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

void write_q_csv(const QTable& table, std::ostream& out) {
  const auto header = q_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const TransitionState s : all_transition_states()) {
    out << s.symbol();
    for (std::size_t a = 0; a < kNumActions; ++a) out << ',' << format_double(table.q(s.index(), a));
    out << '\n';
  }
}

void write_state_csv(const QTable& table, std::ostream& out) {
  out << "state,n,T\n";
  for (const TransitionState s : all_transition_states()) {
    out << s.symbol() << ',' << table.count(s) << ',' << format_double(table.temperature(s)) << '\n';
  }
}

void read_q_csv(std::istream& in, QTable& table) {
  read_rows(in, q_header(), [&](TransitionState s, const std::vector<std::string>& cells) {
    for (std::size_t a = 0; a < kNumActions; ++a) table.q(s.index(), a) = parse_double(cells[a + 1]);
  });
}

void read_state_csv(std::istream& in, QTable& table) {
  read_rows(in, {"state", "n", "T"}, [&](TransitionState s, const std::vector<std::string>& cells) {
    table.count(s) = parse_count(cells[1]);
    table.temperature(s) = parse_double(cells[2]);
  });
}

std::filesystem::path sidecar_path(const std::filesystem::path& q_csv) {
  std::filesystem::path p = q_csv;
  p.replace_extension(".states.csv");
  return p;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void save_qtable(const QTable& table, const std::filesystem::path& q_csv) {
  {
    auto out = open_out(q_csv);
    write_q_csv(table, out);
    if (!out) throw std::runtime_error("write failed: " + q_csv.string());
  }
  auto side = open_out(sidecar_path(q_csv));
  write_state_csv(table, side);
  if (!side) throw std::runtime_error("write failed: " + sidecar_path(q_csv).string());
}

QTable load_qtable(const std::filesystem::path& q_csv) {
  std::ifstream in(q_csv);
  if (!in) throw std::runtime_error("cannot read " + q_csv.string());
  QTable table;
  read_q_csv(in, table);
  const auto side = sidecar_path(q_csv);
  if (std::filesystem::exists(side)) {
    std::ifstream sin(side);
    if (!sin) throw std::runtime_error("cannot read " + side.string());
    read_state_csv(sin, table);
  }
  return table;
}

void write_heatmap_pgm(const QTable& table, std::ostream& out, int cell_px) {
  if (cell_px < 1) throw std::invalid_argument("cell size must be >= 1");
  const auto& v = table.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const int width = static_cast<int>(kNumActions) * cell_px;
  const int height = static_cast<int>(kNumTransitionStates) * cell_px;
  out << "P5\n" << width << ' ' << height << "\n255\n";
  std::vector<unsigned char> line(static_cast<std::size_t>(width));
  for (std::size_t s = 0; s < kNumTransitionStates; ++s) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      const double frac = hi > lo ? (table.q(s, a) - lo) / (hi - lo) : 0.5;
      const auto level = static_cast<unsigned char>(std::clamp(std::lround(frac * 255.0), 0L, 255L));
      std::fill_n(line.begin() + static_cast<std::ptrdiff_t>(a) * cell_px, cell_px, level);
    }
    for (int r = 0; r < cell_px; ++r) out.write(reinterpret_cast<const char*>(line.data()), width);
  }
}

HeatmapFormat parse_heatmap_format(const std::string& name) {
  if (name == "csv") return HeatmapFormat::Csv;
  if (name == "pgm") return HeatmapFormat::Pgm;
  throw std::invalid_argument("unknown export format '" + name + "' (expected csv or pgm)");
}

void export_heatmap(const QTable& table, const std::filesystem::path& path, HeatmapFormat format) {
  if (format == HeatmapFormat::Csv) {
    save_qtable(table, path);
    return;
  }
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_heatmap_pgm(table, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace ucql
