#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ucql/domain.hpp"

namespace ucql {

// Heat-map CSV: header "state,a0,...,a9", then one row per state s00..s66 in
// (from, to) row-major order. Values use the shortest text that parses back
// to the same double.
void write_q_csv(const QTable& table, std::ostream& out);
// Sidecar with the per-state update count and temperature: "state,n,T".
void write_state_csv(const QTable& table, std::ostream& out);

// Reads the value matrix into `table`, leaving counts and temperatures alone.
void read_q_csv(std::istream& in, QTable& table);
void read_state_csv(std::istream& in, QTable& table);

// "<dir>/q_after.csv" -> "<dir>/q_after.states.csv".
std::filesystem::path sidecar_path(const std::filesystem::path& q_csv);

// Writes the CSV and its sidecar. Throws std::runtime_error when the path is
// not writable.
void save_qtable(const QTable& table, const std::filesystem::path& q_csv);
// Reads a CSV and, when present, its sidecar (otherwise n = 0, T = 1).
QTable load_qtable(const std::filesystem::path& q_csv);

// Binary PGM, one `cell_px` square per (state, action); brighter is larger.
void write_heatmap_pgm(const QTable& table, std::ostream& out, int cell_px = 8);

enum class HeatmapFormat { Csv, Pgm };
HeatmapFormat parse_heatmap_format(const std::string& name);

void export_heatmap(const QTable& table, const std::filesystem::path& path,
                    HeatmapFormat format = HeatmapFormat::Csv);

std::string format_double(double v);

}  // namespace ucql
