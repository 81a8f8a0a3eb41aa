#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "aqcgap/art.hpp"
#include "aqcgap/desev.hpp"
#include "aqcgap/graph.hpp"

namespace aqcgap::io {

// Graph file schema:
//   {"n": int,
//    "vertices": [{"id": int, "weight": number | "p/q"}],
//    "edges": [{"u": int, "v": int, "J": optional number}],
//    "default_J": optional number,
//    "ck": optional {"r", "g", "w_A", "w_B"},
//    "partition": optional {"class": ["A"|"B", ...], "group": [int, ...]}}
nlohmann::json graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const nlohmann::json& j);
WeightedGraph load_graph_json(const std::string& path);
void save_graph_json(const WeightedGraph& g, const std::string& path);

// accepts "9/5" style rationals or plain numbers
double parse_weight(const nlohmann::json& v);

std::string format_full(double v); // 17 significant digits
std::string format_sci3(double v); // 3 significant digits, scientific

// columns s,E0,E1,gap,M; full precision
std::string gap_scan_csv(const GapScan& scan);
nlohmann::json gap_sidecar(const GapScan& scan);

// columns s,<level values>; one gamma column per displayed level
std::string desev_csv(const DesevSeries& series);
nlohmann::json desev_legend(const AnnealSystem& system, const EnergyLevels& levels,
                            const DesevSeries& series, const VertexPartition* partition);

// Table 2 layout: k,s_star,g_min,M_sstar,max_M,max_normH,ART2,ART1
std::string art_main_csv(std::span<const SweepRow> rows);
// ratio table: k,s_prime,g_sprime,M_sprime,ratio,max_normH,ART3
std::string art_ratio_csv(std::span<const SweepRow> rows);
// Table 1 layout: w_B,s_star,g_min
std::string table1_csv(std::span<const SweepRow> rows);
nlohmann::json sweep_sidecar(std::span<const SweepRow> rows);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace aqcgap::io
