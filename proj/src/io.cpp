#include "aqcgap/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aqcgap::io {

using nlohmann::json;

double parse_weight(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return std::stod(s);
            double num = std::stod(s.substr(0, slash));
            double den = std::stod(s.substr(slash + 1));
            if (den == 0.0) throw std::invalid_argument("zero denominator");
            return num / den;
        } catch (const std::exception&) {
            throw std::invalid_argument("parse_weight: cannot parse '" + s + "'");
        }
    }
    throw std::invalid_argument("parse_weight: expected number or \"p/q\" string");
}

json graph_to_json(const WeightedGraph& g) {
    json j;
    j["n"] = g.n;
    json verts = json::array();
    for (int i = 0; i < g.n; ++i) verts.push_back({{"id", i}, {"weight", g.weight[i]}});
    j["vertices"] = std::move(verts);
    json edges = json::array();
    for (const auto& e : g.edges) {
        json je{{"u", e.u}, {"v", e.v}};
        if (e.J) je["J"] = *e.J;
        edges.push_back(std::move(je));
    }
    j["edges"] = std::move(edges);
    j["default_J"] = g.default_J;
    if (g.ck)
        j["ck"] = {{"r", g.ck->r}, {"g", g.ck->g}, {"w_A", g.ck->w_A}, {"w_B", g.ck->w_B}};
    if (g.partition) {
        json cls = json::array(), grp = json::array();
        for (int i = 0; i < g.n; ++i) {
            cls.push_back(g.partition->cls[i] == VertexClass::A ? "A" : "B");
            grp.push_back(g.partition->group[i]);
        }
        j["partition"] = {{"class", std::move(cls)}, {"group", std::move(grp)}};
    }
    return j;
}

WeightedGraph graph_from_json(const json& j) {
    WeightedGraph g;
    g.n = j.at("n").get<int>();
    g.weight.assign(g.n, 0.0);
    for (const auto& v : j.at("vertices")) {
        int id = v.at("id").get<int>();
        if (id < 0 || id >= g.n) throw std::invalid_argument("graph json: vertex id out of range");
        g.weight[id] = parse_weight(v.at("weight"));
    }
    if (j.contains("default_J")) g.default_J = parse_weight(j.at("default_J"));
    for (const auto& e : j.at("edges")) {
        Edge edge;
        edge.u = e.at("u").get<int>();
        edge.v = e.at("v").get<int>();
        if (edge.u > edge.v) std::swap(edge.u, edge.v);
        if (e.contains("J")) edge.J = parse_weight(e.at("J"));
        g.edges.push_back(edge);
    }
    if (j.contains("ck")) {
        CkParams ck;
        ck.r = j["ck"].at("r").get<int>();
        ck.g = j["ck"].at("g").get<int>();
        ck.w_A = parse_weight(j["ck"].at("w_A"));
        ck.w_B = parse_weight(j["ck"].at("w_B"));
        g.ck = ck;
    }
    if (j.contains("partition")) {
        VertexPartition p;
        for (const auto& c : j["partition"].at("class"))
            p.cls.push_back(c.get<std::string>() == "A" ? VertexClass::A : VertexClass::B);
        for (const auto& gr : j["partition"].at("group")) p.group.push_back(gr.get<int>());
        g.partition = std::move(p);
    }
    g.validate();
    return g;
}

WeightedGraph load_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file: " + path);
    json j;
    in >> j;
    return graph_from_json(j);
}

void save_graph_json(const WeightedGraph& g, const std::string& path) {
    write_file(path, graph_to_json(g).dump(2) + "\n");
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_sci3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string gap_scan_csv(const GapScan& scan) {
    std::string out = "s,E0,E1,gap,M\n";
    for (const auto& p : scan.samples) {
        out += format_full(p.s);
        out += ',';
        out += format_full(p.e0);
        out += ',';
        out += format_full(p.e1);
        out += ',';
        out += format_full(p.gap);
        out += ',';
        out += format_full(p.m_elem);
        out += '\n';
    }
    return out;
}

json gap_sidecar(const GapScan& scan) {
    json j;
    j["s_star"] = scan.s_star;
    j["g_min"] = scan.g_min;
    j["bracket"] = {scan.bracket[0], scan.bracket[1]};
    j["refined"] = scan.refined;
    j["boundary_minimum"] = scan.boundary_minimum;
    j["degenerate"] = scan.degenerate;
    if (scan.degenerate)
        j["degenerate_interval"] = {scan.degenerate_interval[0], scan.degenerate_interval[1]};
    j["samples"] = scan.samples.size();
    j["solver_stats"] = {{"solves", scan.total_solves}, {"matvecs", scan.total_matvecs}};
    return j;
}

std::string desev_csv(const DesevSeries& series) {
    std::string out = "s";
    for (const auto& lbl : series.level_labels) out += "," + lbl;
    out += '\n';
    for (std::size_t i = 0; i < series.s_grid.size(); ++i) {
        out += format_full(series.s_grid[i]);
        for (int l = 0; l < series.top_m; ++l) {
            out += ',';
            out += format_full(series.gamma[l][i]);
        }
        out += '\n';
    }
    return out;
}

json desev_legend(const AnnealSystem& system, const EnergyLevels& levels,
                  const DesevSeries& series, const VertexPartition* partition) {
    json j;
    j["k"] = levels.k;
    j["which"] = series.which == WhichState::Ground ? "ground" : "first-excited";
    j["top_m"] = series.top_m;
    j["total_levels"] = levels.count();
    json lv = json::array();
    for (int l = 0; l < series.top_m; ++l) {
        json e;
        e["value"] = levels.value[l];
        e["label"] = series.level_labels[l];
        e["degeneracy"] = levels.degeneracy[l];
        if (partition) e["states"] = level_patterns(system, levels, l, *partition);
        lv.push_back(std::move(e));
    }
    j["levels"] = std::move(lv);
    return j;
}

namespace {

std::string art_row_error(const SweepRow& r) {
    return "# row k=" + format_full(r.k) + " failed: " + r.error + "\n";
}

} // namespace

std::string art_main_csv(std::span<const SweepRow> rows) {
    std::string out = "k,s_star,g_min,M_sstar,max_M,max_normH,ART2,ART1\n";
    for (const auto& r : rows) {
        if (!r.error.empty() || !r.art) {
            out += art_row_error(r);
            continue;
        }
        const ArtReport& a = *r.art;
        out += format_full(a.k) + ',' + format_full(a.s_star) + ',' + format_full(a.g_min) +
               ',' + format_full(a.m_at_sstar) + ',' + format_full(a.max_m) + ',' +
               format_full(a.max_norm) + ',' + format_full(a.art2) + ',' + format_full(a.art1) +
               '\n';
    }
    return out;
}

std::string art_ratio_csv(std::span<const SweepRow> rows) {
    std::string out = "k,s_prime,g_sprime,M_sprime,ratio,max_normH,ART3\n";
    for (const auto& r : rows) {
        if (!r.error.empty() || !r.art) {
            out += art_row_error(r);
            continue;
        }
        const ArtReport& a = *r.art;
        out += format_full(a.k) + ',' + format_full(a.s_prime) + ',' +
               format_full(a.g_at_sprime) + ',' + format_full(a.m_at_sprime) + ',' +
               format_full(a.ratio_max) + ',' + format_full(a.max_norm) + ',' +
               format_full(a.art3) + '\n';
    }
    return out;
}

std::string table1_csv(std::span<const SweepRow> rows) {
    std::string out = "w_B,s_star,g_min\n";
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            out += "# row w_B=" + format_full(r.w_B) + " failed: " + r.error + "\n";
            continue;
        }
        out += format_full(r.w_B) + ',' + format_full(r.scan.s_star) + ',' +
               format_full(r.scan.g_min) + '\n';
    }
    return out;
}

json sweep_sidecar(std::span<const SweepRow> rows) {
    json j = json::array();
    for (const auto& r : rows) {
        json e;
        e["k"] = r.k;
        e["w_B"] = r.w_B;
        if (!r.error.empty()) {
            e["error"] = r.error;
            j.push_back(std::move(e));
            continue;
        }
        e["gap"] = gap_sidecar(r.scan);
        if (r.art) {
            const ArtReport& a = *r.art;
            e["art"] = {{"s_star", a.s_star},
                        {"g_min", a.g_min},
                        {"M_sstar", a.m_at_sstar},
                        {"max_M", a.max_m},
                        {"max_normH", a.max_norm},
                        {"ART1", a.art1},
                        {"ART2", a.art2},
                        {"ART3", a.art3},
                        {"s_prime", a.s_prime},
                        {"g_sprime", a.g_at_sprime},
                        {"M_sprime", a.m_at_sprime},
                        {"ratio", a.ratio_max},
                        {"ordering_ok", a.ordering_ok},
                        {"degenerate_policy", a.policy_name},
                        {"solves", a.total_solves},
                        {"matvecs", a.total_matvecs}};
        }
        j.push_back(std::move(e));
    }
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace aqcgap::io
