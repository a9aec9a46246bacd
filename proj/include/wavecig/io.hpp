#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graph.hpp"
#include "types.hpp"

namespace wavecig {

struct NamedSeries {
    std::vector<std::string> names;
    TimeSeries data;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(cell);
    return out;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

/// Header row of channel names, then one row of numbers per time point.
inline NamedSeries parse_csv(std::istream& in, const std::string& source = "input") {
    std::string line;
    if (!std::getline(in, line)) throw DataError(source + ": empty CSV");
    NamedSeries out;
    for (auto& n : detail::split_csv_line(line)) out.names.push_back(detail::trim(n));
    const std::size_t P = out.names.size();
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty() || line == "\r") continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != P)
            throw DataError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(P) +
                            " fields, found " + std::to_string(cells.size()));
        std::vector<double> row(P);
        for (std::size_t i = 0; i < P; ++i) {
            const std::string c = detail::trim(cells[i]);
            std::size_t used = 0;
            try {
                row[i] = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (c.empty() || used != c.size())
                throw DataError(source + ":" + std::to_string(lineno) + ": field '" + c + "' is not a number");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(source + ": CSV has a header but no data rows");
    out.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(P));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t i = 0; i < P; ++i) out.data(static_cast<Index>(t), static_cast<Index>(i)) = rows[t][i];
    return out;
}

inline NamedSeries read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return parse_csv(in, path);
}

inline std::vector<std::string> default_names(Index P) {
    std::vector<std::string> names;
    for (Index p = 0; p < P; ++p) names.push_back("X" + std::to_string(p + 1));
    return names;
}

inline void write_csv(std::ostream& out, const NamedSeries& s) {
    if (static_cast<Index>(s.names.size()) != s.data.cols()) throw DataError("CSV names do not match column count");
    for (std::size_t i = 0; i < s.names.size(); ++i) out << (i ? "," : "") << detail::csv_quote(s.names[i]);
    out << '\n';
    out << std::setprecision(17);
    for (Index t = 0; t < s.data.rows(); ++t) {
        for (Index p = 0; p < s.data.cols(); ++p) out << (p ? "," : "") << s.data(t, p);
        out << '\n';
    }
}

inline void write_csv(const std::string& path, const NamedSeries& s) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_csv(out, s);
}

struct GraphMeta {
    std::string method;
    std::vector<int> scales_selected;
    std::vector<double> lambda_per_scale;
};

struct NamedGraph {
    std::vector<std::string> nodes;
    Graph graph;
    GraphMeta meta;
};

inline nlohmann::json graph_to_json(const NamedGraph& g) {
    nlohmann::json j;
    j["nodes"] = g.nodes;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [p, q] : g.graph.edges()) edges.push_back({p, q});
    j["edges"] = edges;
    j["meta"] = {{"method", g.meta.method},
                 {"scales_selected", g.meta.scales_selected},
                 {"lambda_per_scale", g.meta.lambda_per_scale}};
    return j;
}

inline NamedGraph graph_from_json(const nlohmann::json& j) {
    try {
        NamedGraph g;
        g.nodes = j.at("nodes").get<std::vector<std::string>>();
        g.graph = Graph(static_cast<int>(g.nodes.size()));
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw DataError("graph JSON: each edge must be a [p, q] pair");
            g.graph.add_edge(e[0].get<int>(), e[1].get<int>());
        }
        if (j.contains("meta")) {
            const auto& m = j["meta"];
            if (m.contains("method")) g.meta.method = m["method"].get<std::string>();
            if (m.contains("scales_selected")) g.meta.scales_selected = m["scales_selected"].get<std::vector<int>>();
            if (m.contains("lambda_per_scale"))
                g.meta.lambda_per_scale = m["lambda_per_scale"].get<std::vector<double>>();
        }
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("graph JSON: ") + e.what());
    }
}

inline void write_graph_json(const std::string& path, const NamedGraph& g) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << graph_to_json(g).dump(2) << '\n';
}

inline NamedGraph read_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return graph_from_json(j);
}

}  // namespace wavecig
