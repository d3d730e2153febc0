#include "hag/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string_view>
#include <tuple>

namespace hag {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const auto tab = line.find('\t', pos);
        const auto end = tab == std::string_view::npos ? line.size() : tab;
        out.push_back(line.substr(pos, end - pos));
        pos = end + 1;
    }
    return out;
}

std::string where(const std::string& source, std::size_t line_no) {
    return source + ":" + std::to_string(line_no) + ": ";
}

template <class T>
T parse_number(std::string_view s, const std::string& source, std::size_t line_no, const char* what) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError(where(source, line_no) + "bad " + what + " '" + std::string(s) + "'");
    }
    return value;
}

bool skippable(std::string_view line) {
    return line.empty() || line == "\r" || line.front() == '#';
}

}  // namespace

std::ifstream open_input(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open '" + p.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    return out;
}

void write_edges_tsv(std::ostream& os, std::span<const WeightedEdge> edges) {
    std::string buf;
    buf.reserve(1 << 20);
    char num[24];
    auto put = [&](std::uint32_t x) {
        const auto r = std::to_chars(num, num + sizeof num, x);
        buf.append(num, r.ptr);
    };
    for (const auto& e : edges) {
        put(e.u);
        buf += '\t';
        put(e.v);
        buf += '\t';
        put(e.weight);
        buf += e.kind == EdgeKind::agreement ? "\tA\n" : "\tC\n";
        if (buf.size() > (1u << 20) - 64) {
            os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw IoError("write failed for edge list");
}

std::vector<WeightedEdge> read_edges_tsv(std::istream& is, const std::string& source) {
    std::vector<WeightedEdge> edges;
    std::string line;
    for (std::size_t no = 1; std::getline(is, line); ++no) {
        if (skippable(line)) continue;
        const auto f = split_fields(line);
        if (f.size() != 4) throw ParseError(where(source, no) + "expected 4 tab-separated fields");
        WeightedEdge e;
        const auto u = parse_number<std::uint32_t>(f[0], source, no, "vertex id");
        const auto v = parse_number<std::uint32_t>(f[1], source, no, "vertex id");
        e.u = std::min(u, v);
        e.v = std::max(u, v);
        e.weight = parse_number<std::uint32_t>(f[2], source, no, "weight");
        auto kind = f[3];
        if (!kind.empty() && kind.back() == '\r') kind.remove_suffix(1);
        if (kind == "A") e.kind = EdgeKind::agreement;
        else if (kind == "C") e.kind = EdgeKind::conflict;
        else throw ParseError(where(source, no) + "edge kind must be A or C");
        edges.push_back(e);
    }
    return edges;
}

VertexTable read_vertex_tsv(std::istream& is, const std::string& source) {
    struct Row {
        std::uint64_t id;
        double mark;
        std::uint8_t wild;
        std::uint32_t color;
    };
    std::vector<Row> rows;
    std::size_t columns = 0;
    std::string line;
    for (std::size_t no = 1; std::getline(is, line); ++no) {
        if (skippable(line)) continue;
        const auto f = split_fields(line);
        if (f.size() != 3 && f.size() != 4) throw ParseError(where(source, no) + "expected 3 or 4 fields");
        if (columns == 0) columns = f.size();
        if (f.size() != columns) throw ParseError(where(source, no) + "inconsistent column count");
        Row r{};
        r.id = parse_number<std::uint64_t>(f[0], source, no, "vertex id");
        r.mark = parse_number<double>(f[1], source, no, "mark");
        const auto w = parse_number<int>(f[2], source, no, "wild flag");
        if (w != 0 && w != 1) throw ParseError(where(source, no) + "wild flag must be 0 or 1");
        r.wild = static_cast<std::uint8_t>(w);
        if (columns == 4) r.color = parse_number<std::uint32_t>(f[3], source, no, "color");
        rows.push_back(r);
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
    VertexTable t;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].id != i) {
            throw ParseError(source + ": vertex ids must be exactly 0..n-1 (missing or repeated id near " +
                             std::to_string(rows[i].id) + ")");
        }
        t.mark.push_back(rows[i].mark);
        t.wild.push_back(rows[i].wild);
        if (columns == 4) t.color.push_back(rows[i].color);
    }
    return t;
}

LabelledMultigraph load_graph(const std::filesystem::path& edges, const std::filesystem::path& vertices) {
    auto vin = open_input(vertices);
    auto table = read_vertex_tsv(vin, vertices.string());
    auto ein = open_input(edges);
    LabelledMultigraph g;
    g.edges = read_edges_tsv(ein, edges.string());
    if (g.edges.empty()) throw ParseError(edges.string() + ": edge file is empty");
    g.color = std::move(table.color);
    g.wild = std::move(table.wild);
    for (const auto& e : g.edges) {
        if (e.v >= g.vertex_count()) {
            throw ParseError(edges.string() + ": edge endpoint " + std::to_string(e.v) + " has no vertex row");
        }
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    return g;
}

std::vector<double> read_degrees(std::istream& is, const std::string& source) {
    std::vector<double> out;
    std::string line;
    for (std::size_t no = 1; std::getline(is, line); ++no) {
        if (skippable(line)) continue;
        std::string_view sv = line;
        const auto tab = sv.find_last_of("\t ,");
        if (tab != std::string_view::npos && tab + 1 < sv.size()) sv = sv.substr(tab + 1);
        const double d = parse_number<double>(sv, source, no, "degree");
        if (!(d > 0.0)) throw ParseError(where(source, no) + "degrees must be positive");
        out.push_back(d);
    }
    if (out.empty()) throw ParseError(source + ": no degrees found");
    return out;
}

}  // namespace hag
