#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hag/edge_gen.hpp"

namespace hag {

/// Missing or unwritable files.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed file contents.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// `u <TAB> v <TAB> weight <TAB> kind`, kind A or C.
void write_edges_tsv(std::ostream& os, std::span<const WeightedEdge> edges);
std::vector<WeightedEdge> read_edges_tsv(std::istream& is, const std::string& source = "edges");

/// Vertex attribute rows `id <TAB> mark <TAB> wild [<TAB> color]`.
struct VertexTable {
    std::vector<double> mark;
    std::vector<std::uint8_t> wild;
    std::vector<std::uint32_t> color;  // empty when the file has three columns
};

VertexTable read_vertex_tsv(std::istream& is, const std::string& source = "vertices");

/// Graph as written by `generate`: edge kinds come from the edge file.
LabelledMultigraph load_graph(const std::filesystem::path& edges, const std::filesystem::path& vertices);

/// One positive number per line (last column if several); '#' starts a comment.
std::vector<double> read_degrees(std::istream& is, const std::string& source = "degrees");

std::ifstream open_input(const std::filesystem::path& p);
std::ofstream open_output(const std::filesystem::path& p);

}  // namespace hag
