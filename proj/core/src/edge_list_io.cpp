#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spillover/error.hpp"
#include "spillover/graph.hpp"
#include "spillover/text_io.hpp"

namespace spillover {

namespace {

struct LineReader {
  std::ifstream in;
  std::string source;
  std::string line;
  std::size_t number = 0;

  explicit LineReader(const std::filesystem::path& path) : in(path), source(path.string()) {
    if (!in) throw IoError("cannot open " + source);
  }

  // Advances to the next non-blank, non-comment line and splits it.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in, line)) {
      ++number;
      text::split_fields(line, fields);
      if (!fields.empty() && fields.front().front() != '#') return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source, number, what); }
};

NodeId parse_node(const LineReader& r, std::string_view field) {
  auto id = text::parse_u64(field);
  if (!id) r.fail("invalid node id '" + std::string(field) + "'");
  return *id;
}

double parse_weight(const LineReader& r, std::string_view field, const char* what) {
  auto w = text::parse_double(field);
  if (!w || !std::isfinite(*w)) r.fail(std::string("invalid ") + what + " '" + std::string(field) + "'");
  if (*w < 0.0) r.fail(std::string("negative ") + what);
  return *w;
}

}  // namespace

WeightedGraph load_edge_list(const std::filesystem::path& path, bool directed_input) {
  // Both input modes fold (i,j) and (j,i) into the same undirected key; the
  // flag documents how the strengths were produced.
  (void)directed_input;
  LineReader reader(path);
  GraphBuilder builder;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 2 && fields.size() != 3) reader.fail("expected 'src dst [weight]'");
    NodeId u = parse_node(reader, fields[0]);
    NodeId v = parse_node(reader, fields[1]);
    if (u == v) reader.fail("self-loop on node " + std::to_string(u));
    double w = fields.size() == 3 ? parse_weight(reader, fields[2], "weight") : 1.0;
    builder.add_edge(u, v, w);
  }
  return builder.build();
}

WeightedGraph build_multi_behavior(const std::filesystem::path& path, const BehaviorWeights& weights) {
  LineReader reader(path);
  GraphBuilder builder;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 4) reader.fail("expected 'src dst behavior_id strength'");
    NodeId u = parse_node(reader, fields[0]);
    NodeId v = parse_node(reader, fields[1]);
    if (u == v) reader.fail("self-loop on node " + std::to_string(u));
    auto behavior = text::parse_u64(fields[2]);
    if (!behavior || *behavior > UINT32_MAX) reader.fail("invalid behavior id '" + std::string(fields[2]) + "'");
    auto omega = weights.weight_of(static_cast<BehaviorWeights::BehaviorId>(*behavior));
    if (!omega) reader.fail("unknown behavior id " + std::to_string(*behavior));
    double strength = parse_weight(reader, fields[3], "strength");
    builder.add_edge(u, v, *omega * strength);
  }
  return builder.build();
}

void write_edge_list(const WeightedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  std::string buffer;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    for (const Neighbor& nb : g.neighbors(i)) {
      if (nb.node <= i) continue;
      buffer.clear();
      buffer += std::to_string(g.id_of(i));
      buffer += ' ';
      buffer += std::to_string(g.id_of(nb.node));
      buffer += ' ';
      buffer += text::format_roundtrip(nb.weight);
      buffer += '\n';
      out << buffer;
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace spillover
