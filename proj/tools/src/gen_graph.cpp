#include <cstdint>
#include <string>
#include <vector>

#include "options.hpp"
#include "spillover/error.hpp"
#include "spillover/graph.hpp"
#include "spillover/text_io.hpp"

namespace spillover::cli {

namespace {

class GenGraph : public Command {
 public:
  explicit GenGraph(CLI::App& root) : Command(root.add_subcommand("gen-graph", "Write an edge list")) {
    opts_.positional("type", type_, "ws | multibehavior")->required()->check(CLI::IsMember({"ws", "multibehavior"}));
    opts_.option("out", out_, "Edge list to write")->required();
    opts_.option("n", n_, "ws: node count");
    opts_.option("k", k_, "ws: lattice degree (even)");
    opts_.option("p", p_, "ws: rewiring probability");
    opts_.option("seed", seed_, "ws: generator seed");
    opts_.option("behaviors", behaviors_, "multibehavior: `src dst behavior_id strength` file");
    opts_.option("weight", weights_, "multibehavior: behavior weight as id=w, repeatable");
    opts_.option("json", json_, "Summary JSON path (stdout when empty)");
  }

  void run() override {
    WeightedGraph g;
    if (type_ == "ws") {
      g = watts_strogatz(n_, k_, p_, seed_);
    } else {
      if (behaviors_.empty()) throw InvalidArgument("multibehavior needs --behaviors");
      g = build_multi_behavior(behaviors_, BehaviorWeights(parse_weights()));
    }
    write_edge_list(g, out_);

    Json doc = document();
    doc["nodes"] = g.node_count();
    doc["edges"] = g.edge_count();
    doc["total_weight"] = number(g.total_weight());
    doc["mean_degree"] = number(g.mean_degree());
    emit(doc, json_);
  }

 private:
  std::vector<std::pair<BehaviorWeights::BehaviorId, double>> parse_weights() const {
    std::vector<std::pair<BehaviorWeights::BehaviorId, double>> out;
    for (const std::string& w : weights_) {
      const auto eq = w.find('=');
      std::optional<std::uint64_t> id;
      std::optional<double> value;
      if (eq != std::string::npos) {
        id = text::parse_u64(std::string_view(w).substr(0, eq));
        value = text::parse_double(std::string_view(w).substr(eq + 1));
      }
      if (!id || !value || *id > UINT32_MAX) throw InvalidArgument("--weight expects id=w, got '" + w + "'");
      out.emplace_back(static_cast<BehaviorWeights::BehaviorId>(*id), *value);
    }
    if (out.empty()) throw InvalidArgument("multibehavior needs at least one --weight");
    return out;
  }

  std::string type_;
  std::string out_;
  std::size_t n_ = 10000;
  std::size_t k_ = 10;
  double p_ = 0.1;
  std::uint64_t seed_ = 0;
  std::string behaviors_;
  std::vector<std::string> weights_;
  std::string json_;
};

}  // namespace

std::unique_ptr<Command> make_gen_graph(CLI::App& root) { return std::make_unique<GenGraph>(root); }

}  // namespace spillover::cli
