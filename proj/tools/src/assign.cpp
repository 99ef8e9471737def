#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "options.hpp"
#include "spillover/clustering.hpp"
#include "spillover/error.hpp"
#include "spillover/experiment.hpp"
#include "spillover/graph.hpp"

namespace spillover::cli {

namespace {

class AssignCommand : public Command {
 public:
  explicit AssignCommand(CLI::App& root)
      : Command(root.add_subcommand("assign", "Hash clusters into buckets and assign arms")) {
    opts_.option("graph", graph_, "Edge list")->required();
    opts_.flag("directed", directed_, "Read edge lines as directed strengths");
    opts_.option("partition", partition_, "Partition file")->required();
    opts_.option("buckets", buckets_, "Bucket count B");
    opts_.option("treatment", treatment_, "Treatment bucket indices")->delimiter(',');
    opts_.option("control", control_, "Control bucket indices")->delimiter(',');
    opts_.option("salt", salt_, "Bucket hash salt");
    opts_.option("perturb", perturb_, "Share of nodes reset to singleton clusters before hashing");
    opts_.option("seed", seed_, "Perturbation seed");
    opts_.option("events", events_, "Share events `src dst [count]`; graph edges in both directions when empty");
    opts_.option("out", out_, "Per-node bucket file to write")->required();
    opts_.option("json", json_, "Assignment JSON path (stdout when empty)");
  }

  void run() override {
    WeightedGraph g = load_edge_list(graph_, directed_);
    Partition p = read_partition(g, partition_);
    if (perturb_ > 0.0) p = perturb_cids(g, p, perturb_, seed_);
    AssignmentSpec spec;
    spec.buckets = buckets_;
    spec.treatment_buckets = treatment_;
    spec.control_buckets = control_;
    spec.salt = salt_;
    Assignment a = assign(p, spec);

    std::ofstream out(out_, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_);
    out << "# node_id\tcluster_id\tbucket\tarm\n";
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      out << g.id_of(i) << '\t' << a.unit_of(i) << '\t' << a.bucket_of_node(i) << '\t' << to_string(a.arm_of_node(i))
          << '\n';
    }
    if (!out) throw IoError("write failed for " + out_);

    ShareEventLog log = events_.empty() ? graph_events(g) : load_events(events_, g);
    Json doc = document();
    Json assignment = Json::object();
    assignment["buckets"] = buckets_;
    assignment["salt"] = salt_;
    assignment["treatment_buckets"] = treatment_;
    assignment["control_buckets"] = control_;
    assignment["partition"] = partition_;
    assignment["bucket_file"] = out_;
    doc["assignment"] = assignment;
    doc["nodes"] = {{"treatment", a.arm_size(Arm::treatment)},
                    {"control", a.arm_size(Arm::control)},
                    {"holdout", a.arm_size(Arm::holdout)}};
    doc["wgsr"] = {{"events", events_.empty() ? "graph" : "file"},
                   {"event_count", log.size()},
                   {"treatment", to_json(wgsr(log, a, Arm::treatment, Arm::control))},
                   {"control", to_json(wgsr(log, a, Arm::control, Arm::treatment))}};
    emit(doc, json_);
  }

 private:
  std::string graph_;
  bool directed_ = false;
  std::string partition_;
  std::uint32_t buckets_ = 10;
  std::vector<std::uint32_t> treatment_{0};
  std::vector<std::uint32_t> control_{1};
  std::uint64_t salt_ = 0;
  double perturb_ = 0.0;
  std::uint64_t seed_ = 0;
  std::string events_;
  std::string out_;
  std::string json_;
};

}  // namespace

std::unique_ptr<Command> make_assign(CLI::App& root) { return std::make_unique<AssignCommand>(root); }

}  // namespace spillover::cli
