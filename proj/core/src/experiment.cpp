#include "spillover/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "spillover/error.hpp"
#include "spillover/random.hpp"
#include "spillover/text_io.hpp"

namespace spillover {

std::string_view to_string(Arm arm) {
  switch (arm) {
    case Arm::treatment: return "treatment";
    case Arm::control: return "control";
    case Arm::holdout: return "holdout";
  }
  return "holdout";
}

Arm arm_from_string(std::string_view s) {
  if (s == "treatment") return Arm::treatment;
  if (s == "control") return Arm::control;
  if (s == "holdout") return Arm::holdout;
  throw InvalidArgument("unknown arm '" + std::string(s) + "'");
}

Partition perturb_cids(const WeightedGraph& g, const Partition& p, double r, std::uint64_t seed) {
  if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("perturbation ratio must lie in [0, 1]");
  const std::size_t n = p.node_count();
  const auto count = static_cast<std::size_t>(std::floor(r * static_cast<double>(n)));
  std::vector<ClusterId> labels(p.labels().begin(), p.labels().end());
  Rng rng(seed);
  for (std::size_t i : sample_without_replacement(n, count, rng)) {
    labels[i] = g.id_of(static_cast<NodeIndex>(i)) + kSingletonNamespace;
  }
  return Partition::from_labels(g, std::move(labels));
}

void AssignmentSpec::validate() const {
  if (buckets == 0) throw InvalidArgument("bucket count must be positive");
  std::vector<bool> used(buckets, false);
  auto check = [&](const std::vector<std::uint32_t>& list, const char* name) {
    for (std::uint32_t b : list) {
      if (b >= buckets) throw InvalidArgument(std::string(name) + " bucket " + std::to_string(b) + " out of range");
      if (used[b]) throw InvalidArgument("bucket " + std::to_string(b) + " listed twice across arms");
      used[b] = true;
    }
  };
  check(treatment_buckets, "treatment");
  check(control_buckets, "control");
}

std::size_t Assignment::arm_size(Arm arm) const {
  return static_cast<std::size_t>(std::count_if(bucket_.begin(), bucket_.end(),
                                                [&](std::uint32_t b) { return arm_of_bucket_[b] == arm; }));
}

std::uint32_t bucket_of_unit(ClusterId unit, std::uint64_t salt, std::uint32_t buckets) {
  return static_cast<std::uint32_t>(unit_hash(unit, salt) % buckets);
}

Assignment assign(const Partition& p, const AssignmentSpec& spec) {
  spec.validate();
  Assignment a;
  a.spec_ = spec;
  a.arm_of_bucket_.assign(spec.buckets, Arm::holdout);
  for (std::uint32_t b : spec.treatment_buckets) a.arm_of_bucket_[b] = Arm::treatment;
  for (std::uint32_t b : spec.control_buckets) a.arm_of_bucket_[b] = Arm::control;
  a.unit_.assign(p.labels().begin(), p.labels().end());
  a.bucket_.resize(a.unit_.size());
  for (std::size_t i = 0; i < a.unit_.size(); ++i) {
    a.bucket_[i] = bucket_of_unit(a.unit_[i], spec.salt, spec.buckets);
  }
  return a;
}

ShareEventLog::ShareEventLog(Source source, std::vector<ShareEvent> events)
    : source_(source), events_(std::move(events)) {
  for (const ShareEvent& e : events_) {
    if (e.src == e.dst) throw InvalidArgument("share event with identical endpoints");
  }
}

ShareEventLog graph_events(const WeightedGraph& g) {
  std::vector<ShareEvent> events;
  events.reserve(2 * g.edge_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    for (const Neighbor& nb : g.neighbors(i)) events.push_back({i, nb.node, 1});
  }
  return ShareEventLog(ShareEventLog::Source::graph, std::move(events));
}

ShareEventLog load_events(const std::filesystem::path& path, const WeightedGraph& g) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<ShareEvent> events;
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t number = 0;
  const std::string source = path.string();
  while (std::getline(in, line)) {
    ++number;
    text::split_fields(line, fields);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 2 && fields.size() != 3) throw ParseError(source, number, "expected 'src dst [count]'");
    auto u = text::parse_u64(fields[0]);
    auto v = text::parse_u64(fields[1]);
    if (!u || !v) throw ParseError(source, number, "invalid node id");
    std::uint64_t count = 1;
    if (fields.size() == 3) {
      auto c = text::parse_u64(fields[2]);
      if (!c) throw ParseError(source, number, "invalid count");
      count = *c;
    }
    if (*u == *v) throw ParseError(source, number, "event endpoints must differ");
    auto iu = g.index_of(*u);
    auto iv = g.index_of(*v);
    if (!iu || !iv) throw ParseError(source, number, "event endpoint not in graph");
    events.push_back({*iu, *iv, count});
  }
  return ShareEventLog(ShareEventLog::Source::file, std::move(events));
}

std::optional<double> wgsr(const ShareEventLog& events, const Assignment& a, Arm group, Arm counterpart) {
  std::uint64_t within = 0;
  std::uint64_t reach = 0;
  for (const ShareEvent& e : events.events()) {
    if (a.arm_of_node(e.src) != group) continue;
    const Arm dst = a.arm_of_node(e.dst);
    if (dst == group) {
      within += e.count;
      reach += e.count;
    } else if (dst == counterpart) {
      reach += e.count;
    }
  }
  if (reach == 0) return std::nullopt;
  return static_cast<double>(within) / static_cast<double>(reach);
}

}  // namespace spillover
