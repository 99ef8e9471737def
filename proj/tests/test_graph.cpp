#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>

#include <gtest/gtest.h>

#include "spillover/error.hpp"
#include "spillover/graph.hpp"

namespace fs = std::filesystem;
using namespace spillover;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spillover_graph_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& body) {
    fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

double degree_sum(const WeightedGraph& g) {
  auto d = g.degrees();
  return std::accumulate(d.begin(), d.end(), 0.0);
}

}  // namespace

TEST(GraphBuilder, SumsDuplicatesAndDropsZeroWeights) {
  GraphBuilder b;
  b.add_edge(5, 9, 1.0);
  b.add_edge(9, 5, 2.0);
  b.add_edge(5, 7, 0.0);
  WeightedGraph g = b.build();
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(g.weight(*g.index_of(5), *g.index_of(9)), 3.0);
  EXPECT_DOUBLE_EQ(g.weight(*g.index_of(5), *g.index_of(7)), 0.0);
  EXPECT_DOUBLE_EQ(g.total_weight(), 3.0);
  EXPECT_DOUBLE_EQ(degree_sum(g), 2.0 * g.total_weight());
}

TEST(GraphBuilder, RejectsSelfLoopsAndNegativeWeights) {
  GraphBuilder b;
  EXPECT_THROW(b.add_edge(1, 1, 1.0), InvalidArgument);
  EXPECT_THROW(b.add_edge(1, 2, -0.5), InvalidArgument);
}

TEST(GraphBuilder, NodesOrderedById) {
  GraphBuilder b;
  b.add_edge(30, 10, 1.0);
  b.add_edge(20, 10, 1.0);
  WeightedGraph g = b.build();
  ASSERT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.id_of(0), 10u);
  EXPECT_EQ(g.id_of(1), 20u);
  EXPECT_EQ(g.id_of(2), 30u);
  EXPECT_FALSE(g.index_of(15).has_value());
}

TEST_F(TempDir, DirectedInputSymmetrizesBySummation) {
  WeightedGraph g = load_edge_list(write("e.txt", "1 2 2.0\n2 1 1.0\n"), true);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 3.0);
}

TEST_F(TempDir, EmptyFileGivesEmptyGraph) {
  WeightedGraph g = load_edge_list(write("e.txt", ""), false);
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_DOUBLE_EQ(g.total_weight(), 0.0);
}

TEST_F(TempDir, DefaultWeightIsOne) {
  WeightedGraph g = load_edge_list(write("e.txt", "# path\n1 2\n\n2 3\n"), false);
  EXPECT_DOUBLE_EQ(g.degree(*g.index_of(2)), 2.0);
}

TEST_F(TempDir, ParseErrorsCarryLineNumbers) {
  auto expect_line = [&](const std::string& body, std::size_t line) {
    try {
      load_edge_list(write("bad.txt", body), false);
      FAIL() << "no error for: " << body;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  expect_line("1 2\n3 3\n", 2);
  expect_line("1 2\n# c\n1 x\n", 3);
  expect_line("1 2 -1\n", 1);
  expect_line("1\n", 1);
}

TEST_F(TempDir, MultiBehaviorSingleBehavior) {
  BehaviorWeights w({{0, 0.5}});
  WeightedGraph g = build_multi_behavior(write("b.txt", "1 2 0 4.0\n"), w);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 2.0);
}

TEST_F(TempDir, MultiBehaviorTwoBehaviors) {
  BehaviorWeights w({{0, 1.0}, {1, 0.25}});
  WeightedGraph g = build_multi_behavior(write("b.txt", "1 2 0 1.0\n1 2 1 2.0\n"), w);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 1.5);
}

TEST_F(TempDir, MultiBehaviorIsLinearInWeights) {
  const std::string body = "1 2 0 1.0\n2 3 1 2.0\n1 3 0 0.5\n3 1 1 4.0\n";
  WeightedGraph a = build_multi_behavior(write("b.txt", body), BehaviorWeights({{0, 1.0}, {1, 0.3}}));
  WeightedGraph b = build_multi_behavior(write("b.txt", body), BehaviorWeights({{0, 2.0}, {1, 0.6}}));
  EXPECT_DOUBLE_EQ(b.total_weight(), 2.0 * a.total_weight());
  for (NodeIndex i = 0; i < 3; ++i) {
    for (NodeIndex j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(b.weight(i, j), 2.0 * a.weight(i, j));
  }
}

TEST_F(TempDir, MultiBehaviorErrors) {
  BehaviorWeights w({{0, 1.0}});
  EXPECT_THROW(build_multi_behavior(write("b.txt", "1 2 7 1.0\n"), w), DataError);
  EXPECT_THROW(build_multi_behavior(write("b.txt", "1 2 0 -1.0\n"), w), DataError);
}

TEST(BehaviorWeights, Validation) {
  EXPECT_THROW(BehaviorWeights({{0, 0.0}, {1, 0.0}}), InvalidArgument);
  EXPECT_THROW(BehaviorWeights({{0, 1.0}, {0, 2.0}}), InvalidArgument);
  EXPECT_THROW(BehaviorWeights({{0, -1.0}}), InvalidArgument);
  BehaviorWeights w({{3, 1.0}, {1, 0.0}});
  EXPECT_EQ(w.size(), 2u);
  EXPECT_EQ(w.weight_of(1), 0.0);
  EXPECT_FALSE(w.weight_of(2).has_value());
}

TEST(WattsStrogatz, RingLatticeWhenNoRewiring) {
  WeightedGraph g = watts_strogatz(10, 4, 0.0, 1);
  EXPECT_EQ(g.edge_count(), 20u);
  for (NodeIndex i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(g.degree(i), 4.0);
  EXPECT_DOUBLE_EQ(g.weight(0, 9), 1.0);
  EXPECT_DOUBLE_EQ(g.weight(0, 8), 1.0);
  EXPECT_DOUBLE_EQ(g.weight(0, 3), 0.0);
}

TEST(WattsStrogatz, RewiringPreservesEdgeCount) {
  WeightedGraph g = watts_strogatz(10000, 10, 0.1, 7);
  EXPECT_EQ(g.edge_count(), 50000u);
  EXPECT_DOUBLE_EQ(g.mean_degree(), 10.0);
  EXPECT_DOUBLE_EQ(degree_sum(g), 2.0 * g.total_weight());
}

TEST(WattsStrogatz, DeterministicInSeed) {
  EXPECT_EQ(watts_strogatz(10000, 4, 0.1, 3), watts_strogatz(10000, 4, 0.1, 3));
  EXPECT_FALSE(watts_strogatz(1000, 4, 0.1, 3) == watts_strogatz(1000, 4, 0.1, 4));
}

TEST(WattsStrogatz, RewiresAboutPFraction) {
  WeightedGraph g = watts_strogatz(5000, 10, 0.2, 11);
  std::size_t lattice = 0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    for (const Neighbor& nb : g.neighbors(i)) {
      const std::size_t d = (nb.node + g.node_count() - i) % g.node_count();
      if (d >= 1 && d <= 5) ++lattice;
    }
  }
  const double kept = static_cast<double>(lattice) / static_cast<double>(g.edge_count());
  EXPECT_NEAR(kept, 0.8, 0.02);
}

TEST(WattsStrogatz, InvalidParameters) {
  EXPECT_THROW(watts_strogatz(10, 3, 0.1, 0), InvalidArgument);
  EXPECT_THROW(watts_strogatz(10, 10, 0.1, 0), InvalidArgument);
  EXPECT_THROW(watts_strogatz(10, 0, 0.1, 0), InvalidArgument);
  EXPECT_THROW(watts_strogatz(10, 4, 1.5, 0), InvalidArgument);
}

TEST_F(TempDir, EdgeListRoundTrip) {
  for (const WeightedGraph& g : {watts_strogatz(10, 4, 0.0, 1), watts_strogatz(10000, 10, 0.1, 7),
                                 watts_strogatz(10000, 4, 0.1, 3)}) {
    fs::path p = dir_ / "rt.txt";
    write_edge_list(g, p);
    EXPECT_EQ(load_edge_list(p, false), g);
  }
}

TEST_F(TempDir, EdgeListCanonicalForm) {
  GraphBuilder b;
  b.add_edge(9, 2, 0.25);
  b.add_edge(4, 2, 1.0);
  fs::path p = dir_ / "c.txt";
  write_edge_list(b.build(), p);
  std::ifstream in(p);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(all, "2 4 1\n2 9 0.25\n");

  write_edge_list(WeightedGraph{}, p);
  EXPECT_EQ(fs::file_size(p), 0u);
}
