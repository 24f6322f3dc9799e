#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rwre/rng.hpp"
#include "rwre/stats.hpp"
#include "rwre/treecore.hpp"

using namespace rwre;
using treecore::OrderedTree;

TEST_CASE("offspring sequences build the expected small trees") {
  // Path on three vertices: root -> 1 -> 2.
  OrderedTree path = treecore::tree_from_offspring({1, 1, 0}, false);
  CHECK(path.n == 3);
  CHECK(path.parent == std::vector<int>{-1, 0, 1});
  CHECK(path.depth == std::vector<int>{0, 1, 2});
  CHECK(path.children[0] == std::vector<int>{1});
  CHECK(path.is_ancestor(0, 2));
  CHECK(!path.is_ancestor(2, 0));

  // Cherry: root with two leaves, preorder (2, 0, 0).
  OrderedTree cherry = treecore::tree_from_offspring({2, 0, 0}, true);
  CHECK(cherry.parent == std::vector<int>{-1, 0, 0});
  CHECK(cherry.planted);
}

TEST_CASE("offspring validation rejects non-critical laws") {
  treecore::OffspringDistribution law;
  law.pmf = {0.5, 0.3, 0.2};  // mean 0.7
  CHECK_THROWS_AS(law.validate(), std::invalid_argument);
  law.pmf = {0.25, 0.5, 0.25};  // mean 1, sums to 1
  CHECK_NOTHROW(law.validate());
  CHECK(law.variance() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("geometric offspring law is critical with variance 2") {
  treecore::OffspringDistribution law = treecore::geometric_half();
  CHECK_NOTHROW(law.validate());
  CHECK(law.mean() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(law.variance() == doctest::Approx(2.0).epsilon(1e-12));

  // The coin-flip sampler must reproduce the stored pmf.
  Rng rng(13);
  const int n = 40000;
  std::vector<long long> counts(12, 0);
  for (int i = 0; i < n; ++i) {
    int k = law.sample(rng);
    counts[static_cast<std::size_t>(std::min(k, 11))] += 1;
  }
  std::vector<double> expected(12);
  double tail = 1.0;
  for (int k = 0; k < 11; ++k) {
    expected[static_cast<std::size_t>(k)] = n * std::pow(0.5, k + 1);
    tail -= std::pow(0.5, k + 1);
  }
  expected[11] = n * tail;
  double chi2 = 0.0;
  for (int k = 0; k < 12; ++k) {
    double diff = static_cast<double>(counts[static_cast<std::size_t>(k)]) -
                  expected[static_cast<std::size_t>(k)];
    chi2 += diff * diff / expected[static_cast<std::size_t>(k)];
  }
  CHECK(chi2 < 35.0);  // chi^2 with 11 dof, far tail
}

TEST_CASE("contour sequences of the three smallest shapes") {
  OrderedTree p2 = treecore::tree_from_offspring({1, 0}, false);
  OrderedTree p3 = treecore::tree_from_offspring({1, 1, 0}, false);
  OrderedTree cherry = treecore::tree_from_offspring({2, 0, 0}, false);
  CHECK(treecore::contour(p2).heights == std::vector<int>{0, 1, 0});
  CHECK(treecore::contour(p3).heights == std::vector<int>{0, 1, 2, 1, 0});
  CHECK(treecore::contour(cherry).heights == std::vector<int>{0, 1, 0, 1, 0});
  CHECK(treecore::contour(cherry).visit == std::vector<int>{0, 1, 0, 2, 0});
  CHECK(treecore::contour(p3).length() == 2 * 3 - 1);
  CHECK_NOTHROW(treecore::contour(p3).validate());
}

TEST_CASE("contour round-trips every plane tree on five vertices") {
  auto shapes = treecore::enumerate_plane_trees(5);
  CHECK(shapes.size() == 14);  // Catalan(4)
  for (const auto& off : shapes) {
    OrderedTree t = treecore::tree_from_offspring(off, true);
    treecore::ContourSequence seq = treecore::contour(t);
    OrderedTree back = treecore::tree_from_contour(seq.heights, true);
    CHECK(back.parent == t.parent);
    CHECK(back.planted == t.planted);
  }
}

TEST_CASE("plane tree enumeration counts Catalan numbers") {
  CHECK(treecore::enumerate_plane_trees(1).size() == 1);
  CHECK(treecore::enumerate_plane_trees(2).size() == 1);
  CHECK(treecore::enumerate_plane_trees(3).size() == 2);
  CHECK(treecore::enumerate_plane_trees(4).size() == 5);
  CHECK(treecore::enumerate_plane_trees(6).size() == 42);
}

TEST_CASE("conditioned geometric trees are uniform over shapes") {
  // Geometric(1/2) offspring conditioned on total progeny n makes every
  // plane tree with n vertices equally likely; check by chi-square on n = 4.
  auto shapes = treecore::enumerate_plane_trees(4);
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    index[shapes[i]] = static_cast<int>(i);
  treecore::OffspringDistribution law = treecore::geometric_half();
  Rng rng(29);
  const int n = 5000;
  std::vector<int> counts(shapes.size(), 0);
  for (int i = 0; i < n; ++i) {
    OrderedTree t = treecore::sample_gw_conditioned(law, 4, rng);
    std::vector<int> off(4);
    for (int v = 0; v < 4; ++v)
      off[static_cast<std::size_t>(v)] =
          static_cast<int>(t.children[static_cast<std::size_t>(v)].size());
    auto it = index.find(off);
    REQUIRE(it != index.end());
    counts[static_cast<std::size_t>(it->second)] += 1;
  }
  const double expected = static_cast<double>(n) / 5.0;
  double chi2 = 0.0;
  for (int c : counts) {
    const double diff = c - expected;
    chi2 += diff * diff / expected;
  }
  CHECK(chi2 < 23.5);  // 4 dof, p ~ 1e-4
}

TEST_CASE("conditioning on an unreachable size exhausts its budget") {
  // Only 0 or 2 children forces an odd total, so n = 4 can never be hit.
  treecore::OffspringDistribution law;
  law.pmf = {0.5, 0.0, 0.5};
  Rng rng(1);
  CHECK_THROWS_AS(treecore::sample_gw_conditioned(law, 4, rng, 2000),
                  std::runtime_error);
  OrderedTree t = treecore::sample_gw_conditioned(law, 5, rng);
  CHECK(t.n == 5);
}

TEST_CASE("embedded marks are prefix sums of increments") {
  treecore::OffspringDistribution law = treecore::geometric_half();
  Rng rng(37);
  OrderedTree t = treecore::sample_gw_conditioned(law, 60, rng);
  treecore::StepSampler steps = treecore::gaussian_steps(3, 0.9);
  treecore::SpatialMarks marks = treecore::embed_brw(t, steps, rng);
  CHECK(marks.d == 3);
  for (int k = 0; k < 3; ++k)
    CHECK(marks.at(t.root)[k] == 0.0);  // root pinned at the origin
  for (int v = 0; v < t.n; ++v) {
    if (v == t.root) continue;
    const double* pv = marks.at(v);
    const double* pp = marks.at(t.parent[static_cast<std::size_t>(v)]);
    const double* inc = marks.incr.data() + static_cast<std::size_t>(v) * 3;
    for (int k = 0; k < 3; ++k)
      CHECK(pv[k] == pp[k] + inc[k]);  // exact: stored as this very sum
  }
}

TEST_CASE("gaussian step samplers have the requested covariance") {
  Rng rng(43);
  const int n = 20000;
  treecore::StepSampler iso = treecore::gaussian_steps(2, 2.0);
  std::vector<double> x(n), y(n);
  std::vector<double> buf(2);
  for (int i = 0; i < n; ++i) {
    iso.draw(rng, buf.data());
    x[static_cast<std::size_t>(i)] = buf[0];
    y[static_cast<std::size_t>(i)] = buf[1];
  }
  // Var = 4 per coordinate, SE(var) ~ 4 sqrt(2/n).
  CHECK(std::abs(stats::variance(x) - 4.0) < 4.0 * 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(stats::variance(y) - 4.0) < 4.0 * 4.0 * std::sqrt(2.0 / n));
  double cross = 0.0;
  for (int i = 0; i < n; ++i)
    cross += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  cross /= n;
  CHECK(std::abs(cross) < 4.0 * 4.0 / std::sqrt(static_cast<double>(n)));

  treecore::StepSampler cov = treecore::gaussian_steps_cov({2.0, 1.0, 1.0, 2.0}, 2);
  for (int i = 0; i < n; ++i) {
    cov.draw(rng, buf.data());
    x[static_cast<std::size_t>(i)] = buf[0];
    y[static_cast<std::size_t>(i)] = buf[1];
  }
  cross = 0.0;
  for (int i = 0; i < n; ++i)
    cross += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  cross /= n;
  CHECK(std::abs(stats::variance(x) - 2.0) < 4.0 * 2.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cross - 1.0) < 4.0 * 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("head function reads marks along the contour") {
  OrderedTree cherry = treecore::tree_from_offspring({2, 0, 0}, false);
  treecore::SpatialMarks marks;
  marks.d = 1;
  marks.incr = {0.0, 1.5, -2.0};
  marks.phi = {0.0, 1.5, -2.0};
  treecore::ContourSequence seq = treecore::contour(cherry);
  std::vector<double> head = treecore::head_function(seq, marks, cherry.n);
  REQUIRE(head.size() == seq.length());
  CHECK(head == std::vector<double>{0.0, 1.5, 0.0, -2.0, 0.0});
}

TEST_CASE("length measure weights vertices by their parent edge") {
  OrderedTree p3 = treecore::tree_from_offspring({1, 1, 0}, false);
  std::vector<double> unit = treecore::discrete_length_measure(p3);
  CHECK(unit == std::vector<double>{0.0, 1.0, 1.0});
  std::vector<double> weighted =
      treecore::discrete_length_measure(p3, {0.0, 0.5, 2.25});
  CHECK(weighted == std::vector<double>{0.0, 0.5, 2.25});
}

TEST_CASE("parent arrays serialize and parse back") {
  treecore::OffspringDistribution law = treecore::geometric_half();
  Rng rng(47);
  OrderedTree t = treecore::sample_gw_conditioned(law, 25, rng);
  std::stringstream ss;
  treecore::write_parent_array(ss, t);
  OrderedTree back = treecore::read_parent_array(ss);
  CHECK(back.parent == t.parent);
  CHECK(back.planted == t.planted);
  CHECK(back.depth == t.depth);
}

TEST_CASE("contour csv includes marks when given") {
  OrderedTree p2 = treecore::tree_from_offspring({1, 0}, false);
  treecore::SpatialMarks marks;
  marks.d = 2;
  marks.incr = {0.0, 0.0, 0.25, -1.0};
  marks.phi = {0.0, 0.0, 0.25, -1.0};
  std::stringstream ss;
  treecore::write_contour_csv(ss, treecore::contour(p2), &marks);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "i,c,vertex,r0,r1");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 3);
}
