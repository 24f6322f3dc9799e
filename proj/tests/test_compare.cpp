#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "rwre/compare.hpp"
#include "rwre/env1d.hpp"
#include "rwre/rng.hpp"

using namespace rwre;
using compare::Correspondence;
using compare::Coupling;
using compare::PointedSpace;

namespace {

// Points on a line become a pointed space with |a_i - a_j| distances.
PointedSpace line_space(const std::vector<double>& a, int root = 0) {
  PointedSpace x;
  x.n = static_cast<int>(a.size());
  x.root = root;
  x.dist.resize(a.size() * a.size());
  x.mass.assign(a.size(), 1.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      x.dist[i * a.size() + j] = std::abs(a[i] - a[j]);
  return x;
}

Correspondence diagonal(int n) {
  Correspondence c;
  for (int k = 0; k < n; ++k) c.pairs.emplace_back(k, k);
  return c;
}

}  // namespace

TEST_CASE("pointed space validation") {
  PointedSpace ok = line_space({0.0, 1.0, 3.0});
  CHECK_NOTHROW(ok.validate());

  PointedSpace asym = ok;
  asym.dist[1] = 2.0;  // d(0,1) != d(1,0)
  CHECK_THROWS_AS(asym.validate(), std::invalid_argument);

  PointedSpace diag = ok;
  diag.dist[0] = 0.5;
  CHECK_THROWS_AS(diag.validate(), std::invalid_argument);

  PointedSpace neg_mass = ok;
  neg_mass.mass[1] = -1.0;
  CHECK_THROWS_AS(neg_mass.validate(), std::invalid_argument);

  PointedSpace bad_root = ok;
  bad_root.root = 3;
  CHECK_THROWS_AS(bad_root.validate(), std::invalid_argument);

  // 0 -- 1 -- 2 with d(0,2) too long to be a metric.
  PointedSpace tri = ok;
  tri.dist = {0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0};
  CHECK_THROWS_AS(tri.validate(), std::invalid_argument);

  PointedSpace marked = ok;
  marked.mark_dim = 2;
  marked.marks.assign(5, 0.0);  // should be 6
  CHECK_THROWS_AS(marked.validate(), std::invalid_argument);
}

TEST_CASE("correspondence validation") {
  PointedSpace x = line_space({0.0, 1.0});
  PointedSpace y = line_space({0.0, 3.0});

  Correspondence c = diagonal(2);
  CHECK_NOTHROW(c.validate(x, y));
  CHECK(c.contains(0, 0));
  CHECK(c.contains(1, 1));
  CHECK(!c.contains(0, 1));

  Correspondence misses_right;
  misses_right.pairs = {{0, 0}, {1, 0}};
  CHECK_THROWS_AS(misses_right.validate(x, y), std::invalid_argument);

  Correspondence no_root;
  no_root.pairs = {{0, 1}, {1, 0}};
  CHECK_THROWS_AS(no_root.validate(x, y), std::invalid_argument);

  Correspondence empty;
  CHECK_THROWS_AS(empty.validate(x, y), std::invalid_argument);

  Correspondence oob;
  oob.pairs = {{0, 0}, {2, 1}};
  CHECK_THROWS_AS(oob.validate(x, y), std::invalid_argument);
}

TEST_CASE("distortion scans pairs of pairs") {
  PointedSpace x = line_space({0.0, 1.0});
  PointedSpace y = line_space({0.0, 3.0});
  Correspondence c = diagonal(2);
  CHECK(compare::distortion(c, x, y) == 2.0);
  c.pairs.emplace_back(0, 1);  // now (0,1) vs (0,0) compares 0 with 3
  CHECK(compare::distortion(c, x, y) == 3.0);
}

TEST_CASE("line distortion equals the brute force scan") {
  // Dyadic coordinates keep every distance and difference exact, so the
  // reduction to max minus min of the matched differences must agree with
  // the full scan bit for bit.
  Rng rng(173);
  std::vector<double> a = {0.0}, b = {0.0};
  for (int k = 0; k < 199; ++k) {
    a.push_back(a.back() + static_cast<double>(rng.next_u64() % 64) / 64.0);
    b.push_back(b.back() + static_cast<double>(rng.next_u64() % 64) / 64.0);
  }
  const double fast = compare::distortion_line(a, b);
  PointedSpace x = line_space(a);
  PointedSpace y = line_space(b);
  const double brute = compare::distortion(diagonal(static_cast<int>(a.size())), x, y);
  CHECK(fast == brute);

  CHECK(compare::distortion_line({0.0, 0.25, 0.5}, {0.0, 0.5, 0.75}) == 0.25);
  CHECK(compare::distortion_line({1.0}, {4.0}) == 0.0);  // single matched pair
  CHECK_THROWS_AS(compare::distortion_line({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(compare::distortion_line({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("discrepancy adds both marginal gaps without halving") {
  Coupling pi;
  pi.nx = 2;
  pi.ny = 2;
  pi.entries = {{0, 0, 0.5}, {1, 1, 0.5}};
  CHECK(pi.marginal_first() == std::vector<double>{0.5, 0.5});
  CHECK(pi.marginal_second() == std::vector<double>{0.5, 0.5});
  CHECK(compare::discrepancy(pi, {0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(compare::discrepancy(pi, {0.75, 0.5}, {0.5, 0.5}) == 0.25);
  CHECK(compare::discrepancy(pi, {0.75, 0.5}, {0.5, 0.625}) == 0.375);
  // Unnormalized masses are fine.
  Coupling heavy;
  heavy.nx = 1;
  heavy.ny = 1;
  heavy.entries = {{0, 0, 5.0}};
  CHECK(compare::discrepancy(heavy, {5.0}, {5.0}) == 0.0);
  CHECK(compare::discrepancy(heavy, {7.0}, {5.0}) == 2.0);

  Coupling bad = pi;
  bad.entries.emplace_back(2, 0, 0.1);
  CHECK_THROWS_AS(compare::discrepancy(bad, {0.5, 0.5}, {0.5, 0.5}),
                  std::invalid_argument);
  Coupling negw = pi;
  negw.entries.emplace_back(0, 1, -0.1);
  CHECK_THROWS_AS(compare::discrepancy(negw, {0.5, 0.5}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare::discrepancy(pi, {0.5}, {0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("coupling mass outside the correspondence") {
  Correspondence c = diagonal(2);
  Coupling pi;
  pi.nx = 2;
  pi.ny = 2;
  pi.entries = {{0, 0, 0.5}, {0, 1, 0.3}, {1, 1, 0.2}};
  CHECK(compare::coupling_outside(pi, c) == 0.3);
  pi.entries.pop_back();
  pi.entries.emplace_back(1, 0, 0.125);
  CHECK(compare::coupling_outside(pi, c) == 0.425);
}

TEST_CASE("the bound is the sum of its four parts") {
  // Two marked two-point spaces, every part nonzero and hand-computable.
  PointedSpace x = line_space({0.0, 1.0});
  x.mark_dim = 1;
  x.marks = {0.0, 0.5};
  PointedSpace y = line_space({0.0, 3.0});
  y.mark_dim = 1;
  y.marks = {0.0, 0.75};
  Correspondence c = diagonal(2);
  Coupling pi;
  pi.nx = 2;
  pi.ny = 2;
  pi.entries = {{0, 0, 0.5}, {0, 1, 0.25}, {1, 1, 0.25}};
  compare::GhBoundParts parts;
  const double bound = compare::spatial_gh_bound(x, y, c, pi, &parts);
  CHECK(parts.half_distortion == 1.0);  // distortion 2
  // First marginal (0.75, 0.25) vs mass (1, 1); second (0.5, 0.5) vs (1, 1).
  CHECK(parts.discrepancy == 0.25 + 0.75 + 0.5 + 0.5);
  CHECK(parts.outside == 0.25);
  CHECK(parts.marks == 0.25);
  CHECK(bound == parts.total());
  CHECK(bound == 1.0 + 2.0 + 0.25 + 0.25);

  Correspondence no_root;
  no_root.pairs = {{0, 1}, {1, 0}};
  CHECK_THROWS_AS(compare::spatial_gh_bound(x, y, no_root, pi), std::invalid_argument);

  PointedSpace unmarked_y = line_space({0.0, 3.0});
  CHECK_THROWS_AS(compare::marks_sup(c, x, unmarked_y), std::invalid_argument);
  PointedSpace ux = line_space({0.0, 1.0});
  CHECK(compare::marks_sup(c, ux, unmarked_y) == 0.0);
}

TEST_CASE("lattice correspondence pairs sites with grid points") {
  // m = 4, sites -2..3, grid {0, .25, .5, .6, .99}: the floor rule pairs
  // sites 0,1,2 with grid times; the remaining sites snap to their nearest
  // grid point, so the result is a surjection both ways.
  const std::vector<long> sites = {-2, -1, 0, 1, 2, 3};
  const std::vector<double> grid = {0.0, 0.25, 0.5, 0.6, 0.99};
  Correspondence c = compare::canonical_correspondence_lattice(4.0, sites, grid);
  CHECK(c.contains(2, 0));  // site 0 = floor(4 * 0)
  CHECK(c.contains(3, 1));  // site 1 = floor(4 * 0.25)
  CHECK(c.contains(4, 2));  // site 2 = floor(4 * 0.5)
  CHECK(c.contains(4, 3));  // site 2 = floor(4 * 0.6)
  PointedSpace x = line_space({-2.0, -1.0, 0.0, 1.0, 2.0, 3.0}, 2);
  PointedSpace y = line_space({0.0, 0.25, 0.5, 0.6, 0.99}, 0);
  CHECK_NOTHROW(c.validate(x, y));

  const std::vector<long> gap = {-2, 0, 1, 2, 3};
  CHECK_THROWS_AS(compare::canonical_correspondence_lattice(4.0, gap, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare::canonical_correspondence_lattice(0.0, sites, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare::canonical_correspondence_lattice(4.0, {}, grid),
                  std::invalid_argument);
}

TEST_CASE("contour correspondence pins both grid ends to the root") {
  // n = 3 vertices, contour positions 0..4; time 0 pairs with the first
  // root visit and time 1 clamps to the final one.
  const std::vector<double> grid = {0.0, 0.2, 0.5, 0.9, 1.0};
  Correspondence c = compare::canonical_correspondence_contour(3, grid);
  CHECK(c.contains(0, 0));
  CHECK(c.contains(1, 1));  // floor(6 * .2) = 1
  CHECK(c.contains(3, 2));  // floor(6 * .5) = 3
  CHECK(c.contains(4, 3));  // floor(6 * .9) = 5 clamps to 4
  CHECK(c.contains(4, 4));  // time 1 clamps to the last position
  PointedSpace x = line_space({0.0, 1.0, 2.0, 1.0, 0.01}, 0);
  PointedSpace y = line_space({0.0, 0.2, 0.5, 0.9, 1.0}, 0);
  CHECK_NOTHROW(c.validate(x, y));

  CHECK_THROWS_AS(compare::canonical_correspondence_contour(0, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare::canonical_correspondence_contour(3, {}),
                  std::invalid_argument);
}

TEST_CASE("two sample ks distance") {
  CHECK(compare::ks_distance({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(compare::ks_distance({0.0, 0.0}, {1.0, 1.0}) == 1.0);
  CHECK(compare::ks_distance({0.0, 1.0}, {0.5}) == 0.5);
  CHECK(compare::ks_distance({0.0, 1.0}, {0.25, 0.75}) == 0.5);
  CHECK_THROWS_AS(compare::ks_distance({}, {1.0}), std::invalid_argument);
}

TEST_CASE("localization statistic guards its inputs") {
  Rng rng(179);
  env1d::Environment1D env = env1d::sample_iid_env(
      -400, 400, env1d::gaussian_logrho_law(1.0), rng, 1.0);
  Rng walk_rng(181);
  CHECK_THROWS_AS(compare::localization_stat(env, 1, 8, walk_rng), std::domain_error);
  CHECK_THROWS_AS(compare::localization_stat(env, 100, 1, walk_rng),
                  std::invalid_argument);
  env1d::Environment1D no_meta = env;
  no_meta.sigma2_logrho = std::nan("");
  CHECK_THROWS_AS(compare::localization_stat(no_meta, 100, 8, walk_rng),
                  std::invalid_argument);

  const double stat = compare::localization_stat(env, 100, 16, walk_rng);
  CHECK(std::isfinite(stat));
  CHECK(stat >= 0.0);
}

TEST_CASE("ball restriction composes") {
  PointedSpace x = line_space({0.0, 1.0, 2.0, 3.0, 4.0});
  x.mass = {1.0, 2.0, 3.0, 4.0, 5.0};
  x.mark_dim = 1;
  x.marks = {0.0, 0.1, 0.2, 0.3, 0.4};

  PointedSpace b = compare::restrict_ball(x, 2.5);
  CHECK(b.n == 3);
  CHECK(b.root == 0);
  CHECK(b.mass == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(b.marks == std::vector<double>{0.0, 0.1, 0.2});
  CHECK(b.d(0, 2) == 2.0);

  PointedSpace via_big = compare::restrict_ball(compare::restrict_ball(x, 3.5), 1.5);
  PointedSpace direct = compare::restrict_ball(x, 1.5);
  CHECK(via_big.n == direct.n);
  CHECK(via_big.root == direct.root);
  CHECK(via_big.dist == direct.dist);
  CHECK(via_big.mass == direct.mass);
  CHECK(via_big.marks == direct.marks);

  PointedSpace just_root = compare::restrict_ball(x, 0.0);
  CHECK(just_root.n == 1);
  CHECK(just_root.root == 0);
  CHECK_THROWS_AS(compare::restrict_ball(x, -1.0), std::invalid_argument);
}
