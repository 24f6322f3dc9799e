#pragma once
// Correspondence machinery for pointed metric measure spaces with optional
// Euclidean marks: distortion, coupling discrepancy, the upper bound they
// give on spatial Gromov-Hausdorff-Prokhorov-type distances, canonical
// correspondences for lattice and contour rescalings, and quenched
// localization statistics.

#include <vector>

#include "rwre/env1d.hpp"
#include "rwre/rng.hpp"

namespace rwre::compare {

struct PointedSpace {
  int n = 0;
  int root = 0;
  std::vector<double> dist;   // n*n, row-major
  std::vector<double> mass;   // n
  int mark_dim = 0;
  std::vector<double> marks;  // n*mark_dim when mark_dim > 0

  double d(int i, int j) const {
    return dist[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
  }
  const double* mark(int i) const {
    return marks.data() + static_cast<std::size_t>(i) * mark_dim;
  }
  // Diagonal, symmetry, nonnegativity within 1e-9; the O(n^3) triangle
  // inequality scan only up to 512 points.
  void validate() const;
};

struct Correspondence {
  std::vector<std::pair<int, int>> pairs;
  // Surjectivity onto both sides and the presence of the root pair.
  void validate(const PointedSpace& x, const PointedSpace& y) const;
  bool contains(int i, int j) const;
};

// Unnormalized nonnegative joint weights; sparse list of (i, j, mass).
struct Coupling {
  int nx = 0, ny = 0;
  std::vector<std::tuple<int, int, double>> entries;
  std::vector<double> marginal_first() const;
  std::vector<double> marginal_second() const;
};

// sup over pairs of correspondence pairs of |d(x,y) - d'(x',y')|.
double distortion(const Correspondence& c, const PointedSpace& x,
                  const PointedSpace& y);

// Distortion of a monotone correspondence between two subsets of lines,
// given the matched signed coordinates of the k-th pair: since both
// coordinate sequences are nondecreasing, the sup reduces to
// max_k (a_k - b_k) - min_k (a_k - b_k).
double distortion_line(const std::vector<double>& a, const std::vector<double>& b);

// Sum over points of |marginal - target|, first and second marginals added.
// Total variation convention used throughout: plain sum of absolute
// differences, no 1/2, so perturbing one marginal entry by eps moves the
// discrepancy by exactly eps. Couplings and targets need not be normalized.
double discrepancy(const Coupling& pi, const std::vector<double>& nu,
                   const std::vector<double>& nu_prime);

// Mass the coupling places outside the correspondence.
double coupling_outside(const Coupling& pi, const Correspondence& c);

// sup over correspondence pairs of the Euclidean distance between marks;
// 0 when both spaces are unmarked.
double marks_sup(const Correspondence& c, const PointedSpace& x,
                 const PointedSpace& y);

struct GhBoundParts {
  double half_distortion = 0.0;
  double discrepancy = 0.0;
  double outside = 0.0;
  double marks = 0.0;
  double total() const { return half_distortion + discrepancy + outside + marks; }
};

// (1/2) dis(c) + D(pi; nu, nu') + pi(c-complement) + sup marks gap: an upper
// bound on the pointed-space distance. Throws when the root pair is missing.
double spatial_gh_bound(const PointedSpace& x, const PointedSpace& y,
                        const Correspondence& c, const Coupling& pi,
                        GhBoundParts* parts = nullptr);

// Pairs lattice index p (site sites[p]) with grid index j (point grid[j])
// whenever sites[p] = floor(m * grid[j]), completed to a surjection by
// snapping every site to its nearest grid point. Sites must be contiguous
// and increasing.
Correspondence canonical_correspondence_lattice(double m,
                                                const std::vector<long>& sites,
                                                const std::vector<double>& grid);

// Pairs contour position i with grid time index j whenever
// i = min(floor(2n * grid[j]), 2n - 2), completed to cover every contour
// position. Time 0 maps to the first root visit and the clamp sends time 1
// to the final one, so both ends of the grid pair with the root.
Correspondence canonical_correspondence_contour(long n,
                                                const std::vector<double>& grid);

// Two-sample Kolmogorov-Smirnov statistic; empty input is an error.
double ks_distance(const std::vector<double>& a, const std::vector<double>& b);

// Quenched spread: runs `walkers` independent walks of length n in the fixed
// environment and returns the interquartile range of sigma^2 X_n / (log n)^2.
// n <= 1 is a domain error (log 1 = 0); sigma^2 comes from the environment
// metadata.
double localization_stat(const env1d::Environment1D& env, long long n,
                         int walkers, Rng& rng);

// Closed ball of radius R around the root, as a pointed subspace.
PointedSpace restrict_ball(const PointedSpace& x, double R);

}  // namespace rwre::compare
