#pragma once
// Finite rooted plane trees with spatial marks: offspring laws, size-biased
// sampling of critical Galton-Watson trees conditioned on their total progeny
// (rejection on the total plus one cyclic rotation of the depth-first
// offspring sequence), contour traversals, and branching-random-walk style
// embeddings into R^d.
//
// Vertices are numbered in depth-first preorder; the root is 0. "Planted"
// trees carry an extra base vertex attached below the root; the base is never
// stored, it is the implicit endpoint of the root's parent edge.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre::treecore {

struct OffspringDistribution {
  std::vector<double> pmf;  // pmf[k] = P(k children)
  // Caller-asserted tail metadata; not checkable from a finite pmf.
  bool exponential_tails = true;
  // Optional exact sampler; inversion on the pmf when absent.
  std::function<int(Rng&)> sampler;

  double mean() const;
  double variance() const;
  // pmf sums to 1 and mean is 1, both within 1e-12 (critical law).
  void validate() const;
  int sample(Rng& rng) const;
};

// Geometric(1/2): P(k) = 2^{-(k+1)}, mean 1, variance 2. The sampler counts
// fair coin flips, so sampling is exact; the stored pmf is truncated where
// the tail drops below 1e-18.
OffspringDistribution geometric_half();

struct OrderedTree {
  int n = 0;
  std::vector<int> parent;                 // parent[0] = -1
  std::vector<std::vector<int>> children;  // ordered
  std::vector<int> depth;
  int root = 0;
  bool planted = false;

  void validate() const;
  bool is_ancestor(int a, int v) const;  // a on the root path of v (or equal)
};

// Builds a tree from a depth-first preorder offspring sequence.
OrderedTree tree_from_offspring(const std::vector<int>& offspring, bool planted);

// Critical Galton-Watson tree conditioned on total progeny n: draw n offspring
// counts until they sum to n-1 (budgeted), then rotate at the first minimum of
// the associated lattice path so the sequence becomes a valid preorder.
OrderedTree sample_gw_conditioned(const OffspringDistribution& law, int n,
                                  Rng& rng, long max_tries = 1000000,
                                  bool planted = true);

// Depth-first contour of the unplanted view: heights C(i) and the vertex
// visited at step i, for i = 0..2(n-1); C starts and ends at 0 and moves by
// exactly one per step.
struct ContourSequence {
  std::vector<int> heights;
  std::vector<int> visit;
  std::size_t length() const { return heights.size(); }
  void validate() const;
};

ContourSequence contour(const OrderedTree& tree);
OrderedTree tree_from_contour(const std::vector<int>& heights, bool planted);

// IID displacement law for the embedding; cov is d x d row-major metadata.
struct StepSampler {
  int d = 1;
  std::vector<double> cov;
  std::function<void(Rng&, double*)> draw;
};
StepSampler gaussian_steps(int d, double sigma);
StepSampler gaussian_steps_cov(const std::vector<double>& cov, int d);

// Spatial marks phi: phi(root) = 0, phi(u) = phi(parent) + y(u); the planted
// base sits at 0 as well (the root's edge increment is zero).
struct SpatialMarks {
  int d = 1;
  std::vector<double> incr;      // n*d, row per vertex; row 0 is zero
  std::vector<double> phi;       // n*d
  std::vector<double> step_cov;  // d*d metadata

  double phi1(int v) const { return phi[static_cast<std::size_t>(v) * d]; }
  const double* at(int v) const { return phi.data() + static_cast<std::size_t>(v) * d; }
};

SpatialMarks embed_brw(const OrderedTree& tree, const StepSampler& steps, Rng& rng);

// Head process R(i) = phi(u_i) along the contour; sizes must agree.
std::vector<double> head_function(const ContourSequence& seq,
                                  const SpatialMarks& marks, int n_vertices);

// Mass of a vertex is the length of its parent edge (root gets 0). Unit edge
// lengths unless given explicitly (edge key = child vertex).
std::vector<double> discrete_length_measure(const OrderedTree& tree);
std::vector<double> discrete_length_measure(const OrderedTree& tree,
                                            const std::vector<double>& edge_len);

// All preorder offspring sequences of plane trees with n vertices
// (Catalan(n-1) of them); intended for small n.
std::vector<std::vector<int>> enumerate_plane_trees(int n);

// Parent-array text and contour CSV.
void write_parent_array(std::ostream& os, const OrderedTree& tree);
OrderedTree read_parent_array(std::istream& is);
void write_contour_csv(std::ostream& os, const ContourSequence& seq,
                       const SpatialMarks* marks);

}  // namespace rwre::treecore
