#pragma once
// Random walks on finite trees through their electrical network: per-edge
// conductances, the potential V(u) = -log c(parent edge of u), the resistance
// metric (series sum of e^V over path edges, each keyed by its endpoint
// further from the root), the invariant measure nu, discrete-time walks,
// the nu-speed continuous-time motion, and a variational effective
// resistance solver.
//
// Edges are keyed by their child vertex. On planted trees the root's "parent
// edge" is the planted edge to the base; the base is the extra state with id
// tree.n in the walk simulators and carries conductance exactly 1.

#include <iosfwd>
#include <optional>
#include <tuple>
#include <vector>

#include "rwre/rng.hpp"
#include "rwre/treecore.hpp"

namespace rwre::treewalk {

using treecore::OrderedTree;
using treecore::SpatialMarks;

struct TreeConductances {
  OrderedTree tree;
  std::vector<double> c;  // by child key; c[root] is the planted edge
  double beta = 1.0;      // bias metadata
  double gamma = 1.0;     // bias exponent scale metadata
  void validate() const;  // positivity; planted edge exactly 1
};

// Spatially biased conductances. Default mode:
//   c({u,v}) = beta^(gamma * max(phi1(u), phi1(v)))
// with the base's phi1 = 0, which forces the planted edge to 1. With a
// direction ell (unit vector in R^d) the rule becomes
//   c({u,v}) = exp(gamma * (phi(u) + phi(v)) . ell),
// the bias strength folded into gamma. beta must be >= 1 in either mode.
TreeConductances biased_conductances(const OrderedTree& tree,
                                     const SpatialMarks& marks, double beta,
                                     double gamma,
                                     const std::vector<double>* ell = nullptr);

struct TreePotential {
  std::vector<double> v;  // per vertex; v[root] = 0 on planted trees
  double at(int u) const { return v[static_cast<std::size_t>(u)]; }
};

TreePotential tree_potential(const TreeConductances& cond);

// Resistance between two vertices: sum of e^{V} over the path edges, each
// edge contributing at its child endpoint; 0 for equal arguments. Arguments
// are put in a canonical order first so the result is exactly symmetric.
double tree_resistance(const OrderedTree& tree, const TreePotential& pot,
                       int u1, int u2);

// nu(u) = e^{-V(u)} + sum over children e^{-V(child)}; the first term is the
// parent-edge conductance and is dropped at the root of an unplanted tree.
std::vector<double> tree_invariant(const OrderedTree& tree, const TreePotential& pot);

int lca(const OrderedTree& tree, int a, int b);
// The meeting vertex of the three pairwise paths.
int branch_vertex(const OrderedTree& tree, int a, int b, int c);

// Metric-measure bundle with scale metadata. Scaled quantities multiply the
// raw ones by scale_r / scale_nu; with power-of-two scales this is exact.
struct TreeMetricMeasure {
  OrderedTree tree;
  TreePotential pot;
  std::vector<double> nu;  // raw, per vertex
  double nu_base = 0.0;    // raw mass of the base state (planted trees)
  double scale_r = 1.0;
  double scale_nu = 1.0;

  int base_id() const { return tree.n; }
  bool has_base() const { return tree.planted; }
  double edge_resistance(int child_key) const;   // raw, adjacent pair
  double edge_conductance(int child_key) const;  // exp(-V), raw
  double r(int u1, int u2) const;                // scaled metric; base allowed
  double nu_at(int u) const;                     // scaled; base allowed
  // Sum over neighbours of 1 / (2 nu_scaled(u) r_scaled(u,w)). Numerator and
  // denominator share the same conductance sum, so with power-of-two scales
  // the result is exact.
  double total_exit_rate(int u) const;

  std::vector<int> neighbours(int u) const;
};

TreeMetricMeasure make_metric_measure(const TreeConductances& cond,
                                      double scale_r = 1.0, double scale_nu = 1.0);

// Discrete-time walk; transition probabilities proportional to the incident
// conductances (planted edge included, the base is state tree.n).
int simulate_discrete(const TreeConductances& cond, int start, long long steps,
                      Rng& rng, std::vector<long long>* occupation = nullptr);

struct TimedPath {
  std::vector<double> t;   // jump times
  std::vector<int> site;   // state entered at t
};

// nu-speed motion: edge (x,y) fires at rate 1/(2 nu_scaled(x) r_scaled(x,y)),
// one exponential clock per incident edge.
TimedPath simulate_speed_motion(const TreeMetricMeasure& mm, int start,
                                double horizon, Rng& rng);

struct HitResult {
  int hit = -1;        // which target was reached
  double time = 0.0;   // total elapsed time
  std::vector<double> occupation;  // holding time per state (size n+1)
};

// Runs the speed motion until one of the targets is entered.
HitResult speed_motion_until_hit(const TreeMetricMeasure& mm, int start,
                                 const std::vector<int>& targets, Rng& rng);

// Effective resistance of a finite network by minimizing the Dirichlet
// energy sum_e c(e) (f(x)-f(y))^2 with f(u1) = 0, f(u2) = 1; returns the
// reciprocal of the minimal energy. Throws on disconnected input or more
// than 1e3 vertices.
double effective_resistance_variational(
    int n, const std::vector<std::tuple<int, int, double>>& edges, int u1, int u2);

void write_timed_path_csv(std::ostream& os, const TimedPath& path,
                          const SpatialMarks* marks);
void write_bundle_summary_json(std::ostream& os, const TreeMetricMeasure& mm,
                               long n, double beta, double gamma);

}  // namespace rwre::treewalk
