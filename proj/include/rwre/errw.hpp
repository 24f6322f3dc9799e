#pragma once
// Linearly edge-reinforced walk on a finite (possibly planted) tree and its
// representation as a random walk in a random environment: Gamma edge
// variables alpha(e), sinh-family increments omega(e), the path-additive
// field U, and the mixture edge weights alpha(e) exp(-(U(u) + U(v))).
//
// Edge keys follow the tree convention: an edge is addressed by its child
// vertex, the root key addressing the planted edge when there is one. The
// base of a planted tree is state tree.n in the walk routines.

#include <iosfwd>
#include <vector>

#include "rwre/rng.hpp"
#include "rwre/treecore.hpp"

namespace rwre::errw {

using treecore::OrderedTree;

// Initial weight used by the scaled bundles: every edge starts at sqrt(n)/2.
double default_initial_weight(long n);

std::vector<double> uniform_weights(const OrderedTree& tree, double w0);

// Reinforced walk: an edge is crossed with probability proportional to its
// current weight and gains +1 afterwards. Returns the visited states,
// trajectory[0] = start; final_weight, when given, receives the reinforced
// weights (initial weight plus crossing count, per edge).
std::vector<int> simulate_errw(const OrderedTree& tree,
                               std::vector<double> weight, int start,
                               long long steps, Rng& rng,
                               std::vector<double>* final_weight = nullptr);

// Same transition rule with frozen weights (an ordinary conductance walk).
std::vector<int> simulate_weighted(const OrderedTree& tree,
                                   const std::vector<double>& weight,
                                   int start, long long steps, Rng& rng);

struct TrajectoryLaw {
  std::vector<std::vector<int>> path;
  std::vector<double> prob;
  // Index of a trajectory, -1 when absent.
  int find(const std::vector<int>& p) const;
};

// Exact law of the first `horizon` reinforced steps by full enumeration;
// guarded to trees of at most 6 vertices and horizons of at most 6.
TrajectoryLaw exact_trajectory_law(const OrderedTree& tree,
                                   const std::vector<double>& weight,
                                   int start, int horizon);

// f_alpha(x) = sqrt(alpha/(2 pi)) exp(-2 alpha sinh(x/2)^2 + x/2), a unit-mass
// density for every alpha > 0.
double sinh_log_density(double alpha, double x);
double sinh_density(double alpha, double x);

struct SinhSampleStats {
  long long proposals = 0;
  long long accepts = 0;
};

// Draw from f_alpha. For alpha >= 0.5: rejection from N(1/(2 alpha), 1/alpha)
// with acceptance probability exp(-alpha (cosh x - 1 - x^2/2)), so the
// overall acceptance rate is exactly exp(-1/(8 alpha)). Below 0.5 the tails
// are too fat for that proposal to stay efficient and an inverse-CDF lookup
// on an adaptive grid is used instead (stats, when given, then count one
// accepted proposal).
double sample_sinh(double alpha, Rng& rng, SinhSampleStats* stats = nullptr);

struct SinhEnvironment {
  std::vector<double> alpha;  // per edge key; root key = planted edge
  std::vector<double> omega;  // per edge key
  std::vector<double> U;      // per vertex, partial sums of omega from the base
};

// alpha(e) ~ Gamma(alpha0, 1) and omega(e) | alpha(e) ~ f_{alpha(e)},
// independent across edges; U accumulates omega along root paths (the base
// sits at U = 0, so U(root) is the planted-edge increment).
SinhEnvironment sample_sinh_environment(const OrderedTree& tree, double alpha0,
                                        Rng& rng);

// w(e) = alpha(e) exp(-(U(u) + U(v))) for e = {u, v}.
std::vector<double> mixture_weights(const OrderedTree& tree,
                                    const SinhEnvironment& env);

// Potential of the mixture weights read off the field directly:
// V(u) = U(parent(u)) + U(u) - log alpha(e_u). Must agree with -log w(e_u).
std::vector<double> mixture_potential(const OrderedTree& tree,
                                      const SinhEnvironment& env);

void write_environment_csv(std::ostream& os, const OrderedTree& tree,
                           const SinhEnvironment& env);

}  // namespace rwre::errw
