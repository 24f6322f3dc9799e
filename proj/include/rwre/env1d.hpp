#pragma once
// One-dimensional random environments on an integer window around the origin:
// site transition laws, the associated potential, resistance and invariant
// measure in the electrical-network picture, barrier (mark-driven)
// environments, and a nearest-neighbour walk simulator.
//
// Conventions. rho_z = omega^-_z / omega^+_z; the potential accumulates
// log rho to the right of the origin and is anchored at V(0) = 0. The edge
// {z, z+1} carries resistance e^{V(z)}, so r(x,y) = sum_{z=x}^{y-1} e^{V(z)}
// for x < y. The invariant measure is nu(x) = e^{-V(x)} + e^{-V(x-1)}.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre::env1d {

struct Environment1D {
  int lo = 0;  // window [lo, hi], must contain 0
  int hi = 0;
  std::vector<double> omega_minus;  // per site, each in (0,1)
  int flatten_index = 1;            // m; composes multiplicatively under flatten()
  // Var(log rho) of the generating law, NaN when unknown. flatten() divides it.
  double sigma2_logrho = std::nan("");

  int size() const { return hi - lo + 1; }
  bool in_window(int z) const { return z >= lo && z <= hi; }
  int idx(int z) const { return z - lo; }
  double wminus(int z) const { return omega_minus[static_cast<std::size_t>(idx(z))]; }
  double wplus(int z) const { return 1.0 - wminus(z); }
  double log_rho(int z) const;  // log(omega^-) - log(omega^+), in log space
  void validate() const;        // window sane, every omega in (0,1)
};

struct Potential1D {
  int lo = 0;
  int hi = 0;
  std::vector<double> values;  // V at sites lo..hi, values at 0 is exactly 0
  double sigma2 = std::nan("");  // metadata copied from the environment
  bool in_window(int z) const { return z >= lo && z <= hi; }
  double at(int z) const { return values[static_cast<std::size_t>(z - lo)]; }
};

// Bernoulli barrier marks with their cumulative count. beta is anchored at
// beta(0) = 0, increases by xi_z across each site to the right, and the
// negative branch is -sum_{k=z+1}^{0} xi_k, the convention under which
// V(z) = log(q/p) * beta(z) holds exactly at every site.
struct BarrierEnvironment {
  int lo = 0;
  int hi = 0;
  double success_prob = 0.0;  // mark probability
  double p = 0.5;             // rightward probability at marked sites
  std::vector<std::uint8_t> xi;
  std::vector<int> beta;

  bool in_window(int z) const { return z >= lo && z <= hi; }
  int mark(int z) const { return xi[static_cast<std::size_t>(z - lo)]; }
  int beta_at(int z) const { return beta[static_cast<std::size_t>(z - lo)]; }
  // Walk view: (p, 1-p) at marked sites, (1/2, 1/2) elsewhere.
  Environment1D as_environment() const;
};

// Flattening: rho_z(m) = rho_z^{1/sqrt(m)}, applied in log space.
// m must be >= 1; m = 1 is the identity. Indices compose multiplicatively.
Environment1D flatten(const Environment1D& env, int m);

Potential1D potential1d(const Environment1D& env);

// Resistance between two window sites (series sum of e^V over edges between
// them); symmetric, 0 for x == y. Out-of-window arguments throw.
double resistance1d(const Potential1D& pot, int x, int y);

// nu(x) = e^{-V(x)} + e^{-V(x-1)}; requires x-1 and x in window.
double invariant1d(const Potential1D& pot, int x);

// Rightward transition probability implied by the potential at site x,
// e^{-V(x)} / (e^{-V(x-1)} + e^{-V(x)}).
double right_probability(const Potential1D& pot, int x);

BarrierEnvironment barrier_env(int lo, int hi, double success_prob, double p,
                               Rng& rng);
Potential1D barrier_potential(const BarrierEnvironment& env);

// IID environment with a pluggable law for omega^-; the only admissibility
// check is 0 < omega < 1. sigma2_logrho is caller-supplied metadata.
Environment1D sample_iid_env(int lo, int hi,
                             const std::function<double(Rng&)>& omega_minus_law,
                             Rng& rng, double sigma2_logrho = std::nan(""));

// omega^- = logistic(N(0, sigma^2)), i.e. log rho ~ N(0, sigma^2).
std::function<double(Rng&)> gaussian_logrho_law(double sigma);

// Precomputed stepping table; thresholds are omega^+ scaled to 2^64 so the
// inner loop is one generator call, one compare, one add.
class WalkTable {
 public:
  explicit WalkTable(const Environment1D& env);
  // Walks `steps` steps from `start`; throws if the walk leaves the window.
  int endpoint(int start, long long steps, Rng& rng) const;
  // Positions at steps 0, stride, 2*stride, ..., final step included.
  std::vector<int> path(int start, long long steps, long long stride,
                        Rng& rng) const;

 private:
  int lo_, hi_;
  std::vector<std::uint64_t> up_;
  [[noreturn]] void exit_error(long long step, int site) const;
};

int simulate_walk(const Environment1D& env, int start, long long steps, Rng& rng);
std::vector<int> simulate_endpoints(const Environment1D& env, int start,
                                    long long steps, int walkers, Rng& rng);

// Columnar text (site, omega_minus, V) with metadata in a comment header.
void write_environment(std::ostream& os, const Environment1D& env,
                       const Potential1D& pot);
std::pair<Environment1D, Potential1D> read_environment(std::istream& is);

}  // namespace rwre::env1d
