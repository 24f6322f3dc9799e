#include "rwre/errw.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rwre::errw {

namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

// (neighbour, edge key) pairs of a walk state; the base of a planted tree is
// state tree.n.
void incident_edges(const OrderedTree& tree, int u,
                    std::vector<std::pair<int, int>>& out) {
  out.clear();
  if (u == tree.n) {
    if (!tree.planted) throw std::invalid_argument("state out of range");
    out.push_back({tree.root, tree.root});
    return;
  }
  if (u == tree.root) {
    if (tree.planted) out.push_back({tree.n, tree.root});
  } else {
    out.push_back({tree.parent[uz(u)], u});
  }
  for (int w : tree.children[uz(u)]) out.push_back({w, w});
}

std::vector<int> run_walk(const OrderedTree& tree, std::vector<double> weight,
                          int start, long long steps, bool reinforce, Rng& rng,
                          std::vector<double>* final_weight = nullptr) {
  tree.validate();
  if (static_cast<int>(weight.size()) != tree.n)
    throw std::invalid_argument("weight vector size mismatch");
  for (double w : weight)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
  int n_states = tree.n + (tree.planted ? 1 : 0);
  if (start < 0 || start >= n_states)
    throw std::invalid_argument("start state out of range");
  std::vector<int> traj;
  traj.reserve(uz(static_cast<int>(steps) + 1));
  traj.push_back(start);
  std::vector<std::pair<int, int>> inc;
  int u = start;
  for (long long s = 0; s < steps; ++s) {
    incident_edges(tree, u, inc);
    double total = 0.0;
    for (auto [w, key] : inc) total += weight[uz(key)];
    double x = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t pick = inc.size() - 1;
    for (std::size_t k = 0; k < inc.size(); ++k) {
      acc += weight[uz(inc[k].second)];
      if (x < acc) {
        pick = k;
        break;
      }
    }
    if (reinforce) weight[uz(inc[pick].second)] += 1.0;
    u = inc[pick].first;
    traj.push_back(u);
  }
  if (final_weight) *final_weight = std::move(weight);
  return traj;
}

}  // namespace

double default_initial_weight(long n) {
  if (n <= 0) throw std::invalid_argument("bundle size must be positive");
  return 0.5 * std::sqrt(static_cast<double>(n));
}

std::vector<double> uniform_weights(const OrderedTree& tree, double w0) {
  if (!(w0 > 0.0)) throw std::invalid_argument("initial weight must be positive");
  return std::vector<double>(uz(tree.n), w0);
}

std::vector<int> simulate_errw(const OrderedTree& tree,
                               std::vector<double> weight, int start,
                               long long steps, Rng& rng,
                               std::vector<double>* final_weight) {
  return run_walk(tree, std::move(weight), start, steps, true, rng, final_weight);
}

std::vector<int> simulate_weighted(const OrderedTree& tree,
                                   const std::vector<double>& weight,
                                   int start, long long steps, Rng& rng) {
  return run_walk(tree, weight, start, steps, false, rng);
}

int TrajectoryLaw::find(const std::vector<int>& p) const {
  for (std::size_t i = 0; i < path.size(); ++i)
    if (path[i] == p) return static_cast<int>(i);
  return -1;
}

namespace {

void enumerate_paths(const OrderedTree& tree, std::vector<double>& weight,
                     std::vector<int>& prefix, double prob, int horizon,
                     TrajectoryLaw& out) {
  if (static_cast<int>(prefix.size()) == horizon + 1) {
    out.path.push_back(prefix);
    out.prob.push_back(prob);
    return;
  }
  std::vector<std::pair<int, int>> inc;
  incident_edges(tree, prefix.back(), inc);
  double total = 0.0;
  for (auto [w, key] : inc) total += weight[uz(key)];
  for (auto [w, key] : inc) {
    double p = weight[uz(key)] / total;
    weight[uz(key)] += 1.0;
    prefix.push_back(w);
    enumerate_paths(tree, weight, prefix, prob * p, horizon, out);
    prefix.pop_back();
    weight[uz(key)] -= 1.0;
  }
}

}  // namespace

TrajectoryLaw exact_trajectory_law(const OrderedTree& tree,
                                   const std::vector<double>& weight,
                                   int start, int horizon) {
  tree.validate();
  if (tree.n > 6 || horizon > 6 || horizon < 0)
    throw std::invalid_argument(
        "trajectory enumeration is limited to 6 vertices and 6 steps");
  if (static_cast<int>(weight.size()) != tree.n)
    throw std::invalid_argument("weight vector size mismatch");
  TrajectoryLaw law;
  std::vector<double> w = weight;
  std::vector<int> prefix{start};
  enumerate_paths(tree, w, prefix, 1.0, horizon, law);
  return law;
}

double sinh_log_density(double alpha, double x) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  double s = std::sinh(0.5 * x);
  return 0.5 * std::log(alpha / (2.0 * M_PI)) - 2.0 * alpha * s * s + 0.5 * x;
}

double sinh_density(double alpha, double x) {
  return std::exp(sinh_log_density(alpha, x));
}

namespace {

// Inverse-CDF draw for small alpha: trapezoid CDF on a grid wide enough that
// the truncated tails are far below the resolution of any test we run.
double sample_sinh_grid(double alpha, Rng& rng) {
  const int kN = 8192;
  double half_width = std::log(90.0 / alpha);
  double lo = -half_width, hi = half_width;
  double h = (hi - lo) / (kN - 1);
  std::vector<double> cdf(kN);
  double prev = sinh_density(alpha, lo);
  cdf[0] = 0.0;
  for (int i = 1; i < kN; ++i) {
    double cur = sinh_density(alpha, lo + i * h);
    cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  double u = rng.uniform01() * cdf[kN - 1];
  int a = 0, b = kN - 1;
  while (b - a > 1) {
    int mid = (a + b) / 2;
    (cdf[mid] <= u ? a : b) = mid;
  }
  double seg = cdf[b] - cdf[a];
  double frac = seg > 0.0 ? (u - cdf[a]) / seg : 0.5;
  return lo + (a + frac) * h;
}

}  // namespace

double sample_sinh(double alpha, Rng& rng, SinhSampleStats* stats) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (alpha < 0.5) {
    double x = sample_sinh_grid(alpha, rng);
    if (stats) {
      stats->proposals += 1;
      stats->accepts += 1;
    }
    return x;
  }
  double inv_sqrt = 1.0 / std::sqrt(alpha);
  double mean = 1.0 / (2.0 * alpha);
  while (true) {
    double z = rng.normal();
    double x = z * inv_sqrt + mean;
    if (stats) stats->proposals += 1;
    double s = std::sinh(0.5 * x);
    double log_acc =
        -2.0 * alpha * s * s + 0.5 * x + 0.5 * z * z - 1.0 / (8.0 * alpha);
    if (std::log(rng.uniform01()) < log_acc) {
      if (stats) stats->accepts += 1;
      return x;
    }
  }
}

SinhEnvironment sample_sinh_environment(const OrderedTree& tree, double alpha0,
                                        Rng& rng) {
  tree.validate();
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  SinhEnvironment env;
  env.alpha.assign(uz(tree.n), 0.0);
  env.omega.assign(uz(tree.n), 0.0);
  env.U.assign(uz(tree.n), 0.0);
  for (int v = 0; v < tree.n; ++v) {
    if (v == tree.root && !tree.planted) continue;  // no planted edge
    env.alpha[uz(v)] = rng.gamma(alpha0);
    env.omega[uz(v)] = sample_sinh(env.alpha[uz(v)], rng);
  }
  // Vertices are in preorder, so parents are filled before children.
  env.U[uz(tree.root)] = tree.planted ? env.omega[uz(tree.root)] : 0.0;
  for (int v = 0; v < tree.n; ++v) {
    if (v == tree.root) continue;
    env.U[uz(v)] = env.U[uz(tree.parent[uz(v)])] + env.omega[uz(v)];
  }
  return env;
}

std::vector<double> mixture_weights(const OrderedTree& tree,
                                    const SinhEnvironment& env) {
  std::vector<double> w(uz(tree.n), 1.0);
  for (int v = 0; v < tree.n; ++v) {
    if (v == tree.root && !tree.planted) continue;
    double up = v == tree.root ? 0.0 : env.U[uz(tree.parent[uz(v)])];
    w[uz(v)] = env.alpha[uz(v)] * std::exp(-(up + env.U[uz(v)]));
  }
  return w;
}

std::vector<double> mixture_potential(const OrderedTree& tree,
                                      const SinhEnvironment& env) {
  std::vector<double> v(uz(tree.n), 0.0);
  for (int u = 0; u < tree.n; ++u) {
    if (u == tree.root && !tree.planted) continue;
    double up = u == tree.root ? 0.0 : env.U[uz(tree.parent[uz(u)])];
    v[uz(u)] = up + env.U[uz(u)] - std::log(env.alpha[uz(u)]);
  }
  return v;
}

void write_environment_csv(std::ostream& os, const OrderedTree& tree,
                           const SinhEnvironment& env) {
  os << "vertex,parent,alpha,omega,u\n";
  char buf[160];
  for (int v = 0; v < tree.n; ++v) {
    int par = v == tree.root ? (tree.planted ? tree.n : -1) : tree.parent[uz(v)];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", v, par,
                  env.alpha[uz(v)], env.omega[uz(v)], env.U[uz(v)]);
    os << buf;
  }
}

}  // namespace rwre::errw
