#include "rwre/treewalk.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace rwre::treewalk {

namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

// Incident-conductance sum in a fixed order: parent edge first, then the
// children in tree order. total_exit_rate relies on reproducing nu(u)
// bitwise, so every caller must go through this one function.
double incident_sum(const OrderedTree& tree, const TreePotential& pot, int u) {
  double s = 0.0;
  if (u != tree.root || tree.planted) s += std::exp(-pot.v[uz(u)]);
  for (int w : tree.children[uz(u)]) s += std::exp(-pot.v[uz(w)]);
  return s;
}

}  // namespace

void TreeConductances::validate() const {
  tree.validate();
  if (static_cast<int>(c.size()) != tree.n)
    throw std::invalid_argument("conductance vector size mismatch");
  for (double x : c)
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("conductances must be positive and finite");
  if (tree.planted && c[uz(tree.root)] != 1.0)
    throw std::invalid_argument("planted edge conductance must be exactly 1");
}

TreeConductances biased_conductances(const OrderedTree& tree,
                                     const SpatialMarks& marks, double beta,
                                     double gamma,
                                     const std::vector<double>* ell) {
  if (!(beta >= 1.0))
    throw std::invalid_argument("bias base beta must be >= 1");
  if (marks.phi.size() != uz(tree.n) * static_cast<std::size_t>(marks.d))
    throw std::invalid_argument("marks do not cover the tree");
  TreeConductances out;
  out.tree = tree;
  out.beta = beta;
  out.gamma = gamma;
  out.c.assign(uz(tree.n), 1.0);
  if (ell != nullptr) {
    if (static_cast<int>(ell->size()) != marks.d)
      throw std::invalid_argument("direction dimension mismatch");
    double norm2 = 0.0;
    for (double x : *ell) norm2 += x * x;
    if (std::abs(norm2 - 1.0) > 1e-12)
      throw std::invalid_argument("direction must be a unit vector");
    for (int v = 0; v < tree.n; ++v) {
      // Parent-edge endpoints; the base of a planted tree sits at the origin.
      const double* pv = marks.at(v);
      const double* pu = v == tree.root ? nullptr : marks.at(tree.parent[uz(v)]);
      double dot = 0.0;
      for (int k = 0; k < marks.d; ++k) {
        double sum = pv[k] + (pu ? pu[k] : 0.0);
        dot += sum * (*ell)[uz(k)];
      }
      out.c[uz(v)] = std::exp(gamma * dot);
    }
  } else {
    for (int v = 0; v < tree.n; ++v) {
      double up = v == tree.root ? 0.0 : marks.phi1(tree.parent[uz(v)]);
      double m = std::max(up, marks.phi1(v));
      out.c[uz(v)] = std::pow(beta, gamma * m);
    }
  }
  if (tree.planted) out.c[uz(tree.root)] = 1.0;
  out.validate();
  return out;
}

TreePotential tree_potential(const TreeConductances& cond) {
  TreePotential pot;
  pot.v.resize(cond.c.size());
  for (std::size_t i = 0; i < cond.c.size(); ++i) pot.v[i] = -std::log(cond.c[i]);
  return pot;
}

double tree_resistance(const OrderedTree& tree, const TreePotential& pot,
                       int u1, int u2) {
  if (u1 == u2) return 0.0;
  // Canonical argument order (deeper first, then smaller id) so that the
  // floating-point sum is identical for (u1,u2) and (u2,u1).
  int a = u1, b = u2;
  if (tree.depth[uz(a)] < tree.depth[uz(b)] ||
      (tree.depth[uz(a)] == tree.depth[uz(b)] && a > b))
    std::swap(a, b);
  double r = 0.0;
  while (tree.depth[uz(a)] > tree.depth[uz(b)]) {
    r += std::exp(pot.v[uz(a)]);
    a = tree.parent[uz(a)];
  }
  while (a != b) {
    r += std::exp(pot.v[uz(a)]);
    r += std::exp(pot.v[uz(b)]);
    a = tree.parent[uz(a)];
    b = tree.parent[uz(b)];
  }
  return r;
}

std::vector<double> tree_invariant(const OrderedTree& tree, const TreePotential& pot) {
  std::vector<double> nu(uz(tree.n));
  for (int u = 0; u < tree.n; ++u) nu[uz(u)] = incident_sum(tree, pot, u);
  return nu;
}

int lca(const OrderedTree& tree, int a, int b) {
  while (tree.depth[uz(a)] > tree.depth[uz(b)]) a = tree.parent[uz(a)];
  while (tree.depth[uz(b)] > tree.depth[uz(a)]) b = tree.parent[uz(b)];
  while (a != b) {
    a = tree.parent[uz(a)];
    b = tree.parent[uz(b)];
  }
  return a;
}

int branch_vertex(const OrderedTree& tree, int a, int b, int c) {
  // Of the three pairwise meeting points, exactly one lies deepest; the
  // three paths all pass through it.
  int ab = lca(tree, a, b), ac = lca(tree, a, c), bc = lca(tree, b, c);
  int best = ab;
  if (tree.depth[uz(ac)] > tree.depth[uz(best)]) best = ac;
  if (tree.depth[uz(bc)] > tree.depth[uz(best)]) best = bc;
  return best;
}

double TreeMetricMeasure::edge_resistance(int child_key) const {
  return std::exp(pot.v[uz(child_key)]);
}

double TreeMetricMeasure::edge_conductance(int child_key) const {
  return std::exp(-pot.v[uz(child_key)]);
}

double TreeMetricMeasure::r(int u1, int u2) const {
  if (u1 == u2) return 0.0;
  double raw = 0.0;
  int a = u1, b = u2;
  if (a == base_id() || b == base_id()) {
    if (!has_base()) throw std::invalid_argument("tree is not planted");
    int other = a == base_id() ? b : a;
    raw = edge_resistance(tree.root) + tree_resistance(tree, pot, tree.root, other);
  } else {
    raw = tree_resistance(tree, pot, a, b);
  }
  return scale_r * raw;
}

double TreeMetricMeasure::nu_at(int u) const {
  double raw = u == base_id() ? nu_base : nu[uz(u)];
  if (u == base_id() && !has_base()) throw std::invalid_argument("tree is not planted");
  return scale_nu * raw;
}

double TreeMetricMeasure::total_exit_rate(int u) const {
  // sum_w exp(-V(key)) / (2 nu~(u) r~(u,w)) with the numerator accumulated in
  // the same order as the stored nu, so the ratio cancels exactly whenever
  // the scale factors are powers of two.
  double s, nu_u;
  if (u == base_id()) {
    if (!has_base()) throw std::invalid_argument("tree is not planted");
    s = std::exp(-pot.v[uz(tree.root)]);
    nu_u = nu_base;
  } else {
    s = incident_sum(tree, pot, u);
    nu_u = nu[uz(u)];
  }
  double denom = (2.0 * scale_nu * nu_u) * scale_r;
  return s / denom;
}

std::vector<int> TreeMetricMeasure::neighbours(int u) const {
  std::vector<int> out;
  if (u == base_id()) {
    if (!has_base()) throw std::invalid_argument("tree is not planted");
    out.push_back(tree.root);
    return out;
  }
  if (u == tree.root) {
    if (has_base()) out.push_back(base_id());
  } else {
    out.push_back(tree.parent[uz(u)]);
  }
  for (int w : tree.children[uz(u)]) out.push_back(w);
  return out;
}

TreeMetricMeasure make_metric_measure(const TreeConductances& cond,
                                      double scale_r, double scale_nu) {
  cond.validate();
  TreeMetricMeasure mm;
  mm.tree = cond.tree;
  mm.pot = tree_potential(cond);
  mm.nu = tree_invariant(mm.tree, mm.pot);
  mm.nu_base = mm.tree.planted ? std::exp(-mm.pot.v[uz(mm.tree.root)]) : 0.0;
  mm.scale_r = scale_r;
  mm.scale_nu = scale_nu;
  return mm;
}

namespace {

// Neighbour lists and cumulative conductance weights for every state,
// including the base of a planted tree.
struct WalkTables {
  std::vector<std::vector<int>> nbr;
  std::vector<std::vector<double>> cum;  // cumulative weights
  int n_states;
};

WalkTables build_tables(const OrderedTree& tree, const std::vector<double>& c) {
  WalkTables t;
  t.n_states = tree.n + (tree.planted ? 1 : 0);
  t.nbr.resize(uz(t.n_states));
  t.cum.resize(uz(t.n_states));
  for (int u = 0; u < tree.n; ++u) {
    auto& nb = t.nbr[uz(u)];
    auto& cw = t.cum[uz(u)];
    double acc = 0.0;
    if (u == tree.root) {
      if (tree.planted) {
        nb.push_back(tree.n);
        acc += c[uz(tree.root)];
        cw.push_back(acc);
      }
    } else {
      nb.push_back(tree.parent[uz(u)]);
      acc += c[uz(u)];
      cw.push_back(acc);
    }
    for (int w : tree.children[uz(u)]) {
      nb.push_back(w);
      acc += c[uz(w)];
      cw.push_back(acc);
    }
    if (nb.empty()) throw std::invalid_argument("isolated vertex in walk");
  }
  if (tree.planted) {
    t.nbr[uz(tree.n)].push_back(tree.root);
    t.cum[uz(tree.n)].push_back(c[uz(tree.root)]);
  }
  return t;
}

int pick_neighbour(const std::vector<int>& nb, const std::vector<double>& cw,
                   Rng& rng) {
  double x = rng.uniform01() * cw.back();
  std::size_t k = 0;
  while (k + 1 < cw.size() && x >= cw[k]) ++k;
  return nb[k];
}

}  // namespace

int simulate_discrete(const TreeConductances& cond, int start, long long steps,
                      Rng& rng, std::vector<long long>* occupation) {
  WalkTables tab = build_tables(cond.tree, cond.c);
  if (start < 0 || start >= tab.n_states)
    throw std::invalid_argument("start state out of range");
  if (occupation) occupation->assign(uz(tab.n_states), 0);
  int u = start;
  for (long long s = 0; s < steps; ++s) {
    u = pick_neighbour(tab.nbr[uz(u)], tab.cum[uz(u)], rng);
    if (occupation) (*occupation)[uz(u)] += 1;
  }
  return u;
}

namespace {

// Per-edge jump rates of the nu-speed motion, indexed like the neighbour
// lists above.
struct RateTables {
  WalkTables walk;
  std::vector<std::vector<double>> rate;
};

RateTables build_rates(const TreeMetricMeasure& mm) {
  RateTables rt;
  std::vector<double> c(uz(mm.tree.n));
  for (int v = 0; v < mm.tree.n; ++v) c[uz(v)] = mm.edge_conductance(v);
  rt.walk = build_tables(mm.tree, c);
  rt.rate.resize(uz(rt.walk.n_states));
  for (int u = 0; u < rt.walk.n_states; ++u) {
    double nu_u = mm.nu_at(u == mm.tree.n ? mm.base_id() : u);
    for (int w : rt.walk.nbr[uz(u)]) {
      int key = (u == mm.tree.n || w == mm.tree.n)
                    ? mm.tree.root
                    : (mm.tree.parent[uz(u)] == w ? u : w);
      double q = 1.0 / (2.0 * nu_u * (mm.scale_r * mm.edge_resistance(key)));
      rt.rate[uz(u)].push_back(q);
    }
  }
  return rt;
}

}  // namespace

TimedPath simulate_speed_motion(const TreeMetricMeasure& mm, int start,
                                double horizon, Rng& rng) {
  RateTables rt = build_rates(mm);
  if (start < 0 || start >= rt.walk.n_states)
    throw std::invalid_argument("start state out of range");
  TimedPath path;
  path.t.push_back(0.0);
  path.site.push_back(start);
  int u = start;
  double t = 0.0;
  while (true) {
    // One exponential clock per incident edge; the earliest wins.
    double best = std::numeric_limits<double>::infinity();
    int next = -1;
    const auto& nb = rt.walk.nbr[uz(u)];
    const auto& q = rt.rate[uz(u)];
    for (std::size_t k = 0; k < nb.size(); ++k) {
      double dt = rng.exponential() / q[k];
      if (dt < best) {
        best = dt;
        next = nb[k];
      }
    }
    if (t + best >= horizon) break;
    t += best;
    u = next;
    path.t.push_back(t);
    path.site.push_back(u);
  }
  return path;
}

HitResult speed_motion_until_hit(const TreeMetricMeasure& mm, int start,
                                 const std::vector<int>& targets, Rng& rng) {
  RateTables rt = build_rates(mm);
  if (start < 0 || start >= rt.walk.n_states)
    throw std::invalid_argument("start state out of range");
  std::vector<char> is_target(uz(rt.walk.n_states), 0);
  for (int v : targets) {
    if (v < 0 || v >= rt.walk.n_states)
      throw std::invalid_argument("target state out of range");
    is_target[uz(v)] = 1;
  }
  HitResult res;
  res.occupation.assign(uz(rt.walk.n_states), 0.0);
  int u = start;
  double t = 0.0;
  while (!is_target[uz(u)]) {
    double best = std::numeric_limits<double>::infinity();
    int next = -1;
    const auto& nb = rt.walk.nbr[uz(u)];
    const auto& q = rt.rate[uz(u)];
    for (std::size_t k = 0; k < nb.size(); ++k) {
      double dt = rng.exponential() / q[k];
      if (dt < best) {
        best = dt;
        next = nb[k];
      }
    }
    res.occupation[uz(u)] += best;
    t += best;
    u = next;
  }
  res.hit = u;
  res.time = t;
  return res;
}

double effective_resistance_variational(
    int n, const std::vector<std::tuple<int, int, double>>& edges, int u1, int u2) {
  if (n < 2 || n > 1000)
    throw std::invalid_argument("network size must be in [2, 1000]");
  if (u1 < 0 || u1 >= n || u2 < 0 || u2 >= n)
    throw std::invalid_argument("terminal out of range");
  if (u1 == u2) return 0.0;
  std::vector<std::vector<std::pair<int, double>>> adj(uz(n));
  for (const auto& [a, b, c] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n || a == b)
      throw std::invalid_argument("bad edge");
    if (!(c > 0.0)) throw std::invalid_argument("conductance must be positive");
    adj[uz(a)].push_back({b, c});
    adj[uz(b)].push_back({a, c});
  }
  std::vector<char> seen(uz(n), 0);
  std::queue<int> bfs;
  bfs.push(u1);
  seen[uz(u1)] = 1;
  int reached = 0;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    ++reached;
    for (auto [w, c] : adj[uz(v)])
      if (!seen[uz(w)]) {
        seen[uz(w)] = 1;
        bfs.push(w);
      }
  }
  if (reached != n) throw std::invalid_argument("network is disconnected");

  // Unknown potentials: everything except the pinned terminals.
  std::vector<int> idx(uz(n), -1);
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (v != u1 && v != u2) idx[uz(v)] = m++;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (const auto& [a, b, c] : edges) {
    int ia = idx[uz(a)], ib = idx[uz(b)];
    if (ia >= 0) L(ia, ia) += c;
    if (ib >= 0) L(ib, ib) += c;
    if (ia >= 0 && ib >= 0) {
      L(ia, ib) -= c;
      L(ib, ia) -= c;
    }
    // f(u2) = 1 contributes to the right-hand side.
    if (ia >= 0 && b == u2) rhs(ia) += c;
    if (ib >= 0 && a == u2) rhs(ib) += c;
  }
  Eigen::VectorXd f = m > 0 ? Eigen::VectorXd(L.ldlt().solve(rhs)) : Eigen::VectorXd();
  auto value = [&](int v) {
    if (v == u1) return 0.0;
    if (v == u2) return 1.0;
    return f(idx[uz(v)]);
  };
  double energy = 0.0;
  for (const auto& [a, b, c] : edges) {
    double d = value(a) - value(b);
    energy += c * d * d;
  }
  if (!(energy > 0.0)) throw std::runtime_error("degenerate network energy");
  return 1.0 / energy;
}

void write_timed_path_csv(std::ostream& os, const TimedPath& path,
                          const SpatialMarks* marks) {
  os << "t,site";
  int d = marks ? marks->d : 0;
  for (int k = 0; k < d; ++k) os << ",phi" << k;
  os << "\n";
  char buf[64];
  for (std::size_t i = 0; i < path.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", path.t[i]);
    os << buf << ',' << path.site[i];
    if (marks) {
      int v = path.site[i];
      bool base = uz(v) * marks->d >= marks->phi.size();
      const double* row = base ? nullptr : marks->at(v);
      for (int k = 0; k < d; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", row ? row[k] : 0.0);
        os << ',' << buf;
      }
    }
    os << "\n";
  }
}

void write_bundle_summary_json(std::ostream& os, const TreeMetricMeasure& mm,
                               long n, double beta, double gamma) {
  double mass = mm.has_base() ? mm.nu_at(mm.base_id()) : 0.0;
  for (int v = 0; v < mm.tree.n; ++v) mass += mm.nu_at(v);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "{\"n\": %ld, \"vertices\": %d, \"beta\": %.17g, \"gamma\": %.17g, "
                "\"scale_r\": %.17g, \"scale_nu\": %.17g, \"total_mass\": %.17g}\n",
                n, mm.tree.n, beta, gamma, mm.scale_r, mm.scale_nu, mass);
  os << buf;
}

}  // namespace rwre::treewalk
