#include "rwre/treecore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rwre::treecore {

double OffspringDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
  return m;
}

double OffspringDistribution::variance() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double d = static_cast<double>(k) - m;
    s += d * d * pmf[k];
  }
  return s;
}

void OffspringDistribution::validate() const {
  if (pmf.empty()) throw std::invalid_argument("offspring pmf is empty");
  double total = 0.0;
  for (double p : pmf) {
    if (p < 0.0) throw std::invalid_argument("offspring pmf has negative mass");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("offspring pmf does not sum to 1");
  if (std::fabs(mean() - 1.0) > 1e-12)
    throw std::invalid_argument("offspring law is not critical (mean != 1)");
}

int OffspringDistribution::sample(Rng& rng) const {
  if (sampler) return sampler(rng);
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(pmf.size()) - 1;
}

OffspringDistribution geometric_half() {
  OffspringDistribution law;
  double p = 0.5;
  while (p > 1e-18) {
    law.pmf.push_back(p);
    p *= 0.5;
  }
  law.sampler = [](Rng& rng) {
    int k = 0;
    while (rng.next_u64() >> 63) ++k;
    return k;
  };
  return law;
}

void OrderedTree::validate() const {
  if (n <= 0) throw std::invalid_argument("tree must have >= 1 vertex");
  if (parent.size() != static_cast<std::size_t>(n) ||
      children.size() != static_cast<std::size_t>(n) ||
      depth.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("tree arrays have inconsistent sizes");
  if (root != 0 || parent[0] != -1 || depth[0] != 0)
    throw std::invalid_argument("root must be vertex 0 at depth 0");
  int edges = 0;
  for (int v = 1; v < n; ++v) {
    if (parent[v] < 0 || parent[v] >= n || parent[v] >= v)
      throw std::invalid_argument("vertices must be numbered in preorder");
    if (depth[v] != depth[parent[v]] + 1)
      throw std::invalid_argument("depth array inconsistent with parents");
    ++edges;
  }
  int child_count = 0;
  for (const auto& c : children) child_count += static_cast<int>(c.size());
  if (child_count != edges)
    throw std::invalid_argument("children lists inconsistent with parents");
}

bool OrderedTree::is_ancestor(int a, int v) const {
  while (v != -1 && v != a) v = parent[v];
  return v == a;
}

OrderedTree tree_from_offspring(const std::vector<int>& offspring, bool planted) {
  const int n = static_cast<int>(offspring.size());
  if (n == 0) throw std::invalid_argument("empty offspring sequence");
  OrderedTree t;
  t.n = n;
  t.planted = planted;
  t.parent.assign(n, -1);
  t.children.assign(n, {});
  t.depth.assign(n, 0);
  std::vector<int> need(offspring.begin(), offspring.end());
  std::vector<int> stack{0};
  for (int v = 1; v < n; ++v) {
    while (!stack.empty() && need[stack.back()] == 0) stack.pop_back();
    if (stack.empty())
      throw std::invalid_argument("offspring sequence is not a preorder");
    const int p = stack.back();
    --need[p];
    t.parent[v] = p;
    t.children[p].push_back(v);
    t.depth[v] = t.depth[p] + 1;
    stack.push_back(v);
  }
  while (!stack.empty() && need[stack.back()] == 0) stack.pop_back();
  if (!stack.empty())
    throw std::invalid_argument("offspring sequence leaves open slots");
  return t;
}

OrderedTree sample_gw_conditioned(const OffspringDistribution& law, int n,
                                  Rng& rng, long max_tries, bool planted) {
  law.validate();
  if (n < 1) throw std::invalid_argument("progeny size must be >= 1");
  std::vector<int> xi(static_cast<std::size_t>(n));
  for (long attempt = 1; attempt <= max_tries; ++attempt) {
    long total = 0;
    for (auto& x : xi) {
      x = law.sample(rng);
      total += x;
    }
    if (total != n - 1) continue;
    // Lattice path S_k = sum_{i<=k} (xi_i - 1) ends at -1; rotating just past
    // the first minimum is the unique shift that yields a preorder sequence.
    long s = 0, smin = 0;
    int kmin = 0;
    for (int k = 0; k < n; ++k) {
      s += xi[static_cast<std::size_t>(k)] - 1;
      if (s < smin) {
        smin = s;
        kmin = k + 1;
      }
    }
    std::vector<int> rotated(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      rotated[static_cast<std::size_t>(k)] = xi[static_cast<std::size_t>((kmin + k) % n)];
    return tree_from_offspring(rotated, planted);
  }
  std::ostringstream msg;
  msg << "conditioned sampling failed: no offspring vector with total " << n - 1
      << " in " << max_tries << " attempts";
  throw std::runtime_error(msg.str());
}

void ContourSequence::validate() const {
  if (heights.size() != visit.size() || heights.empty())
    throw std::invalid_argument("contour arrays inconsistent");
  if (heights.front() != 0 || heights.back() != 0)
    throw std::invalid_argument("contour must start and end at height 0");
  for (std::size_t i = 1; i < heights.size(); ++i)
    if (std::abs(heights[i] - heights[i - 1]) != 1)
      throw std::invalid_argument("contour increments must be +-1");
}

ContourSequence contour(const OrderedTree& tree) {
  ContourSequence seq;
  const std::size_t len = 2 * static_cast<std::size_t>(tree.n) - 1;
  seq.heights.reserve(len);
  seq.visit.reserve(len);
  // Iterative depth-first sweep; next_child[v] is the index of the child to
  // descend into when v is next on top.
  std::vector<std::size_t> next_child(static_cast<std::size_t>(tree.n), 0);
  int v = tree.root;
  seq.heights.push_back(0);
  seq.visit.push_back(v);
  while (true) {
    const auto& kids = tree.children[static_cast<std::size_t>(v)];
    if (next_child[static_cast<std::size_t>(v)] < kids.size()) {
      v = kids[next_child[static_cast<std::size_t>(v)]++];
    } else if (v != tree.root) {
      v = tree.parent[static_cast<std::size_t>(v)];
    } else {
      break;
    }
    seq.heights.push_back(tree.depth[static_cast<std::size_t>(v)]);
    seq.visit.push_back(v);
  }
  if (seq.heights.size() != len)
    throw std::logic_error("contour length mismatch");
  return seq;
}

OrderedTree tree_from_contour(const std::vector<int>& heights, bool planted) {
  if (heights.empty() || heights.size() % 2 != 1)
    throw std::invalid_argument("contour must have odd length 2n-1");
  if (heights.front() != 0 || heights.back() != 0)
    throw std::invalid_argument("contour must start and end at 0");
  const int n = static_cast<int>((heights.size() + 1) / 2);
  OrderedTree t;
  t.n = n;
  t.planted = planted;
  t.parent.assign(static_cast<std::size_t>(n), -1);
  t.children.assign(static_cast<std::size_t>(n), {});
  t.depth.assign(static_cast<std::size_t>(n), 0);
  int next_id = 1;
  int cur = 0;
  for (std::size_t i = 1; i < heights.size(); ++i) {
    const int dh = heights[i] - heights[i - 1];
    if (dh == 1) {
      if (next_id >= n) throw std::invalid_argument("contour visits too many vertices");
      t.parent[static_cast<std::size_t>(next_id)] = cur;
      t.children[static_cast<std::size_t>(cur)].push_back(next_id);
      t.depth[static_cast<std::size_t>(next_id)] = heights[i];
      cur = next_id++;
    } else if (dh == -1) {
      if (cur == 0) throw std::invalid_argument("contour descends below the root");
      cur = t.parent[static_cast<std::size_t>(cur)];
    } else {
      throw std::invalid_argument("contour increments must be +-1");
    }
  }
  if (next_id != n) throw std::invalid_argument("contour does not cover 2n-1 steps");
  t.validate();
  return t;
}

StepSampler gaussian_steps(int d, double sigma) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  StepSampler s;
  s.d = d;
  s.cov.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) s.cov[static_cast<std::size_t>(i) * d + i] = sigma * sigma;
  s.draw = [d, sigma](Rng& rng, double* out) {
    for (int i = 0; i < d; ++i) out[i] = sigma * rng.normal();
  };
  return s;
}

StepSampler gaussian_steps_cov(const std::vector<double>& cov, int d) {
  if (d < 1 || cov.size() != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument("covariance must be d x d");
  // Dense Cholesky; the step covariance must be positive definite.
  std::vector<double> l(cov.size(), 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = cov[static_cast<std::size_t>(i) * d + j];
      for (int k = 0; k < j; ++k)
        s -= l[static_cast<std::size_t>(i) * d + k] * l[static_cast<std::size_t>(j) * d + k];
      if (i == j) {
        if (s <= 0.0) throw std::invalid_argument("step covariance not positive definite");
        l[static_cast<std::size_t>(i) * d + j] = std::sqrt(s);
      } else {
        l[static_cast<std::size_t>(i) * d + j] = s / l[static_cast<std::size_t>(j) * d + j];
      }
    }
  }
  StepSampler s;
  s.d = d;
  s.cov = cov;
  s.draw = [d, l](Rng& rng, double* out) {
    double z[16];
    if (d > 16) throw std::invalid_argument("step dimension above 16 unsupported");
    for (int i = 0; i < d; ++i) z[i] = rng.normal();
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int k = 0; k <= i; ++k) acc += l[static_cast<std::size_t>(i) * d + k] * z[k];
      out[i] = acc;
    }
  };
  return s;
}

SpatialMarks embed_brw(const OrderedTree& tree, const StepSampler& steps, Rng& rng) {
  tree.validate();
  SpatialMarks m;
  m.d = steps.d;
  m.step_cov = steps.cov;
  m.incr.assign(static_cast<std::size_t>(tree.n) * steps.d, 0.0);
  m.phi.assign(static_cast<std::size_t>(tree.n) * steps.d, 0.0);
  // Preorder numbering guarantees parents come first; one forward pass keeps
  // phi(u) = phi(parent) + y(u) exact by construction.
  for (int v = 1; v < tree.n; ++v) {
    double* y = m.incr.data() + static_cast<std::size_t>(v) * steps.d;
    steps.draw(rng, y);
    const double* pp = m.phi.data() + static_cast<std::size_t>(tree.parent[v]) * steps.d;
    double* pv = m.phi.data() + static_cast<std::size_t>(v) * steps.d;
    for (int i = 0; i < steps.d; ++i) pv[i] = pp[i] + y[i];
  }
  return m;
}

std::vector<double> head_function(const ContourSequence& seq,
                                  const SpatialMarks& marks, int n_vertices) {
  seq.validate();
  if (seq.length() != 2 * static_cast<std::size_t>(n_vertices) - 1)
    throw std::invalid_argument("contour length disagrees with vertex count");
  if (marks.phi.size() != static_cast<std::size_t>(n_vertices) * marks.d)
    throw std::invalid_argument("marks size disagrees with vertex count");
  std::vector<double> head(seq.length() * marks.d);
  for (std::size_t i = 0; i < seq.length(); ++i) {
    const double* src = marks.at(seq.visit[i]);
    for (int k = 0; k < marks.d; ++k) head[i * marks.d + k] = src[k];
  }
  return head;
}

std::vector<double> discrete_length_measure(const OrderedTree& tree) {
  std::vector<double> unit(static_cast<std::size_t>(tree.n), 1.0);
  return discrete_length_measure(tree, unit);
}

std::vector<double> discrete_length_measure(const OrderedTree& tree,
                                            const std::vector<double>& edge_len) {
  if (edge_len.size() != static_cast<std::size_t>(tree.n))
    throw std::invalid_argument("edge length array must be indexed by child vertex");
  std::vector<double> mass(static_cast<std::size_t>(tree.n), 0.0);
  for (int v = 1; v < tree.n; ++v) mass[static_cast<std::size_t>(v)] = edge_len[static_cast<std::size_t>(v)];
  mass[0] = 0.0;  // the root carries no parent edge mass
  return mass;
}

static void enumerate_rec(int n, int pos, int open, std::vector<int>& cur,
                          std::vector<std::vector<int>>& out) {
  if (pos == n) {
    if (open == 0) out.push_back(cur);
    return;
  }
  // open slots before placing vertex pos; placing consumes one, adds c.
  const int remaining = n - pos;
  for (int c = 0; c <= remaining - 1; ++c) {
    const int next_open = open - 1 + c;
    if (next_open < 0) continue;
    if (pos + 1 < n && next_open == 0) continue;
    if (next_open > n - pos - 1) continue;
    cur.push_back(c);
    enumerate_rec(n, pos + 1, next_open, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> enumerate_plane_trees(int n) {
  if (n < 1 || n > 16) throw std::invalid_argument("enumeration limited to 1..16 vertices");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate_rec(n, 0, 1, cur, out);
  return out;
}

void write_parent_array(std::ostream& os, const OrderedTree& tree) {
  os << tree.n << ' ' << (tree.planted ? 1 : 0) << '\n';
  for (int v = 0; v < tree.n; ++v) os << tree.parent[static_cast<std::size_t>(v)] << '\n';
}

OrderedTree read_parent_array(std::istream& is) {
  int n = 0, planted = 0;
  if (!(is >> n >> planted)) throw std::runtime_error("parent array: bad header");
  OrderedTree t;
  t.n = n;
  t.planted = planted != 0;
  t.parent.resize(static_cast<std::size_t>(n));
  t.children.assign(static_cast<std::size_t>(n), {});
  t.depth.assign(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v)
    if (!(is >> t.parent[static_cast<std::size_t>(v)]))
      throw std::runtime_error("parent array: truncated");
  for (int v = 1; v < n; ++v) {
    const int p = t.parent[static_cast<std::size_t>(v)];
    if (p < 0 || p >= v) throw std::runtime_error("parent array: not preorder");
    t.children[static_cast<std::size_t>(p)].push_back(v);
    t.depth[static_cast<std::size_t>(v)] = t.depth[static_cast<std::size_t>(p)] + 1;
  }
  t.validate();
  return t;
}

void write_contour_csv(std::ostream& os, const ContourSequence& seq,
                       const SpatialMarks* marks) {
  os << "i,c,vertex";
  if (marks)
    for (int k = 0; k < marks->d; ++k) os << ",r" << k;
  os << '\n';
  char buf[64];
  for (std::size_t i = 0; i < seq.length(); ++i) {
    os << i << ',' << seq.heights[i] << ',' << seq.visit[i];
    if (marks) {
      const double* v = marks->at(seq.visit[i]);
      for (int k = 0; k < marks->d; ++k) {
        std::snprintf(buf, sizeof buf, ",%.17g", v[k]);
        os << buf;
      }
    }
    os << '\n';
  }
}

}  // namespace rwre::treecore
