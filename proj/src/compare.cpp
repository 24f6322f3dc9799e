#include "rwre/compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "rwre/stats.hpp"

namespace rwre::compare {

namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

long long pair_key(int i, int j) {
  return (static_cast<long long>(i) << 32) | static_cast<unsigned>(j);
}

}  // namespace

void PointedSpace::validate() const {
  if (n <= 0 || dist.size() != uz(n) * uz(n) || mass.size() != uz(n))
    throw std::invalid_argument("space shape mismatch");
  if (root < 0 || root >= n) throw std::invalid_argument("root out of range");
  if (mark_dim < 0 || marks.size() != uz(n) * uz(mark_dim))
    throw std::invalid_argument("marks shape mismatch");
  const double tol = 1e-9;
  for (int i = 0; i < n; ++i) {
    if (std::abs(d(i, i)) > tol) throw std::invalid_argument("nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      double v = d(i, j);
      if (!std::isfinite(v) || v < -tol)
        throw std::invalid_argument("negative or non-finite distance");
      if (std::abs(v - d(j, i)) > tol)
        throw std::invalid_argument("asymmetric distance");
    }
  }
  for (double m : mass)
    if (!std::isfinite(m) || m < 0.0)
      throw std::invalid_argument("mass must be finite and nonnegative");
  if (n <= 512) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (d(i, j) > d(i, k) + d(k, j) + tol)
            throw std::invalid_argument("triangle inequality violated");
  }
}

void Correspondence::validate(const PointedSpace& x, const PointedSpace& y) const {
  if (pairs.empty()) throw std::invalid_argument("empty correspondence");
  std::vector<char> hit_x(uz(x.n), 0), hit_y(uz(y.n), 0);
  bool root_pair = false;
  for (auto [i, j] : pairs) {
    if (i < 0 || i >= x.n || j < 0 || j >= y.n)
      throw std::invalid_argument("correspondence index out of range");
    hit_x[uz(i)] = 1;
    hit_y[uz(j)] = 1;
    if (i == x.root && j == y.root) root_pair = true;
  }
  for (char h : hit_x)
    if (!h) throw std::invalid_argument("correspondence misses a left point");
  for (char h : hit_y)
    if (!h) throw std::invalid_argument("correspondence misses a right point");
  if (!root_pair) throw std::invalid_argument("root pair missing");
}

bool Correspondence::contains(int i, int j) const {
  for (auto [a, b] : pairs)
    if (a == i && b == j) return true;
  return false;
}

std::vector<double> Coupling::marginal_first() const {
  std::vector<double> m(uz(nx), 0.0);
  for (const auto& [i, j, w] : entries) m[uz(i)] += w;
  return m;
}

std::vector<double> Coupling::marginal_second() const {
  std::vector<double> m(uz(ny), 0.0);
  for (const auto& [i, j, w] : entries) m[uz(j)] += w;
  return m;
}

double distortion(const Correspondence& c, const PointedSpace& x,
                  const PointedSpace& y) {
  if (c.pairs.empty()) throw std::invalid_argument("empty correspondence");
  double sup = 0.0;
  for (std::size_t a = 0; a < c.pairs.size(); ++a)
    for (std::size_t b = a; b < c.pairs.size(); ++b) {
      double gap = std::abs(x.d(c.pairs[a].first, c.pairs[b].first) -
                            y.d(c.pairs[a].second, c.pairs[b].second));
      if (gap > sup) sup = gap;
    }
  return sup;
}

double distortion_line(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || a.size() != b.size())
    throw std::invalid_argument("coordinate lists must match and be nonempty");
  double lo = a[0] - b[0], hi = lo;
  for (std::size_t k = 1; k < a.size(); ++k) {
    double delta = a[k] - b[k];
    if (delta < lo) lo = delta;
    if (delta > hi) hi = delta;
  }
  return hi - lo;
}

double discrepancy(const Coupling& pi, const std::vector<double>& nu,
                   const std::vector<double>& nu_prime) {
  if (nu.size() != uz(pi.nx) || nu_prime.size() != uz(pi.ny))
    throw std::invalid_argument("marginal target shape mismatch");
  for (const auto& [i, j, w] : pi.entries) {
    if (i < 0 || i >= pi.nx || j < 0 || j >= pi.ny)
      throw std::invalid_argument("coupling index out of range");
    if (!(w >= 0.0)) throw std::invalid_argument("coupling weights must be >= 0");
  }
  std::vector<double> m1 = pi.marginal_first();
  std::vector<double> m2 = pi.marginal_second();
  double total = 0.0;
  for (std::size_t i = 0; i < m1.size(); ++i) total += std::abs(m1[i] - nu[i]);
  for (std::size_t j = 0; j < m2.size(); ++j) total += std::abs(m2[j] - nu_prime[j]);
  return total;
}

double coupling_outside(const Coupling& pi, const Correspondence& c) {
  std::unordered_set<long long> in;
  in.reserve(c.pairs.size() * 2);
  for (auto [i, j] : c.pairs) in.insert(pair_key(i, j));
  double out = 0.0;
  for (const auto& [i, j, w] : pi.entries)
    if (in.find(pair_key(i, j)) == in.end()) out += w;
  return out;
}

double marks_sup(const Correspondence& c, const PointedSpace& x,
                 const PointedSpace& y) {
  if (x.mark_dim == 0 && y.mark_dim == 0) return 0.0;
  if (x.mark_dim != y.mark_dim)
    throw std::invalid_argument("mark dimensions differ");
  double sup = 0.0;
  for (auto [i, j] : c.pairs) {
    double s = 0.0;
    for (int k = 0; k < x.mark_dim; ++k) {
      double gap = x.mark(i)[k] - y.mark(j)[k];
      s += gap * gap;
    }
    sup = std::max(sup, std::sqrt(s));
  }
  return sup;
}

double spatial_gh_bound(const PointedSpace& x, const PointedSpace& y,
                        const Correspondence& c, const Coupling& pi,
                        GhBoundParts* parts) {
  c.validate(x, y);
  GhBoundParts p;
  p.half_distortion = 0.5 * distortion(c, x, y);
  p.discrepancy = discrepancy(pi, x.mass, y.mass);
  p.outside = coupling_outside(pi, c);
  p.marks = marks_sup(c, x, y);
  if (parts) *parts = p;
  return p.total();
}

Correspondence canonical_correspondence_lattice(double m,
                                                const std::vector<long>& sites,
                                                const std::vector<double>& grid) {
  if (sites.empty() || grid.empty())
    throw std::invalid_argument("empty point sets");
  for (std::size_t p = 1; p < sites.size(); ++p)
    if (sites[p] != sites[p - 1] + 1)
      throw std::invalid_argument("lattice sites must be contiguous");
  if (!(m > 0.0)) throw std::invalid_argument("scale must be positive");
  Correspondence c;
  std::unordered_set<long long> seen;
  auto add = [&](int p, int j) {
    if (seen.insert(pair_key(p, j)).second) c.pairs.push_back({p, j});
  };
  long lo = sites.front(), hi = sites.back();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    long s = static_cast<long>(std::floor(m * grid[j]));
    if (s < lo) s = lo;
    if (s > hi) s = hi;
    add(static_cast<int>(s - lo), static_cast<int>(j));
  }
  // Snap every site to its nearest grid point so the left side is covered.
  for (std::size_t p = 0; p < sites.size(); ++p) {
    double x = static_cast<double>(sites[p]) / m;
    std::size_t best = 0;
    double gap = std::abs(grid[0] - x);
    for (std::size_t j = 1; j < grid.size(); ++j) {
      double g = std::abs(grid[j] - x);
      if (g < gap) {
        gap = g;
        best = j;
      }
    }
    add(static_cast<int>(p), static_cast<int>(best));
  }
  return c;
}

Correspondence canonical_correspondence_contour(long n,
                                                const std::vector<double>& grid) {
  if (n < 1 || grid.empty()) throw std::invalid_argument("empty point sets");
  long len = 2 * n - 1;  // contour positions 0 .. 2n-2
  Correspondence c;
  std::unordered_set<long long> seen;
  auto add = [&](int i, int j) {
    if (seen.insert(pair_key(i, j)).second) c.pairs.push_back({i, j});
  };
  for (std::size_t j = 0; j < grid.size(); ++j) {
    long i = static_cast<long>(std::floor(2.0 * static_cast<double>(n) * grid[j]));
    if (i < 0) i = 0;
    if (i > len - 1) i = len - 1;
    add(static_cast<int>(i), static_cast<int>(j));
  }
  for (long i = 0; i < len; ++i) {
    double t = static_cast<double>(i) / (2.0 * static_cast<double>(n));
    std::size_t best = 0;
    double gap = std::abs(grid[0] - t);
    for (std::size_t j = 1; j < grid.size(); ++j) {
      double g = std::abs(grid[j] - t);
      if (g < gap) {
        gap = g;
        best = j;
      }
    }
    add(static_cast<int>(i), static_cast<int>(best));
  }
  return c;
}

double ks_distance(const std::vector<double>& a, const std::vector<double>& b) {
  return stats::ks_statistic_two_sample(a, b);
}

double localization_stat(const env1d::Environment1D& env, long long n,
                         int walkers, Rng& rng) {
  if (n <= 1) throw std::domain_error("horizon must exceed 1 (log n = 0)");
  if (walkers < 2) throw std::invalid_argument("need at least two walkers");
  if (!std::isfinite(env.sigma2_logrho) || !(env.sigma2_logrho > 0.0))
    throw std::invalid_argument("environment lacks sigma2 metadata");
  env1d::WalkTable table(env);
  double denom = std::log(static_cast<double>(n));
  denom *= denom;
  std::vector<double> stat(uz(walkers));
  for (int w = 0; w < walkers; ++w) {
    long long end = table.endpoint(0, n, rng);
    stat[uz(w)] = env.sigma2_logrho * static_cast<double>(end) / denom;
  }
  return stats::iqr(stat);
}

PointedSpace restrict_ball(const PointedSpace& x, double R) {
  if (!(R >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
  std::vector<int> keep;
  for (int i = 0; i < x.n; ++i)
    if (x.d(x.root, i) <= R) keep.push_back(i);
  PointedSpace out;
  out.n = static_cast<int>(keep.size());
  out.mark_dim = x.mark_dim;
  out.dist.resize(uz(out.n) * uz(out.n));
  out.mass.resize(uz(out.n));
  out.marks.resize(uz(out.n) * uz(out.mark_dim));
  for (int a = 0; a < out.n; ++a) {
    if (keep[uz(a)] == x.root) out.root = a;
    out.mass[uz(a)] = x.mass[uz(keep[uz(a)])];
    for (int b = 0; b < out.n; ++b)
      out.dist[uz(a) * uz(out.n) + uz(b)] = x.d(keep[uz(a)], keep[uz(b)]);
    for (int k = 0; k < x.mark_dim; ++k)
      out.marks[uz(a) * uz(x.mark_dim) + uz(k)] = x.mark(keep[uz(a)])[k];
  }
  return out;
}

}  // namespace rwre::compare
