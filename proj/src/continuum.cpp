#include "rwre/continuum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rwre::continuum {

namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

std::vector<double> gaussian_bridge(int N, Rng& rng) {
  // Random walk with N(0, 1/N) steps pinned back to 0 at the right end.
  std::vector<double> b(uz(N) + 1);
  double step_sd = std::sqrt(1.0 / static_cast<double>(N));
  b[0] = 0.0;
  for (int i = 1; i <= N; ++i) b[uz(i)] = b[uz(i) - 1] + step_sd * rng.normal();
  double drift = b[uz(N)];
  for (int i = 1; i <= N; ++i)
    b[uz(i)] -= drift * (static_cast<double>(i) / static_cast<double>(N));
  b[uz(N)] = 0.0;
  return b;
}

}  // namespace

void Excursion::validate() const {
  if (N < 1 || g.size() != uz(N) + 1)
    throw std::invalid_argument("excursion grid size mismatch");
  if (g.front() != 0.0 || g.back() != 0.0)
    throw std::invalid_argument("excursion endpoints must be exactly zero");
  for (double x : g)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("excursion values must be nonnegative");
}

Excursion sample_excursion(int N, Rng& rng) {
  if (N < 2) throw std::invalid_argument("grid size must be at least 2");
  std::vector<double> b = gaussian_bridge(N, rng);
  int m = 0;
  for (int i = 1; i < N; ++i)
    if (b[uz(i)] < b[uz(m)]) m = i;
  Excursion e;
  e.N = N;
  e.g.resize(uz(N) + 1);
  for (int k = 0; k <= N; ++k) {
    int idx = (m + k) % N;
    e.g[uz(k)] = b[uz(idx)] - b[uz(m)];
  }
  e.g[0] = 0.0;
  e.g[uz(N)] = 0.0;
  return e;
}

Excursion sample_excursion_bridge_conditioned(int N, Rng& rng, long long* tries) {
  if (N < 2) throw std::invalid_argument("grid size must be at least 2");
  long long count = 0;
  while (true) {
    std::vector<double> b = gaussian_bridge(N, rng);
    ++count;
    bool ok = true;
    for (int i = 1; i < N && ok; ++i) ok = b[uz(i)] >= 0.0;
    if (ok) {
      if (tries) *tries = count;
      Excursion e;
      e.N = N;
      e.g = std::move(b);
      return e;
    }
  }
}

CodedTree::CodedTree(Excursion e) : e_(std::move(e)) {
  e_.validate();
  if (e_.N > (1 << 20)) throw std::invalid_argument("excursion grid too large");
  int n = e_.N + 1;
  log2_.assign(uz(n) + 1, 0);
  for (int i = 2; i <= n; ++i) log2_[uz(i)] = log2_[uz(i / 2)] + 1;
  int levels = log2_[uz(n)] + 1;
  table_.resize(uz(levels));
  table_[0].resize(uz(n));
  for (int i = 0; i < n; ++i) table_[0][uz(i)] = i;
  for (int k = 1; k < levels; ++k) {
    int span = 1 << k;
    table_[uz(k)].resize(uz(n - span + 1));
    for (int i = 0; i + span <= n; ++i) {
      int a = table_[uz(k) - 1][uz(i)];
      int b = table_[uz(k) - 1][uz(i + span / 2)];
      table_[uz(k)][uz(i)] = e_.g[uz(b)] < e_.g[uz(a)] ? b : a;
    }
  }
}

int CodedTree::argmin_idx(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j > e_.N) throw std::out_of_range("grid index out of range");
  int len = j - i + 1;
  int k = log2_[uz(len)];
  int a = table_[uz(k)][uz(i)];
  int b = table_[uz(k)][uz(j - (1 << k) + 1)];
  return e_.g[uz(b)] < e_.g[uz(a)] ? b : a;
}

double CodedTree::min_between(int i, int j) const {
  return e_.g[uz(argmin_idx(i, j))];
}

double CodedTree::distance_idx(int i, int j) const {
  return e_.g[uz(i)] + e_.g[uz(j)] - 2.0 * min_between(i, j);
}

int CodedTree::time_to_idx(double t) const {
  long idx = std::lround(t * static_cast<double>(e_.N));
  if (idx < 0) idx = 0;
  if (idx > e_.N) idx = e_.N;
  return static_cast<int>(idx);
}

double CodedTree::distance_time(double s, double u) const {
  return distance_idx(time_to_idx(s), time_to_idx(u));
}

double ball_mass(const CodedTree& t, int center, double radius) {
  int N = t.grid_size();
  int count = 0;
  for (int i = 0; i < N; ++i)
    if (t.distance_idx(center, i) <= radius) ++count;
  return static_cast<double>(count) / static_cast<double>(N);
}

std::vector<int> class_representatives(const CodedTree& t,
                                       const std::vector<int>& times,
                                       std::vector<int>* cls) {
  std::vector<int> reps;
  if (cls) cls->assign(times.size(), -1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    int found = -1;
    for (std::size_t r = 0; r < reps.size(); ++r)
      if (t.distance_idx(times[k], reps[r]) == 0.0) {
        found = static_cast<int>(r);
        break;
      }
    if (found < 0) {
      reps.push_back(times[k]);
      found = static_cast<int>(reps.size()) - 1;
    } else if (times[k] < reps[static_cast<std::size_t>(found)]) {
      // Keep the smallest index as the face of the class; members share
      // heights and running minima exactly, so nothing downstream moves.
      reps[static_cast<std::size_t>(found)] = times[k];
    }
    if (cls) (*cls)[k] = found;
  }
  return reps;
}

double StickBreakTree::point_root_distance(int k, double offset) const {
  const StickSegment& s = seg[uz(k)];
  if (offset < 0.0 || offset > s.length)
    throw std::invalid_argument("offset outside segment");
  return s.base + offset;
}

StickBreakTree stick_breaking(Rng& rng, int K) {
  if (K < 1) throw std::invalid_argument("segment count must be at least 1");
  StickBreakTree t;
  double c = std::sqrt(2.0 * rng.exponential());
  t.cuts.push_back(c);
  t.seg.push_back({0.0, c, -1, 0.0});
  for (int i = 1; i < K; ++i) {
    double prev = t.cuts.back();
    double next = std::sqrt(prev * prev + 2.0 * rng.exponential());
    // Attach point uniform over the existing total length.
    double u = rng.uniform01() * prev;
    int j = 0;
    while (u >= t.seg[uz(j)].length && j + 1 < static_cast<int>(t.seg.size())) {
      u -= t.seg[uz(j)].length;
      ++j;
    }
    if (u > t.seg[uz(j)].length) u = t.seg[uz(j)].length;  // rounding guard
    t.cuts.push_back(next);
    t.seg.push_back({t.seg[uz(j)].base + u, next - prev, j, u});
  }
  return t;
}

double stick_uniform_root_distance(const StickBreakTree& t, Rng& rng) {
  double u = rng.uniform01() * t.total_length();
  int j = 0;
  while (u >= t.seg[uz(j)].length && j + 1 < static_cast<int>(t.seg.size())) {
    u -= t.seg[uz(j)].length;
    ++j;
  }
  if (u > t.seg[uz(j)].length) u = t.seg[uz(j)].length;
  return t.seg[uz(j)].base + u;
}

double coded_subtree_uniform_root_distance(const CodedTree& t, int K,
                                           double scale, Rng& rng) {
  if (K < 1) throw std::invalid_argument("leaf count must be at least 1");
  int N = t.grid_size();
  std::vector<int> leaf(uz(K));
  for (int k = 0; k < K; ++k)
    leaf[uz(k)] = static_cast<int>(rng.uniform01() * N);
  std::sort(leaf.begin(), leaf.end());
  // Sorted leaves: each adds the piece of its root path above the branch
  // with its predecessor, whose height is the running minimum between them.
  std::vector<double> inc(uz(K)), floor_h(uz(K));
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    double m = k == 0 ? 0.0 : t.min_between(leaf[uz(k) - 1], leaf[uz(k)]);
    floor_h[uz(k)] = m;
    inc[uz(k)] = scale * (t.root_distance(leaf[uz(k)]) - m);
    total += inc[uz(k)];
  }
  if (!(total > 0.0)) return 0.0;
  double u = rng.uniform01() * total;
  int j = 0;
  while (u >= inc[uz(j)] && j + 1 < K) {
    u -= inc[uz(j)];
    ++j;
  }
  return scale * floor_h[uz(j)] + u;
}

GaussianField sample_gaussian_field(const CodedTree& t,
                                    const std::vector<int>& times, int d,
                                    Rng& rng,
                                    const std::vector<double>* coeff) {
  if (times.empty()) throw std::invalid_argument("no sample times");
  if (times.size() > 2000)
    throw std::invalid_argument("at most 2000 sample times (dense factorization)");
  if (d < 1 || d > 16) throw std::invalid_argument("field dimension out of range");
  for (int s : times)
    if (s < 0 || s > t.grid_size())
      throw std::invalid_argument("sample time off the grid");
  if (coeff && coeff->size() != uz(d) * uz(d))
    throw std::invalid_argument("coefficient matrix must be d x d");

  std::vector<int> cls;
  std::vector<int> reps = class_representatives(t, times, &cls);
  int c = static_cast<int>(reps.size());
  // Classes at height zero are the root class: pinned to exact zeros, never
  // part of the factorization.
  std::vector<int> active;
  std::vector<int> slot(uz(c), -1);
  for (int r = 0; r < c; ++r)
    if (t.root_distance(reps[uz(r)]) > 0.0) {
      slot[uz(r)] = static_cast<int>(active.size());
      active.push_back(r);
    }
  int a = static_cast<int>(active.size());
  Eigen::MatrixXd cov(a, a);
  double max_diag = 0.0;
  for (int i = 0; i < a; ++i) {
    for (int j = i; j < a; ++j) {
      double m = t.min_between(reps[uz(active[uz(i)])], reps[uz(active[uz(j)])]);
      cov(i, j) = m;
      cov(j, i) = m;
    }
    max_diag = std::max(max_diag, cov(i, i));
  }
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
  bool ok = false;
  for (double scale : {0.0, 1e-15, 1e-13, 1e-12}) {
    jitter = scale * max_diag;
    Eigen::MatrixXd m = cov;
    for (int i = 0; i < a; ++i) m(i, i) += jitter;
    llt.compute(m);
    if (llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
  }
  if (!ok)
    throw std::runtime_error(
        "covariance factorization failed beyond the 1e-12 jitter tolerance");

  Eigen::MatrixXd z(a, d);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = rng.normal();
  Eigen::MatrixXd val = llt.matrixL() * z;  // a x d

  GaussianField f;
  f.d = d;
  f.times = times;
  f.coeff.assign(uz(d) * uz(d), 0.0);
  for (int i = 0; i < d; ++i) f.coeff[uz(i) * uz(d) + uz(i)] = 1.0;
  if (coeff) f.coeff = *coeff;
  f.phi.assign(times.size() * uz(d), 0.0);
  for (std::size_t k = 0; k < times.size(); ++k) {
    int r = cls[k];
    int s = slot[uz(r)];
    for (int i = 0; i < d; ++i) {
      double x = 0.0;
      if (s >= 0)
        for (int j = 0; j < d; ++j) x += f.coeff[uz(i) * uz(d) + uz(j)] * val(s, j);
      f.phi[k * uz(d) + uz(i)] = x;
    }
  }
  return f;
}

std::vector<double> tilted_root_distance(const CodedTree& t,
                                         const std::vector<double>& psi,
                                         double sigma_c, double weight_sign) {
  const Excursion& e = t.excursion();
  if (psi.size() != e.g.size())
    throw std::invalid_argument("potential grid size mismatch");
  std::vector<double> w(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    w[i] = std::exp(weight_sign * sigma_c * psi[i]);

  struct Seg {
    double lo, hi, contrib;
  };
  std::vector<Seg> stack;
  std::vector<double> D(e.g.size());
  D[0] = 0.0;
  double running = 0.0;
  for (int i = 0; i < e.N; ++i) {
    double y0 = e.g[uz(i)], y1 = e.g[uz(i) + 1];
    if (y1 > y0) {
      double contrib = (y1 - y0) * 0.5 * (w[uz(i)] + w[uz(i) + 1]);
      stack.push_back({y0, y1, contrib});
      running += contrib;
    } else if (y1 < y0) {
      // Retract the root path down to height y1, popping what the ascent
      // pushed so the descent cancels it exactly.
      while (!stack.empty() && stack.back().lo >= y1) {
        running -= stack.back().contrib;
        stack.pop_back();
      }
      if (!stack.empty() && stack.back().hi > y1) {
        Seg& top = stack.back();
        double frac = (top.hi - y1) / (top.hi - top.lo);
        double removed = top.contrib * frac;
        running -= removed;
        top.contrib -= removed;
        top.hi = y1;
      }
    }
    D[uz(i) + 1] = running;
  }
  return D;
}

double distorted_metric(const CodedTree& t, const std::vector<double>& D_plus,
                        int i, int j) {
  int b = t.argmin_idx(i, j);
  return (D_plus[uz(i)] - D_plus[uz(b)]) + (D_plus[uz(j)] - D_plus[uz(b)]);
}

double distorted_metric(const CodedTree& t, const std::vector<double>& psi,
                        double sigma_c, int i, int j) {
  std::vector<double> D = tilted_root_distance(t, psi, sigma_c, 1.0);
  return distorted_metric(t, D, i, j);
}

Excursion tilted_excursion(const CodedTree& t, const std::vector<double>& psi,
                           double sigma_c) {
  std::vector<double> D = tilted_root_distance(t, psi, sigma_c, -1.0);
  double top = 0.0;
  for (double x : D) top = std::max(top, x);
  if (std::abs(D.back()) > 1e-9 * (1.0 + top))
    throw std::runtime_error("tilted excursion failed to close");
  for (double& x : D)
    if (x < 0.0) x = 0.0;
  D.back() = 0.0;
  Excursion out;
  out.N = t.grid_size();
  out.g = std::move(D);
  return out;
}

std::vector<double> tilted_contour(const treecore::OrderedTree& tree,
                                   const treecore::ContourSequence& seq,
                                   const std::vector<double>& v, double gamma) {
  seq.validate();
  if (static_cast<int>(v.size()) != tree.n)
    throw std::invalid_argument("potential size mismatch");
  std::size_t len = seq.heights.size();
  std::vector<double> out(len);
  out[0] = 0.0;
  double running = 0.0;
  for (std::size_t i = 0; i + 1 < len; ++i) {
    if (seq.heights[i + 1] > seq.heights[i]) {
      running += std::exp(-gamma * v[uz(seq.visit[i + 1])]);
    } else {
      running -= std::exp(-gamma * v[uz(seq.visit[i])]);
    }
    out[i + 1] = running;
  }
  return out;
}

double ContinuumPotential::value(double x) const {
  if (!in_window(x)) throw std::out_of_range("potential evaluated outside window");
  double u = (x - x0) / mesh;
  double fl = std::floor(u);
  std::size_t i = static_cast<std::size_t>(fl);
  if (i + 1 >= w.size()) return w.back();
  double frac = u - fl;
  // Snap to the node when x is a grid point up to rounding, keeping grid
  // evaluations exact.
  if (frac < 1e-9) return w[i];
  if (frac > 1.0 - 1e-9) return w[i + 1];
  return w[i] + frac * (w[i + 1] - w[i]);
}

ContinuumPotential make_potential(const std::string& kind,
                                  const PotentialParams& params,
                                  double half_width, double mesh, Rng& rng) {
  if (!(mesh > 0.0) || !(half_width >= mesh))
    throw std::invalid_argument("window must span at least one mesh step");
  long K = std::lround(half_width / mesh);
  ContinuumPotential pot;
  pot.params = params;
  pot.mesh = mesh;
  pot.x0 = -static_cast<double>(K) * mesh;
  pot.w.assign(uz(static_cast<int>(2 * K + 1)), 0.0);
  std::size_t origin = static_cast<std::size_t>(K);
  if (kind == "two-sided-bm") {
    pot.kind = PotentialKind::two_sided_bm;
    double sd = params.sigma * std::sqrt(mesh);
    pot.w[origin] = 0.0;
    for (std::size_t i = origin + 1; i < pot.w.size(); ++i)
      pot.w[i] = pot.w[i - 1] + sd * rng.normal();
    for (std::size_t i = origin; i > 0; --i)
      pot.w[i - 1] = pot.w[i] + sd * rng.normal();
  } else if (kind == "poisson-log") {
    pot.kind = PotentialKind::poisson_log;
    if (!(params.p > 0.0) || !(params.q > 0.0) || !(params.lambda > 0.0))
      throw std::invalid_argument("poisson-log needs positive p, q, lambda");
    double jump = std::log(params.q / params.p);
    std::vector<double> right, left;
    for (double s = rng.exponential() / params.lambda; s <= half_width;
         s += rng.exponential() / params.lambda)
      right.push_back(s);
    for (double s = rng.exponential() / params.lambda; s <= half_width;
         s += rng.exponential() / params.lambda)
      left.push_back(-s);
    for (std::size_t i = 0; i < pot.w.size(); ++i) {
      double x = pot.x0 + static_cast<double>(i) * mesh;
      long n = 0;
      if (x > 0.0) {
        for (double s : right)
          if (s <= x) ++n;
      } else if (x < 0.0) {
        for (double s : left)
          if (s > x) --n;
      }
      pot.w[i] = jump * static_cast<double>(n);
    }
  } else if (kind == "gaussian-drift") {
    throw std::invalid_argument(
        "gaussian-drift lives on a coded tree; use make_drift_potential");
  } else {
    throw std::invalid_argument("unknown potential kind: " + kind);
  }
  return pot;
}

ContinuumPotential make_drift_potential(const CodedTree& t,
                                        const GaussianField& field) {
  if (field.d != 1)
    throw std::invalid_argument("drift potential needs a scalar field");
  int N = t.grid_size();
  if (static_cast<int>(field.times.size()) != N + 1)
    throw std::invalid_argument("field must cover the full excursion grid");
  for (int k = 0; k <= N; ++k)
    if (field.times[uz(k)] != k)
      throw std::invalid_argument("field must cover the full excursion grid");
  ContinuumPotential pot;
  pot.kind = PotentialKind::gaussian_drift;
  pot.x0 = 0.0;
  pot.mesh = 1.0 / static_cast<double>(N);
  pot.w.resize(uz(N) + 1);
  const double rt2 = std::sqrt(2.0);
  for (int k = 0; k <= N; ++k)
    pot.w[uz(k)] = rt2 * field.phi[uz(k)] + t.root_distance(k);
  return pot;
}

namespace {

// Rates of the mesh chain on k*h, k in [k_min, k_max]; boundary sites are
// treated as window exits.
struct MeshChain {
  long k_min, k_max, k0;
  double h;
  std::vector<double> up, dn;  // indexed by k - k_min (interior only)
};

MeshChain build_chain(const ContinuumPotential& W, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("mesh must be positive");
  MeshChain c;
  c.h = h;
  c.k_min = std::lround(std::ceil(W.x0 / h - 1e-9));
  c.k_max = std::lround(std::floor(W.right_end() / h + 1e-9));
  if (c.k_max - c.k_min < 2)
    throw std::invalid_argument("window narrower than three mesh sites");
  if (c.k_min > 0 || c.k_max < 0)
    throw std::invalid_argument("window does not contain the origin");
  c.k0 = 0;
  std::size_t n = static_cast<std::size_t>(c.k_max - c.k_min + 1);
  std::vector<double> ew(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = static_cast<double>(c.k_min + static_cast<long>(i)) * h;
    double w = W.value(x);
    ew[i] = std::exp(w);
    f[i] = 2.0 * std::exp(-w);
  }
  c.up.assign(n, 0.0);
  c.dn.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // Cell mass of the linear interpolant of the speed density over
    // [x-h/2, x+h/2] and trapezoid edge resistances.
    double nu = (h / 8.0) * (f[i - 1] + 6.0 * f[i] + f[i + 1]);
    double r_up = 0.5 * h * (ew[i] + ew[i + 1]);
    double r_dn = 0.5 * h * (ew[i - 1] + ew[i]);
    // The speed density already carries its factor 2; with rates 1/(nu r)
    // the flat-potential chain has Var(X_t) = t, the Brownian normalization
    // that matches the unit-time-per-step lattice walk.
    c.up[i] = 1.0 / (nu * r_up);
    c.dn[i] = 1.0 / (nu * r_dn);
  }
  return c;
}

long run_chain(const MeshChain& c, double horizon, Rng& rng, MeshPath* record) {
  long k = c.k0;
  double t = 0.0;
  if (record) {
    record->t.push_back(0.0);
    record->x.push_back(static_cast<double>(k) * c.h);
  }
  while (true) {
    std::size_t i = static_cast<std::size_t>(k - c.k_min);
    double total = c.up[i] + c.dn[i];
    double dt = rng.exponential() / total;
    if (t + dt >= horizon) return k;
    t += dt;
    k += rng.uniform01() * total < c.up[i] ? 1 : -1;
    if (k == c.k_min || k == c.k_max) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "mesh walk exited the sampled window at x = %.6g (t = %.6g); "
                    "widen the window",
                    static_cast<double>(k) * c.h, t);
      throw std::runtime_error(buf);
    }
    if (record) {
      record->t.push_back(t);
      record->x.push_back(static_cast<double>(k) * c.h);
    }
  }
}

}  // namespace

double brox_endpoint(const ContinuumPotential& W, double horizon, double h,
                     Rng& rng) {
  MeshChain c = build_chain(W, h);
  return static_cast<double>(run_chain(c, horizon, rng, nullptr)) * h;
}

MeshPath brox_simulate(const ContinuumPotential& W, double horizon, double h,
                       Rng& rng) {
  MeshChain c = build_chain(W, h);
  MeshPath path;
  run_chain(c, horizon, rng, &path);
  return path;
}

void write_excursion_csv(std::ostream& os, const Excursion& e) {
  os << "i,t,g\n";
  char buf[96];
  for (int i = 0; i <= e.N; ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", i,
                  static_cast<double>(i) / static_cast<double>(e.N), e.g[uz(i)]);
    os << buf;
  }
}

void write_field_csv(std::ostream& os, const GaussianField& f) {
  os << "k,time_index";
  for (int j = 0; j < f.d; ++j) os << ",phi" << j;
  os << "\n";
  char buf[64];
  for (std::size_t k = 0; k < f.times.size(); ++k) {
    os << k << ',' << f.times[k];
    for (int j = 0; j < f.d; ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", f.phi[k * uz(f.d) + uz(j)]);
      os << buf;
    }
    os << "\n";
  }
}

void write_potential_csv(std::ostream& os, const ContinuumPotential& w) {
  os << "x,w\n";
  char buf[96];
  for (std::size_t i = 0; i < w.w.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n",
                  w.x0 + static_cast<double>(i) * w.mesh, w.w[i]);
    os << buf;
  }
}

void write_sticks_csv(std::ostream& os, const StickBreakTree& t) {
  os << "id,length,parent,offset\n";
  char buf[96];
  for (std::size_t k = 0; k < t.seg.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%d,%.17g\n", k, t.seg[k].length,
                  t.seg[k].parent_seg, t.seg[k].parent_offset);
    os << buf;
  }
}

}  // namespace rwre::continuum
