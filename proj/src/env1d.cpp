#include "rwre/env1d.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rwre::env1d {

double Environment1D::log_rho(int z) const {
  const double wm = wminus(z);
  // log(omega^-) - log(1 - omega^-); log1p keeps omega near 1 accurate.
  return std::log(wm) - std::log1p(-wm);
}

void Environment1D::validate() const {
  if (lo > 0 || hi < 0 || lo > hi)
    throw std::invalid_argument("Environment1D: window must contain 0");
  if (omega_minus.size() != static_cast<std::size_t>(size()))
    throw std::invalid_argument("Environment1D: omega size mismatch");
  if (flatten_index < 1)
    throw std::invalid_argument("Environment1D: flatten index must be >= 1");
  for (double w : omega_minus)
    if (!(w > 0.0) || !(w < 1.0))
      throw std::invalid_argument("Environment1D: omega must lie in (0,1)");
}

Environment1D flatten(const Environment1D& env, int m) {
  if (m < 1) throw std::invalid_argument("flatten: index must be >= 1");
  env.validate();
  Environment1D out;
  out.lo = env.lo;
  out.hi = env.hi;
  out.flatten_index = env.flatten_index * m;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  out.sigma2_logrho = env.sigma2_logrho / static_cast<double>(m);
  out.omega_minus.resize(env.omega_minus.size());
  for (int z = env.lo; z <= env.hi; ++z) {
    const double lr = scale * env.log_rho(z);
    // omega^- = rho^(1/sqrt m) / (1 + rho^(1/sqrt m)), stable for both signs.
    out.omega_minus[static_cast<std::size_t>(out.idx(z))] =
        1.0 / (1.0 + std::exp(-lr));
  }
  return out;
}

Potential1D potential1d(const Environment1D& env) {
  env.validate();
  Potential1D pot;
  pot.lo = env.lo;
  pot.hi = env.hi;
  pot.sigma2 = env.sigma2_logrho;
  pot.values.assign(static_cast<std::size_t>(env.size()), 0.0);
  // V(x) = sum_{i=1}^{x} log rho_i to the right of the origin,
  // V(x) = -sum_{i=x+1}^{0} log rho_i to the left; V(0) = 0 exactly.
  double acc = 0.0;
  for (int z = 1; z <= env.hi; ++z) {
    acc += env.log_rho(z);
    pot.values[static_cast<std::size_t>(z - pot.lo)] = acc;
  }
  acc = 0.0;
  for (int z = -1; z >= env.lo; --z) {
    acc -= env.log_rho(z + 1);
    pot.values[static_cast<std::size_t>(z - pot.lo)] = acc;
  }
  return pot;
}

double resistance1d(const Potential1D& pot, int x, int y) {
  if (!pot.in_window(x) || !pot.in_window(y))
    throw std::out_of_range("resistance1d: site outside window");
  if (x == y) return 0.0;
  if (x > y) std::swap(x, y);
  double r = 0.0;
  for (int z = x; z < y; ++z) r += std::exp(pot.at(z));
  return r;
}

double invariant1d(const Potential1D& pot, int x) {
  if (!pot.in_window(x - 1) || !pot.in_window(x))
    throw std::out_of_range("invariant1d: needs x-1 and x inside window");
  return std::exp(-pot.at(x)) + std::exp(-pot.at(x - 1));
}

double right_probability(const Potential1D& pot, int x) {
  if (!pot.in_window(x - 1) || !pot.in_window(x))
    throw std::out_of_range("right_probability: needs x-1 and x inside window");
  const double cx = std::exp(-pot.at(x));
  return cx / (std::exp(-pot.at(x - 1)) + cx);
}

Environment1D BarrierEnvironment::as_environment() const {
  Environment1D env;
  env.lo = lo;
  env.hi = hi;
  env.omega_minus.resize(static_cast<std::size_t>(hi - lo + 1));
  for (int z = lo; z <= hi; ++z)
    env.omega_minus[static_cast<std::size_t>(z - lo)] = mark(z) ? 1.0 - p : 0.5;
  const double lqp = std::log((1.0 - p) / p);
  env.sigma2_logrho = lqp * lqp * success_prob * (1.0 - success_prob);
  env.validate();
  return env;
}

BarrierEnvironment barrier_env(int lo, int hi, double success_prob, double p,
                               Rng& rng) {
  if (lo > 0 || hi < 0 || lo > hi)
    throw std::invalid_argument("barrier_env: window must contain 0");
  if (success_prob < 0.0 || success_prob > 1.0)
    throw std::invalid_argument("barrier_env: success probability outside [0,1]");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("barrier_env: p must lie in (0,1)");
  BarrierEnvironment env;
  env.lo = lo;
  env.hi = hi;
  env.success_prob = success_prob;
  env.p = p;
  env.xi.resize(static_cast<std::size_t>(hi - lo + 1));
  for (auto& x : env.xi) x = rng.bernoulli(success_prob) ? 1 : 0;
  env.beta.assign(env.xi.size(), 0);
  int acc = 0;
  for (int z = 1; z <= hi; ++z) {
    acc += env.mark(z);
    env.beta[static_cast<std::size_t>(z - lo)] = acc;
  }
  acc = 0;
  for (int z = -1; z >= lo; --z) {
    acc -= env.mark(z + 1);
    env.beta[static_cast<std::size_t>(z - lo)] = acc;
  }
  return env;
}

Potential1D barrier_potential(const BarrierEnvironment& env) {
  Potential1D pot;
  pot.lo = env.lo;
  pot.hi = env.hi;
  const double lqp = std::log((1.0 - env.p) / env.p);
  pot.sigma2 = lqp * lqp * env.success_prob * (1.0 - env.success_prob);
  pot.values.resize(env.beta.size());
  for (std::size_t i = 0; i < env.beta.size(); ++i)
    pot.values[i] = lqp * static_cast<double>(env.beta[i]);
  return pot;
}

Environment1D sample_iid_env(int lo, int hi,
                             const std::function<double(Rng&)>& omega_minus_law,
                             Rng& rng, double sigma2_logrho) {
  Environment1D env;
  env.lo = lo;
  env.hi = hi;
  env.sigma2_logrho = sigma2_logrho;
  env.omega_minus.resize(static_cast<std::size_t>(hi - lo + 1));
  for (auto& w : env.omega_minus) w = omega_minus_law(rng);
  env.validate();
  return env;
}

std::function<double(Rng&)> gaussian_logrho_law(double sigma) {
  return [sigma](Rng& rng) {
    return 1.0 / (1.0 + std::exp(-sigma * rng.normal()));
  };
}

WalkTable::WalkTable(const Environment1D& env) : lo_(env.lo), hi_(env.hi) {
  env.validate();
  up_.resize(env.omega_minus.size());
  for (int z = env.lo; z <= env.hi; ++z) {
    const double wp = env.wplus(z);
    // Threshold in 2^64 units; the per-step bias error is below 2^-63.
    up_[static_cast<std::size_t>(z - lo_)] =
        static_cast<std::uint64_t>(wp * 0x1.0p64);
  }
}

void WalkTable::exit_error(long long step, int site) const {
  std::ostringstream msg;
  msg << "walk exited environment window [" << lo_ << ", " << hi_
      << "] at site " << site << " after step " << step
      << "; widen the window";
  throw std::runtime_error(msg.str());
}

int WalkTable::endpoint(int start, long long steps, Rng& rng) const {
  if (start < lo_ || start > hi_)
    throw std::out_of_range("WalkTable: start outside window");
  const std::uint64_t* thr = up_.data();
  const std::uint64_t n = up_.size();
  std::int64_t i = start - lo_;
  for (long long t = 0; t < steps; ++t) {
    i += (rng.next_u64() < thr[i]) ? 1 : -1;
    if (static_cast<std::uint64_t>(i) >= n) exit_error(t, static_cast<int>(i) + lo_);
  }
  return static_cast<int>(i) + lo_;
}

std::vector<int> WalkTable::path(int start, long long steps, long long stride,
                                 Rng& rng) const {
  if (start < lo_ || start > hi_)
    throw std::out_of_range("WalkTable: start outside window");
  if (stride < 1) throw std::invalid_argument("WalkTable: stride must be >= 1");
  const std::uint64_t* thr = up_.data();
  const std::uint64_t n = up_.size();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(steps / stride) + 2);
  std::int64_t i = start - lo_;
  out.push_back(start);
  for (long long t = 0; t < steps; ++t) {
    i += (rng.next_u64() < thr[i]) ? 1 : -1;
    if (static_cast<std::uint64_t>(i) >= n) exit_error(t, static_cast<int>(i) + lo_);
    if ((t + 1) % stride == 0 || t + 1 == steps)
      out.push_back(static_cast<int>(i) + lo_);
  }
  return out;
}

int simulate_walk(const Environment1D& env, int start, long long steps, Rng& rng) {
  return WalkTable(env).endpoint(start, steps, rng);
}

std::vector<int> simulate_endpoints(const Environment1D& env, int start,
                                    long long steps, int walkers, Rng& rng) {
  WalkTable table(env);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(walkers));
  for (int w = 0; w < walkers; ++w) out.push_back(table.endpoint(start, steps, rng));
  return out;
}

void write_environment(std::ostream& os, const Environment1D& env,
                       const Potential1D& pot) {
  if (env.lo != pot.lo || env.hi != pot.hi)
    throw std::invalid_argument("write_environment: window mismatch");
  char buf[128];
  std::snprintf(buf, sizeof buf, "# flatten_index %d sigma2 %.17g\n",
                env.flatten_index, env.sigma2_logrho);
  os << buf << "# site omega_minus v\n";
  for (int z = env.lo; z <= env.hi; ++z) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", z, env.wminus(z), pot.at(z));
    os << buf;
  }
}

std::pair<Environment1D, Potential1D> read_environment(std::istream& is) {
  Environment1D env;
  Potential1D pot;
  std::vector<int> sites;
  std::vector<double> omegas, vs;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line);
      std::string hash, key;
      hs >> hash >> key;
      if (key == "flatten_index")
        hs >> env.flatten_index >> key >> env.sigma2_logrho;
      continue;
    }
    std::istringstream ls(line);
    int z;
    double w, v;
    if (!(ls >> z >> w >> v))
      throw std::runtime_error("read_environment: malformed row: " + line);
    sites.push_back(z);
    omegas.push_back(w);
    vs.push_back(v);
  }
  if (sites.empty()) throw std::runtime_error("read_environment: empty file");
  env.lo = sites.front();
  env.hi = sites.back();
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i] != env.lo + static_cast<int>(i))
      throw std::runtime_error("read_environment: sites not contiguous");
  env.omega_minus = omegas;
  pot.lo = env.lo;
  pot.hi = env.hi;
  pot.values = vs;
  pot.sigma2 = env.sigma2_logrho;
  env.validate();
  return {env, pot};
}

}  // namespace rwre::env1d
