#include "rwre/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rwre/compare.hpp"
#include "rwre/continuum.hpp"
#include "rwre/env1d.hpp"
#include "rwre/errw.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"
#include "rwre/treecore.hpp"
#include "rwre/treewalk.hpp"

namespace rwre::runner {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

long long parse_ll(const std::string& key, const std::string& v) {
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
  return x;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad number for '" + key + "': " + v);
  return x;
}

std::vector<long> parse_ladder(const std::string& v) {
  std::vector<long> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<long>(parse_ll("ladder", item)));
  }
  return out;
}

// Parses "<name>" or "<name>:<number>"; returns true and fills value when the
// suffix form is present.
bool split_rule(const std::string& s, const std::string& name, double* value) {
  if (s.rfind(name + ":", 0) != 0) return false;
  *value = parse_double(name, s.substr(name.size() + 1));
  return true;
}

treecore::OffspringDistribution offspring_for(const std::string& spec) {
  if (spec == "geometric-half") return treecore::geometric_half();
  double par = 0.0;
  if (split_rule(spec, "geometric", &par)) {
    if (par <= 0.0 || par >= 1.0)
      throw std::invalid_argument("offspring geometric parameter must lie in (0, 1)");
    treecore::OffspringDistribution law;
    double tail = 1.0;
    for (int k = 0; tail > 1e-18 && k < 4096; ++k) {
      law.pmf.push_back(par * tail);  // P(k) = p (1-p)^k
      tail *= 1.0 - par;
    }
    double lq = std::log1p(-par);
    int cap = static_cast<int>(law.pmf.size()) - 1;
    law.sampler = [lq, cap](Rng& rng) {
      int k = static_cast<int>(std::log(rng.uniform01()) / lq);
      return std::min(k, cap);
    };
    return law;
  }
  if (split_rule(spec, "poisson", &par)) {
    if (par <= 0.0) throw std::invalid_argument("offspring poisson mean must be positive");
    treecore::OffspringDistribution law;
    double term = std::exp(-par);
    for (int k = 0; (term > 1e-18 || k <= par) && k < 4096; ++k) {
      law.pmf.push_back(term);
      term *= par / static_cast<double>(k + 1);
    }
    law.sampler = [par](Rng& rng) { return static_cast<int>(rng.poisson(par)); };
    return law;
  }
  throw std::invalid_argument("unknown offspring law: " + spec);
}

struct TaskOut {
  std::string file_name;
  std::string file_body;
  std::string stat_line;  // one JSON object, no trailing newline
};

// JSON lines are assembled by hand so key order and float formatting are
// fixed; byte-identical statistics across runs is part of the contract.
class JsonLine {
 public:
  explicit JsonLine(const char* scenario) {
    body_ = std::string("{\"scenario\":\"") + scenario + "\"";
  }
  JsonLine& field(const char* key, long long v) {
    body_ += std::string(",\"") + key + "\":" + std::to_string(v);
    return *this;
  }
  JsonLine& field(const char* key, std::uint64_t v) {
    body_ += std::string(",\"") + key + "\":" + std::to_string(v);
    return *this;
  }
  JsonLine& field(const char* key, double v) {
    body_ += std::string(",\"") + key + "\":" + fmt_double(v);
    return *this;
  }
  std::string close() { return body_ + "}"; }

 private:
  std::string body_;
};

long long default_steps(const ExperimentConfig& c, long long fallback) {
  return c.horizon > 0 ? c.horizon : fallback;
}

std::string trajectory_csv(const std::vector<int>& sites, long long stride) {
  std::string out = "step,site\n";
  char buf[64];
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%d\n",
                  static_cast<long long>(i) * stride, sites[i]);
    out += buf;
  }
  return out;
}

// Window wide enough for the localization scale of the flattened environment
// (wells grow like m (log n)^2 / sigma^2), capped by the step count.
int window_for(long m, long long steps, double sigma2) {
  double ln = std::log(static_cast<double>(steps) + 1.0);
  double scale = 6.0 * static_cast<double>(m) * ln * ln / std::max(sigma2, 1e-4);
  double w = std::min(static_cast<double>(steps), std::max(400.0, scale));
  return static_cast<int>(w);
}

TaskOut run_sinai(const ExperimentConfig& c, long m, int rep, Rng& rng,
                  std::uint64_t task_seed) {
  long long steps = default_steps(c, 100LL * m);
  double sigma2 = c.sigma * c.sigma;
  int half = window_for(m, steps, sigma2 / static_cast<double>(m));
  env1d::Environment1D env = env1d::sample_iid_env(
      -half, half, env1d::gaussian_logrho_law(c.sigma), rng, sigma2);
  env1d::Environment1D flat = env1d::flatten(env, static_cast<int>(m));
  env1d::WalkTable table(flat);
  long long stride = std::max<long long>(1, steps / 1000);
  std::vector<int> sites = table.path(0, steps, stride, rng);
  int endpoint = sites.back();
  double loc = flat.sigma2_logrho * static_cast<double>(endpoint) /
               (std::log(static_cast<double>(steps)) *
                std::log(static_cast<double>(steps)));
  TaskOut out;
  out.file_body = trajectory_csv(sites, stride);
  out.stat_line = JsonLine("sinai")
                      .field("m", static_cast<long long>(m))
                      .field("rep", static_cast<long long>(rep))
                      .field("seed", task_seed)
                      .field("steps", steps)
                      .field("endpoint", static_cast<long long>(endpoint))
                      .field("localization", loc)
                      .close();
  return out;
}

TaskOut run_barriers(const ExperimentConfig& c, long m, int rep, Rng& rng,
                     std::uint64_t task_seed) {
  long long steps = default_steps(c, 100LL * m);
  double jump = std::log((1.0 - c.p) / c.p);
  double sigma2 = c.lambda * (1.0 - c.lambda) * jump * jump;
  int half = window_for(m, steps, sigma2 / static_cast<double>(m));
  env1d::BarrierEnvironment benv =
      env1d::barrier_env(-half, half, c.lambda, c.p, rng);
  env1d::Environment1D flat =
      env1d::flatten(benv.as_environment(), static_cast<int>(m));
  env1d::WalkTable table(flat);
  long long stride = std::max<long long>(1, steps / 1000);
  std::vector<int> sites = table.path(0, steps, stride, rng);
  int endpoint = sites.back();
  TaskOut out;
  out.file_body = trajectory_csv(sites, stride);
  out.stat_line = JsonLine("barriers")
                      .field("m", static_cast<long long>(m))
                      .field("rep", static_cast<long long>(rep))
                      .field("seed", task_seed)
                      .field("steps", steps)
                      .field("endpoint", static_cast<long long>(endpoint))
                      .field("barrier_height",
                             static_cast<long long>(benv.beta_at(endpoint)))
                      .close();
  return out;
}

TaskOut run_brw_bias(const ExperimentConfig& c, long n, int rep, Rng& rng,
                     std::uint64_t task_seed) {
  treecore::OffspringDistribution law = offspring_for(c.offspring);
  treecore::OrderedTree tree =
      treecore::sample_gw_conditioned(law, static_cast<int>(n), rng);
  treecore::StepSampler steps_law = treecore::gaussian_steps(c.d, c.step_sigma);
  treecore::SpatialMarks marks = treecore::embed_brw(tree, steps_law, rng);
  treewalk::TreeConductances cond =
      treewalk::biased_conductances(tree, marks, c.beta, c.gamma);
  long long steps = default_steps(c, 16LL * n);
  int endpoint = treewalk::simulate_discrete(cond, tree.root, steps, rng);
  bool at_base = endpoint == tree.n;
  int depth = at_base ? -1 : tree.depth[static_cast<std::size_t>(endpoint)];
  double phi1 = at_base ? 0.0 : marks.phi1(endpoint);
  std::ostringstream csv;
  treecore::write_contour_csv(csv, treecore::contour(tree), &marks);
  TaskOut out;
  out.file_body = csv.str();
  out.stat_line = JsonLine("brw_bias")
                      .field("n", static_cast<long long>(n))
                      .field("rep", static_cast<long long>(rep))
                      .field("seed", task_seed)
                      .field("steps", steps)
                      .field("endpoint", static_cast<long long>(endpoint))
                      .field("endpoint_depth", static_cast<long long>(depth))
                      .field("endpoint_phi1", phi1)
                      .close();
  return out;
}

TaskOut run_errw(const ExperimentConfig& c, long n, int rep, Rng& rng,
                 std::uint64_t task_seed) {
  treecore::OffspringDistribution law = offspring_for(c.offspring);
  treecore::OrderedTree tree =
      treecore::sample_gw_conditioned(law, static_cast<int>(n), rng);
  double alpha0 = alpha0_for(c, n);
  errw::SinhEnvironment env = errw::sample_sinh_environment(tree, alpha0, rng);
  double w0 = errw::default_initial_weight(n);
  std::vector<double> weight(static_cast<std::size_t>(tree.n), w0);
  long long steps = default_steps(c, 16LL * n);
  std::vector<int> traj =
      errw::simulate_errw(tree, weight, tree.root, steps, rng);
  int endpoint = traj.back();
  bool at_base = endpoint == tree.n;
  int depth = at_base ? -1 : tree.depth[static_cast<std::size_t>(endpoint)];
  double max_u = 0.0;
  for (double u : env.U) max_u = std::max(max_u, u);
  std::ostringstream csv;
  errw::write_environment_csv(csv, tree, env);
  TaskOut out;
  out.file_body = csv.str();
  out.stat_line = JsonLine("errw")
                      .field("n", static_cast<long long>(n))
                      .field("rep", static_cast<long long>(rep))
                      .field("seed", task_seed)
                      .field("alpha0", alpha0)
                      .field("steps", steps)
                      .field("endpoint", static_cast<long long>(endpoint))
                      .field("endpoint_depth", static_cast<long long>(depth))
                      .field("max_u", max_u)
                      .close();
  return out;
}

TaskOut run_crt_check(const ExperimentConfig& c, long grid, int rep, Rng& rng,
                      std::uint64_t task_seed) {
  const int kLeaves = 8;
  std::vector<double> stick_draws, coded_draws;
  stick_draws.reserve(static_cast<std::size_t>(c.walkers));
  coded_draws.reserve(static_cast<std::size_t>(c.walkers));
  continuum::Excursion last;
  for (int i = 0; i < c.walkers; ++i) {
    continuum::StickBreakTree stick = continuum::stick_breaking(rng, kLeaves);
    stick_draws.push_back(continuum::stick_uniform_root_distance(stick, rng));
    continuum::Excursion e =
        continuum::sample_excursion(static_cast<int>(grid), rng);
    continuum::CodedTree t(e);
    coded_draws.push_back(
        continuum::coded_subtree_uniform_root_distance(t, kLeaves, 2.0, rng));
    if (i + 1 == c.walkers) last = e;
  }
  double ks = compare::ks_distance(stick_draws, coded_draws);
  double mean_stick = stats::mean(stick_draws);
  double mean_coded = stats::mean(coded_draws);
  std::ostringstream csv;
  continuum::write_excursion_csv(csv, last);
  TaskOut out;
  out.file_body = csv.str();
  out.stat_line = JsonLine("crt_check")
                      .field("grid", static_cast<long long>(grid))
                      .field("rep", static_cast<long long>(rep))
                      .field("seed", task_seed)
                      .field("draws", static_cast<long long>(c.walkers))
                      .field("ks", ks)
                      .field("mean_stick", mean_stick)
                      .field("mean_coded", mean_coded)
                      .close();
  return out;
}

TaskOut run_brox(const ExperimentConfig& c, long paths, int rep, Rng& rng,
                 std::uint64_t task_seed) {
  continuum::PotentialParams params;
  params.sigma = c.sigma;
  continuum::ContinuumPotential W = continuum::make_potential(
      "two-sided-bm", params, c.half_width, c.mesh, rng);
  std::vector<double> ends(static_cast<std::size_t>(paths));
  for (long i = 0; i < paths; ++i)
    ends[static_cast<std::size_t>(i)] =
        continuum::brox_endpoint(W, c.time_horizon, c.mesh, rng);
  double m1 = stats::mean(ends);
  double var = stats::variance(ends);
  double med = stats::quantile(ends, 0.5);
  std::ostringstream csv;
  continuum::write_potential_csv(csv, W);
  TaskOut out;
  out.file_body = csv.str();
  out.stat_line = JsonLine("brox")
                      .field("paths", static_cast<long long>(paths))
                      .field("rep", static_cast<long long>(rep))
                      .field("seed", task_seed)
                      .field("time", c.time_horizon)
                      .field("mean", m1)
                      .field("var", var)
                      .field("median", med)
                      .close();
  return out;
}

TaskOut run_task(const ExperimentConfig& c, std::size_t task_idx) {
  std::size_t reps = static_cast<std::size_t>(c.replications);
  long value = c.ladder[task_idx / reps];
  int rep = static_cast<int>(task_idx % reps);
  std::uint64_t task_seed = Rng::derive_seed(c.seed, task_idx);
  Rng rng(task_seed);
  TaskOut out;
  try {
    if (c.scenario == "sinai") out = run_sinai(c, value, rep, rng, task_seed);
    else if (c.scenario == "barriers") out = run_barriers(c, value, rep, rng, task_seed);
    else if (c.scenario == "brw_bias") out = run_brw_bias(c, value, rep, rng, task_seed);
    else if (c.scenario == "errw") out = run_errw(c, value, rep, rng, task_seed);
    else if (c.scenario == "crt_check") out = run_crt_check(c, value, rep, rng, task_seed);
    else if (c.scenario == "brox") out = run_brox(c, value, rep, rng, task_seed);
    else throw std::invalid_argument("unknown scenario: " + c.scenario);
  } catch (const std::exception& err) {
    throw std::runtime_error(c.scenario + " value=" + std::to_string(value) +
                             " rep=" + std::to_string(rep) + ": " + err.what());
  }
  out.file_name = c.scenario + "_" + std::to_string(value) + "_r" +
                  std::to_string(rep) + ".csv";
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "scenario") c.scenario = val;
    else if (key == "ladder") c.ladder = parse_ladder(val);
    else if (key == "replications") c.replications = static_cast<int>(parse_ll(key, val));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_ll(key, val));
    else if (key == "out_dir") c.out_dir = val;
    else if (key == "workers") c.workers = static_cast<int>(parse_ll(key, val));
    else if (key == "beta") c.beta = parse_double(key, val);
    else if (key == "gamma") c.gamma = parse_double(key, val);
    else if (key == "p") c.p = parse_double(key, val);
    else if (key == "q") c.q = parse_double(key, val);
    else if (key == "lambda") c.lambda = parse_double(key, val);
    else if (key == "sigma") c.sigma = parse_double(key, val);
    else if (key == "alpha0_rule") c.alpha0_rule = val;
    else if (key == "offspring") c.offspring = val;
    else if (key == "d") c.d = static_cast<int>(parse_ll(key, val));
    else if (key == "step_law") c.step_law = val;
    else if (key == "step_sigma") c.step_sigma = parse_double(key, val);
    else if (key == "horizon") c.horizon = parse_ll(key, val);
    else if (key == "time") c.time_horizon = parse_double(key, val);
    else if (key == "mesh") c.mesh = parse_double(key, val);
    else if (key == "half_width") c.half_width = parse_double(key, val);
    else if (key == "walkers") c.walkers = static_cast<int>(parse_ll(key, val));
    else
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
  }
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_text(const ExperimentConfig& c) {
  std::string out;
  out += "scenario = " + c.scenario + "\n";
  out += "ladder = ";
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(c.ladder[i]);
  }
  out += "\n";
  out += "replications = " + std::to_string(c.replications) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "out_dir = " + c.out_dir + "\n";
  out += "workers = " + std::to_string(c.workers) + "\n";
  out += "beta = " + fmt_double(c.beta) + "\n";
  out += "gamma = " + fmt_double(c.gamma) + "\n";
  out += "p = " + fmt_double(c.p) + "\n";
  out += "q = " + fmt_double(c.q) + "\n";
  out += "lambda = " + fmt_double(c.lambda) + "\n";
  out += "sigma = " + fmt_double(c.sigma) + "\n";
  out += "alpha0_rule = " + c.alpha0_rule + "\n";
  out += "offspring = " + c.offspring + "\n";
  out += "d = " + std::to_string(c.d) + "\n";
  out += "step_law = " + c.step_law + "\n";
  out += "step_sigma = " + fmt_double(c.step_sigma) + "\n";
  out += "horizon = " + std::to_string(c.horizon) + "\n";
  out += "time = " + fmt_double(c.time_horizon) + "\n";
  out += "mesh = " + fmt_double(c.mesh) + "\n";
  out += "half_width = " + fmt_double(c.half_width) + "\n";
  out += "walkers = " + std::to_string(c.walkers) + "\n";
  return out;
}

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
  return config_to_text(a) == config_to_text(b);
}

double alpha0_for(const ExperimentConfig& c, long n) {
  if (c.alpha0_rule == "sqrt-half")
    return 0.5 * std::sqrt(static_cast<double>(n));
  double v = 0.0;
  if (split_rule(c.alpha0_rule, "const", &v)) return v;
  throw std::invalid_argument("unknown alpha0 rule: " + c.alpha0_rule);
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> bad;
  static const char* kScenarios[] = {"sinai",  "barriers", "brw_bias",
                                     "errw",   "crt_check", "brox"};
  bool known = false;
  for (const char* s : kScenarios) known = known || c.scenario == s;
  if (!known) bad.push_back("unknown scenario '" + c.scenario + "'");

  if (c.ladder.empty()) bad.push_back("ladder is empty");
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    if (c.ladder[i] <= 0) {
      bad.push_back("ladder entries must be positive");
      break;
    }
    if (i > 0 && c.ladder[i] <= c.ladder[i - 1]) {
      bad.push_back("ladder must be strictly increasing");
      break;
    }
  }
  if (c.replications < 1) bad.push_back("replications must be at least 1");
  if (c.workers < 1) bad.push_back("workers must be at least 1");
  if (c.walkers < 1) bad.push_back("walkers must be at least 1");
  if (c.d < 1) bad.push_back("d must be at least 1");
  if (c.horizon < 0) bad.push_back("horizon must be nonnegative");
  if (!(c.sigma > 0.0)) bad.push_back("sigma must be positive");
  if (!(c.step_sigma > 0.0)) bad.push_back("step_sigma must be positive");
  if (!(c.mesh > 0.0)) bad.push_back("mesh must be positive");
  if (!(c.half_width >= 2.0 * c.mesh))
    bad.push_back("half_width must cover at least two mesh cells");
  if (!(c.time_horizon > 0.0)) bad.push_back("time must be positive");
  if (!(c.p > 0.0 && c.p < 1.0)) bad.push_back("p must lie in (0, 1)");
  if (!(c.q > 0.0 && c.q < 1.0)) bad.push_back("q must lie in (0, 1)");
  if (!(c.lambda > 0.0 && c.lambda <= 1.0))
    bad.push_back("lambda must lie in (0, 1]");
  if (c.scenario == "brw_bias" && c.beta < 1.0)
    bad.push_back("beta = " + fmt_double(c.beta) +
                  " gives an inward bias; the biased walk needs beta >= 1");
  if (c.step_law != "gaussian")
    bad.push_back("unknown step law '" + c.step_law + "'");

  try {
    treecore::OffspringDistribution law = offspring_for(c.offspring);
    double mean = law.mean();
    if (std::abs(mean - 1.0) > 1e-9)
      bad.push_back("offspring law is not critical (mean " + fmt_double(mean) +
                    "); conditioned trees need mean 1");
  } catch (const std::exception& err) {
    bad.push_back(err.what());
  }
  try {
    (void)alpha0_for(c, c.ladder.empty() ? 1 : c.ladder.front());
  } catch (const std::exception& err) {
    bad.push_back(err.what());
  }
  return bad;
}

RunManifest run(const ExperimentConfig& c) {
  std::vector<std::string> bad = validate(c);
  if (!bad.empty()) {
    std::string msg = "invalid config:";
    for (const std::string& b : bad) msg += "\n  " + b;
    throw std::invalid_argument(msg);
  }
  auto t0 = std::chrono::steady_clock::now();

  std::filesystem::create_directories(c.out_dir);
  std::size_t n_tasks = c.ladder.size() * static_cast<std::size_t>(c.replications);
  std::vector<TaskOut> results(n_tasks);
  std::vector<std::string> errors(n_tasks);

  // Workers race only on the task counter; every result lands in its own
  // slot and all files are written after the join, so output order and
  // content never depend on scheduling.
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        results[i] = run_task(c, i);
      } catch (const std::exception& err) {
        errors[i] = err.what();
      }
    }
  };
  int n_threads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(c.workers), n_tasks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n_tasks; ++i)
    if (!errors[i].empty()) throw std::runtime_error(errors[i]);

  RunManifest m;
  m.version = kVersion;
  m.config_echo = config_to_text(c);
  m.rep_seeds.reserve(n_tasks);
  for (std::size_t i = 0; i < n_tasks; ++i)
    m.rep_seeds.push_back(Rng::derive_seed(c.seed, i));

  std::filesystem::path dir(c.out_dir);
  std::ofstream stats_os(dir / "stats.jsonl", std::ios::binary);
  if (!stats_os) throw std::runtime_error("cannot write to " + c.out_dir);
  for (std::size_t i = 0; i < n_tasks; ++i) {
    const TaskOut& r = results[i];
    std::ofstream os(dir / r.file_name, std::ios::binary);
    os << r.file_body;
    if (!os) throw std::runtime_error("cannot write " + r.file_name);
    stats_os << r.stat_line << "\n";
    m.files.push_back(r.file_name);
  }
  stats_os.close();
  m.files.push_back("stats.jsonl");

  auto t1 = std::chrono::steady_clock::now();
  m.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  std::ofstream man_os(dir / "manifest.txt", std::ios::binary);
  write_manifest(man_os, m);
  m.files.push_back("manifest.txt");
  return m;
}

void write_manifest(std::ostream& os, const RunManifest& m) {
  os << "version " << m.version << "\n";
  os << "wall_seconds " << fmt_double(m.wall_seconds) << "\n";
  os << "begin-config\n" << m.config_echo << "end-config\n";
  for (std::size_t i = 0; i < m.rep_seeds.size(); ++i)
    os << "task_seed " << i << " " << m.rep_seeds[i] << "\n";
  for (const std::string& f : m.files) os << "file " << f << "\n";
}

}  // namespace rwre::runner
