#pragma once
// Continuum objects: excursion-coded real trees, stick-breaking random
// trees, tree-indexed Gaussian fields, distorted (tilted) metrics and
// measures, one-dimensional random potentials, and the mesh birth-death
// chain realizing the diffusion with scale d(e^W) and speed 2 e^{-W} dx.

#include <iosfwd>
#include <string>
#include <vector>

#include "rwre/rng.hpp"
#include "rwre/treecore.hpp"

namespace rwre::continuum {

// Nonnegative path on the uniform grid i/N with zero endpoints.
struct Excursion {
  int N = 0;
  std::vector<double> g;  // size N+1
  void validate() const;
};

// Vervaat rotation of a Gaussian grid bridge about its minimum. At any fixed
// N this has exactly the law of the bridge conditioned to stay nonnegative
// on the grid (the increments are cyclically exchangeable and the
// nonnegative rotation is a.s. unique).
Excursion sample_excursion(int N, Rng& rng);

// Rejection oracle: resample the bridge until it is nonnegative on the
// grid. Acceptance decays like 1/N, so keep N small; `tries`, when given,
// receives the number of bridges drawn.
Excursion sample_excursion_bridge_conditioned(int N, Rng& rng,
                                              long long* tries = nullptr);

// The real tree coded by the excursion, evaluated on grid indices. Distance
// d(s,u) = g(s) + g(u) - 2 min g over [s,u]; root is the class of index 0.
// Off-grid times are snapped to the nearest grid index.
class CodedTree {
 public:
  explicit CodedTree(Excursion e);
  const Excursion& excursion() const { return e_; }
  int grid_size() const { return e_.N; }
  double root_distance(int i) const { return e_.g[static_cast<std::size_t>(i)]; }
  int argmin_idx(int i, int j) const;  // index of the running minimum
  double min_between(int i, int j) const;
  double distance_idx(int i, int j) const;
  double distance_time(double s, double u) const;  // nearest-grid policy
  int time_to_idx(double t) const;

 private:
  Excursion e_;
  std::vector<std::vector<int>> table_;  // sparse range-argmin
  std::vector<int> log2_;
};

// Fraction of grid times within distance `radius` of the point p(center);
// grid times carry mass 1/N each (time N identified with time 0).
double ball_mass(const CodedTree& t, int center, double radius);

// Representative (smallest) index of each distance-zero class among `times`;
// `cls[k]` receives the position of times[k]'s representative in the result.
std::vector<int> class_representatives(const CodedTree& t,
                                       const std::vector<int>& times,
                                       std::vector<int>* cls = nullptr);

// Segment k spans root distances [base, base + length] along its own branch;
// segment 0 attaches at the root.
struct StickSegment {
  double base = 0.0;
  double length = 0.0;
  int parent_seg = -1;
  double parent_offset = 0.0;  // along the parent segment, from its base
};

struct StickBreakTree {
  std::vector<double> cuts;       // C_1 < C_2 < ... < C_K
  std::vector<StickSegment> seg;  // one per cut
  double total_length() const { return cuts.back(); }
  double point_root_distance(int k, double offset) const;
};

// Cut times are the points of the rate-t Poisson process, sampled by
// inversion: C_1 = sqrt(2 Exp(1)), C_{i+1} = sqrt(C_i^2 + 2 Exp(1)). Each
// new segment attaches at a uniform point of the existing total length.
StickBreakTree stick_breaking(Rng& rng, int K);

// Root distance of a point chosen uniformly over the total length.
double stick_uniform_root_distance(const StickBreakTree& t, Rng& rng);

// Matched construction on the coded side: K leaves drawn uniformly from the
// grid span a subtree; a point is then chosen uniformly over that subtree's
// length and its root distance returned, all in the metric scaled by
// `scale` (the stick-breaking tree corresponds to scale = 2).
double coded_subtree_uniform_root_distance(const CodedTree& t, int K,
                                           double scale, Rng& rng);

struct GaussianField {
  int d = 1;
  std::vector<int> times;    // grid indices sampled
  std::vector<double> phi;   // |times| x d, row per time
  std::vector<double> coeff; // d x d coefficient matrix applied to the rows
  const double* at(std::size_t k) const { return phi.data() + k * d; }
};

// Centered Gaussian vector with Cov(phi(s), phi(u)) = min g over [s,u] times
// the identity, constant on distance-zero classes by construction. Dense
// Cholesky on the class representatives; diagonal jitter up to 1e-12 of the
// largest variance, beyond which a numerical error is thrown. `coeff`, when
// given, maps the iid coordinates of each row through a fixed d x d matrix.
GaussianField sample_gaussian_field(const CodedTree& t,
                                    const std::vector<int>& times, int d,
                                    Rng& rng,
                                    const std::vector<double>* coeff = nullptr);

// Root-path integrals D(t) = integral of e^{weight_sign * sigma_c * psi}
// against length along [[root, p(t)]], by a trapezoid sweep that pushes
// ascending segments on a stack and pops them exactly on descent.
std::vector<double> tilted_root_distance(const CodedTree& t,
                                         const std::vector<double>& psi,
                                         double sigma_c, double weight_sign);

// Distorted metric: integral of e^{sigma_c psi} along the tree path [[s,u]],
// decomposed through the branch point so path additivity is exact.
double distorted_metric(const CodedTree& t, const std::vector<double>& D_plus,
                        int i, int j);
double distorted_metric(const CodedTree& t, const std::vector<double>& psi,
                        double sigma_c, int i, int j);

// Distorted root-distance excursion with weight e^{-sigma_c psi} (the mass
// tilting). Rounding residues at the endpoints are clamped to exact zeros.
Excursion tilted_excursion(const CodedTree& t, const std::vector<double>& psi,
                           double sigma_c);

// Discrete counterpart on a plane tree: C~(i) = sum of e^{-gamma V(u)} over
// the vertices of the root path to the i-th contour vertex, root excluded,
// u_i included. With V = 0 this replays the contour height sequence.
std::vector<double> tilted_contour(const treecore::OrderedTree& tree,
                                   const treecore::ContourSequence& seq,
                                   const std::vector<double>& v, double gamma);

enum class PotentialKind { two_sided_bm, poisson_log, gaussian_drift };

struct PotentialParams {
  double sigma = 1.0;           // two-sided-bm volatility
  double p = 0.5, q = 0.5;      // poisson-log jump size log(q/p)
  double lambda = 1.0;          // poisson-log intensity
};

struct ContinuumPotential {
  PotentialKind kind = PotentialKind::two_sided_bm;
  PotentialParams params;
  double x0 = 0.0;    // left end of the grid
  double mesh = 0.0;  // grid step
  std::vector<double> w;
  double right_end() const { return x0 + mesh * static_cast<double>(w.size() - 1); }
  bool in_window(double x) const { return x >= x0 && x <= right_end(); }
  double value(double x) const;  // linear interpolation, exact on the grid
};

// kind is one of "two-sided-bm" (W(0) = 0, volatility sigma both ways) or
// "poisson-log" (piecewise constant, jumps of log(q/p) at rate-lambda Poisson
// points). Unknown kinds are errors; "gaussian-drift" must be built with
// make_drift_potential since it lives on a coded tree.
ContinuumPotential make_potential(const std::string& kind,
                                  const PotentialParams& params,
                                  double half_width, double mesh, Rng& rng);

// U = sqrt(2) phi + root distance, on the full excursion grid; the field
// must be scalar and sampled at every grid index.
ContinuumPotential make_drift_potential(const CodedTree& t,
                                        const GaussianField& field);

struct MeshPath {
  std::vector<double> t;
  std::vector<double> x;
};

// Birth-death chain on the mesh: site x jumps to x +- h at rate
// 1/(nu_h(x) r_h(x, x +- h)), where r_h is the trapezoid of e^W over the
// edge and nu_h the trapezoid cell mass of the speed density 2 e^{-W}.
// Throws if the walk reaches the edge of the sampled window.
double brox_endpoint(const ContinuumPotential& W, double horizon, double h,
                     Rng& rng);
MeshPath brox_simulate(const ContinuumPotential& W, double horizon, double h,
                       Rng& rng);

void write_excursion_csv(std::ostream& os, const Excursion& e);
void write_field_csv(std::ostream& os, const GaussianField& f);
void write_potential_csv(std::ostream& os, const ContinuumPotential& w);
void write_sticks_csv(std::ostream& os, const StickBreakTree& t);

}  // namespace rwre::continuum
