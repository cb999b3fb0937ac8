#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "opm/reduced.hpp"

namespace opm {

// Runs fn(i) for i in [0, n) on `workers` threads. The first exception
// thrown by any task is rethrown after all threads join.
void parallel_for(long n, int workers, const std::function<void(long)>& fn);

std::uint64_t path_seed(std::uint64_t base_seed, long index);

struct PathFailure {
  long index = 0;
  std::uint64_t seed = 0;
  std::string what;
};

struct EnsembleResult {
  std::string model;            // "sace-full", "sace-reduced", "jump-full", "jump-reduced"
  std::vector<std::uint64_t> seeds;
  MatrixXd terminal;            // row i: terminal coefficients of path i (NaN on failure)
  VectorXd metric;              // sACE: min+max of the terminal profile
  std::vector<std::vector<double>> samples;  // jump: y_1 samples (u-space) per path
  MatrixXd acf;                 // row i: per-path ACFs, mode-major, (max_lag + 1) per mode
  int acf_modes = 0;
  int acf_lags = 0;
  std::vector<PathFailure> failures;
  double elapsed_s = 0.0;

  long size() const { return static_cast<long>(seeds.size()); }
  bool ok(long i) const;
};

struct EnsembleOptions {
  long n_paths = 10000;
  std::uint64_t base_seed = 20240601;
  double T = 40.0;
  int workers = 1;
  // ACF of the mode amplitudes over [acf_start, T], sampled every acf_stride
  // steps; max_lag = 0 disables it.
  int acf_max_lag = 0;
  int acf_stride = 10;
  double acf_start = 10.0;
};

// sACE from u_0 = 0. The reduced run starts from y = 0 and reports
// (y, Phi) in `terminal`.
EnsembleResult run_sace_full(const SaceModel& model, const EnsembleOptions& o, double tau_max);
EnsembleResult run_sace_reduced(const SaceClosure& c, const SaceModel& model, const EnsembleOptions& o,
                                bool zeroed_memory = false);

struct JumpSampling {
  int stride = 100;
  double t_start = 10.0;
};

// Jump study: full model from u_0 = 0.5 e_1; reduced from t_0 = max tau*
// with y(t_0) taken from the full model. Samples are <u, e_1>.
EnsembleResult run_jump_full(const JumpModel& model, const EnsembleOptions& o, const JumpSampling& s);
EnsembleResult run_jump_reduced(const JumpClosure& c, const JumpModel& model, const EnsembleOptions& o,
                                const JumpSampling& s);

double minmax_metric(const EigenBasis& basis, const VectorXd& coeffs);
double minmax_metric(const VectorXd& grid_values);

// Neumaier-compensated sum.
double compensated_sum(const double* x, long n, long stride = 1);

struct Histogram {
  VectorXd edges;
  VectorXd counts;
  bool density = true;
  VectorXd values() const;   // density or counts
  VectorXd centers() const;
  double total() const { return counts.sum(); }
};

Histogram histogram(const std::vector<double>& samples, const VectorXd& edges, bool density = true);
VectorXd uniform_edges(double lo, double hi, int bins);
// Common Freedman-Diaconis binning of the pooled samples.
VectorXd freedman_diaconis_edges(const std::vector<double>& a, const std::vector<double>& b);

struct PdfComparison {
  Histogram a, b;
  double l1 = 0.0;  // int |p_a - p_b| dx, in [0, 2]
};
// bins = 0 selects Freedman-Diaconis.
PdfComparison pdf_and_distance(const std::vector<double>& a, const std::vector<double>& b, int bins = 0);
PdfComparison pdf_and_distance(const std::vector<double>& a, const std::vector<double>& b, const VectorXd& edges);

struct Interval {
  double lo = 0.0, hi = 0.0;
};
Interval wilson_interval(long successes, long n, double z = 2.5758293035489);

struct ProfileStats {
  VectorXd mean;
  VectorXd std;
  long count = 0;
};
// Pointwise mean and standard deviation over the rows of `fields` selected
// by `mask` (rows are grid profiles).
ProfileStats profile_stats(const MatrixXd& fields, const std::vector<char>& mask);

enum class MetricClass { Typical, Rare };
MetricClass classify(double metric, double threshold = 0.5);

struct ClassProfiles {
  ProfileStats typical, rare;
  long n_typical = 0, n_rare = 0, n_failed = 0;
};
// Class-conditioned profiles of terminal fields. Rare profiles are folded by
// the sign of the metric; typical ones by the sign of <u, e_2>, so that
// the u -> -u symmetric pairs do not cancel in the mean.
ClassProfiles class_profiles(const EigenBasis& basis, const MatrixXd& terminal, const VectorXd& metric,
                             double threshold = 0.5);

// Unbiased-normalized autocorrelation, lags 0..max_lag.
VectorXd acf(const VectorXd& series, int max_lag);
struct AcfSet {
  MatrixXd mean;  // modes x (max_lag + 1)
  MatrixXd std;
};
AcfSet acf_summary(const EnsembleResult& r);

// Min+max histogram shape test: a central peak in |m| <= 0.25 and side peaks
// in m >= 0.75 and m <= -0.75, each exceeding every count in the gaps
// 0.25 < |m| < 0.75.
struct Trimodality {
  bool central = false, left = false, right = false;
  double central_peak = 0.0, left_peak = 0.0, right_peak = 0.0, gap_max = 0.0;
  bool trimodal() const { return central && left && right; }
};
Trimodality trimodality(const std::vector<double>& metric, double bin_width = 0.05, double range = 1.6);

struct Bimodality {
  bool bimodal = false;
  double peak_lo = 0.0, peak_hi = 0.0;  // abscissas, parabolic refinement
  double dip = 0.0;                     // min density between the peaks / smaller peak
};
// Local maxima of the 3-bin smoothed density above 10% of the top. Among
// pairs whose dip falls below half the smaller peak, the pair with the
// tallest smaller peak is reported.
Bimodality bimodality(const Histogram& h);

// Fraction of samples outside [p_lo - f s, p_hi + f s], s = p_hi - p_lo.
double outer_mass(const std::vector<double>& samples, double p_lo, double p_hi, double frac = 0.25);

std::vector<double> pooled(const EnsembleResult& r);
std::vector<double> ok_metrics(const EnsembleResult& r);

}  // namespace opm
