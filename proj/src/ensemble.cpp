#include "opm/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "opm/defect.hpp"
#include "opm/error.hpp"
#include "opm/rng.hpp"

namespace opm {

void parallel_for(long n, int workers, const std::function<void(long)>& fn) {
  if (workers < 1) throw std::invalid_argument("parallel_for: workers must be positive");
  if (workers == 1 || n < 2) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr err;
  std::mutex m;
  auto body = [&] {
    for (long i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(m);
        if (!err) err = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = static_cast<int>(std::min<long>(workers, n));
  for (int t = 0; t < k; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::uint64_t path_seed(std::uint64_t base_seed, long index) {
  return CounterRng::derive(base_seed, static_cast<std::uint64_t>(index));
}

bool EnsembleResult::ok(long i) const {
  return terminal.rows() > i && terminal.row(i).allFinite();
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

EnsembleResult prepare(const std::string& tag, const EnsembleOptions& o, int width) {
  if (o.n_paths < 1) throw std::invalid_argument("ensemble: n_paths must be positive");
  EnsembleResult r;
  r.model = tag;
  r.seeds.resize(o.n_paths);
  for (long i = 0; i < o.n_paths; ++i) r.seeds[i] = path_seed(o.base_seed, i);
  r.terminal = MatrixXd::Constant(o.n_paths, width, kNaN);
  r.metric = VectorXd::Constant(o.n_paths, kNaN);
  return r;
}

// Runs body(i) for every path; NumericalError marks the path failed.
void run_paths(EnsembleResult& r, int workers, const std::function<void(long)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mutex m;
  parallel_for(r.size(), workers, [&](long i) {
    try {
      body(i);
    } catch (const NumericalError& e) {
      std::lock_guard<std::mutex> lk(m);
      r.failures.push_back({i, r.seeds[i], e.what()});
    }
  });
  std::sort(r.failures.begin(), r.failures.end(), [](auto& a, auto& b) { return a.index < b.index; });
  r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void setup_acf(EnsembleResult& r, const EnsembleOptions& o, int modes) {
  if (o.acf_max_lag <= 0) return;
  r.acf_modes = modes;
  r.acf_lags = o.acf_max_lag + 1;
  r.acf = MatrixXd::Constant(r.size(), modes * r.acf_lags, kNaN);
}

void store_acf(EnsembleResult& r, long i, const Trajectory& tr, int modes, double t_start) {
  if (r.acf_lags == 0) return;
  long s0 = 0;
  while (s0 < tr.size() && tr.times[s0] < t_start - 1e-9) ++s0;
  const long len = tr.size() - s0;
  for (int m = 0; m < modes; ++m) {
    const VectorXd series = tr.coeffs.col(m).segment(s0, len);
    r.acf.row(i).segment(m * r.acf_lags, r.acf_lags) = acf(series, r.acf_lags - 1).transpose();
  }
}

int acf_stride_checked(const EnsembleOptions& o, double dt) {
  if (o.acf_max_lag <= 0) return std::max(1L, std::lround(o.T / dt));
  if (o.acf_stride < 1) throw std::invalid_argument("ensemble: acf_stride must be positive");
  const long n = std::lround(o.T / dt);
  if (n % o.acf_stride != 0) throw std::invalid_argument("ensemble: T must be a multiple of acf_stride dt");
  return o.acf_stride;
}

}  // namespace

EnsembleResult run_sace_full(const SaceModel& model, const EnsembleOptions& o, double tau_max) {
  const int M = model.basis().size();
  EnsembleResult r = prepare("sace-full", o, M);
  const int modes = std::min(M, model.params().n_forced);
  setup_acf(r, o, modes);
  const int stride = acf_stride_checked(o, model.params().dt);
  run_paths(r, o.workers, [&](long i) {
    const BrownianPaths paths = sace_paths(model, r.seeds[i], o.T, tau_max);
    const Trajectory tr = integrate_sace(model, VectorXd::Zero(M), paths, o.T, stride);
    store_acf(r, i, tr, modes, o.acf_start);
    r.terminal.row(i) = tr.coeffs.row(tr.size() - 1);
    r.metric[i] = minmax_metric(model.basis(), r.terminal.row(i).transpose());
  });
  return r;
}

EnsembleResult run_sace_reduced(const SaceClosure& c, const SaceModel& model, const EnsembleOptions& o,
                                bool zeroed_memory) {
  const int W = c.q() + c.aux_equations();
  EnsembleResult r = prepare(zeroed_memory ? "sace-reduced-zeroed" : "sace-reduced", o, W);
  double tau_max = 0.0;
  for (const auto& m : c.spec().modes()) tau_max = std::max(tau_max, m.tau);
  setup_acf(r, o, W);
  const int stride = acf_stride_checked(o, model.params().dt);
  const EigenBasis& b = c.basis();
  run_paths(r, o.workers, [&](long i) {
    const BrownianPaths paths = sace_paths(model, r.seeds[i], o.T, tau_max);
    const Trajectory tr = run_reduced_sace(c, paths, VectorXd::Zero(c.q()), o.T, stride, zeroed_memory);
    store_acf(r, i, tr, W, o.acf_start);
    // columns: y_1..y_q then Phi in slot order, which is basis order q..N-1
    VectorXd u = VectorXd::Zero(b.size());
    const VectorXd last = tr.coeffs.row(tr.size() - 1).transpose();
    u.head(c.q()) = last.head(c.q());
    for (int p = 0; p < c.aux_equations(); ++p) u[c.spec().mode(p).mode] = last[c.q() + p];
    r.terminal.row(i) = u.head(W).transpose();
    r.metric[i] = minmax_metric(b, u);
  });
  return r;
}

namespace {

void collect_samples(std::vector<double>& out, const Trajectory& tr, double t_start, double shift) {
  out.clear();
  for (long s = 0; s < tr.size(); ++s)
    if (tr.times[s] >= t_start - 1e-9) out.push_back(tr.coeffs(s, 0) + shift);
}

double ustar_e1(const JumpModel& model) {
  const EigenBasis& b = model.basis();
  return b.inner(model.ustar_grid(), b.mode(0).transpose());
}

}  // namespace

EnsembleResult run_jump_full(const JumpModel& model, const EnsembleOptions& o, const JumpSampling& s) {
  const int M = model.basis().size();
  EnsembleResult r = prepare("jump-full", o, M);
  r.samples.resize(o.n_paths);
  const double shift = ustar_e1(model);
  const VectorXd v0 = jump_initial_state(model);
  run_paths(r, o.workers, [&](long i) {
    const JumpSignal sig = jump_signal(model, r.seeds[i], o.T);
    const Trajectory tr = integrate_jump(model, v0, sig, o.T, s.stride);
    collect_samples(r.samples[i], tr, s.t_start, shift);
    r.terminal.row(i) = tr.coeffs.row(tr.size() - 1);
  });
  return r;
}

EnsembleResult run_jump_reduced(const JumpClosure& c, const JumpModel& model, const EnsembleOptions& o,
                                const JumpSampling& s) {
  EnsembleResult r = prepare(c.ou() ? "jump-reduced-ou" : "jump-reduced-full", o, 3);
  r.samples.resize(o.n_paths);
  const double shift = ustar_e1(model);
  const double t0 = jump_start_time(c.spec());
  const VectorXd v0 = jump_initial_state(model);
  run_paths(r, o.workers, [&](long i) {
    const JumpSignal sig = jump_signal(model, r.seeds[i], o.T);
    double y0 = v0[0];
    if (t0 > 0.0) {
      const Trajectory head = integrate_jump(model, v0, sig, t0, 1);
      y0 = head.coeffs(head.size() - 1, 0);
    }
    const Trajectory tr = run_reduced_jump(c, sig, y0, t0, o.T, s.stride);
    collect_samples(r.samples[i], tr, s.t_start, shift);
    r.terminal.row(i) = tr.coeffs.row(tr.size() - 1);
  });
  return r;
}

double minmax_metric(const VectorXd& g) {
  if (g.size() == 0) throw std::invalid_argument("minmax_metric: empty profile");
  return g.minCoeff() + g.maxCoeff();
}

double minmax_metric(const EigenBasis& basis, const VectorXd& coeffs) {
  VectorXd u = VectorXd::Zero(basis.size());
  const Eigen::Index n = std::min<Eigen::Index>(coeffs.size(), basis.size());
  u.head(n) = coeffs.head(n);
  return minmax_metric(basis.reconstruct(u));
}

double compensated_sum(const double* x, long n, long stride) {
  double s = 0.0, c = 0.0;
  for (long i = 0; i < n; ++i) {
    const double v = x[i * stride];
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  return s + c;
}

VectorXd Histogram::values() const {
  if (!density) return counts;
  const double n = counts.sum();
  VectorXd v(counts.size());
  for (Eigen::Index i = 0; i < counts.size(); ++i)
    v[i] = n > 0 ? counts[i] / (n * (edges[i + 1] - edges[i])) : 0.0;
  return v;
}

VectorXd Histogram::centers() const {
  return 0.5 * (edges.head(edges.size() - 1) + edges.tail(edges.size() - 1));
}

Histogram histogram(const std::vector<double>& samples, const VectorXd& edges, bool density) {
  if (edges.size() < 2) throw std::invalid_argument("histogram: need at least one bin");
  for (Eigen::Index i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw std::invalid_argument("histogram: edges must increase");
  Histogram h;
  h.edges = edges;
  h.density = density;
  h.counts = VectorXd::Zero(edges.size() - 1);
  const double* e = edges.data();
  const double* end = e + edges.size();
  for (double v : samples) {
    if (!std::isfinite(v) || v < e[0] || v > end[-1]) continue;
    long k = std::upper_bound(e, end, v) - e - 1;
    if (k == edges.size() - 1) --k;  // right edge belongs to the last bin
    h.counts[k] += 1.0;
  }
  return h;
}

VectorXd uniform_edges(double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw std::invalid_argument("uniform_edges: bad range");
  VectorXd e(bins + 1);
  for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
  return e;
}

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - i) * (v[i + 1] - v[i]);
}

std::vector<double> finite(const std::vector<double>& a) {
  std::vector<double> out;
  out.reserve(a.size());
  for (double v : a)
    if (std::isfinite(v)) out.push_back(v);
  return out;
}

}  // namespace

VectorXd freedman_diaconis_edges(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all = finite(a);
  const auto fb = finite(b);
  all.insert(all.end(), fb.begin(), fb.end());
  if (all.size() < 2) throw std::invalid_argument("freedman_diaconis: need at least two samples");
  const auto [mn, mx] = std::minmax_element(all.begin(), all.end());
  const double lo = *mn, hi = *mx;
  if (!(hi > lo)) throw std::invalid_argument("freedman_diaconis: degenerate samples");
  const double iqr = quantile(all, 0.75) - quantile(all, 0.25);
  double w = 2.0 * iqr / std::cbrt(static_cast<double>(all.size()));
  int bins = w > 0 ? static_cast<int>(std::ceil((hi - lo) / w)) : 1;
  bins = std::clamp(bins, 1, 10000);
  return uniform_edges(lo, hi, bins);
}

PdfComparison pdf_and_distance(const std::vector<double>& a, const std::vector<double>& b, const VectorXd& edges) {
  PdfComparison r;
  r.a = histogram(a, edges, true);
  r.b = histogram(b, edges, true);
  if (r.a.total() == 0 || r.b.total() == 0) throw std::invalid_argument("pdf_and_distance: empty sample set");
  const VectorXd pa = r.a.values(), pb = r.b.values();
  const VectorXd w = edges.tail(edges.size() - 1) - edges.head(edges.size() - 1);
  r.l1 = ((pa - pb).cwiseAbs().cwiseProduct(w)).sum();
  return r;
}

PdfComparison pdf_and_distance(const std::vector<double>& a, const std::vector<double>& b, int bins) {
  if (bins < 0) throw std::invalid_argument("pdf_and_distance: bins must be >= 0");
  if (bins == 0) return pdf_and_distance(a, b, freedman_diaconis_edges(a, b));
  const auto fa = finite(a), fb = finite(b);
  if (fa.empty() || fb.empty()) throw std::invalid_argument("pdf_and_distance: empty sample set");
  double lo = std::min(*std::min_element(fa.begin(), fa.end()), *std::min_element(fb.begin(), fb.end()));
  double hi = std::max(*std::max_element(fa.begin(), fa.end()), *std::max_element(fb.begin(), fb.end()));
  if (!(hi > lo)) throw std::invalid_argument("pdf_and_distance: degenerate samples");
  return pdf_and_distance(a, b, uniform_edges(lo, hi, bins));
}

Interval wilson_interval(long k, long n, double z) {
  if (n <= 0 || k < 0 || k > n) throw std::invalid_argument("wilson_interval: need 0 <= k <= n, n > 0");
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double den = 1.0 + z2 / n;
  const double c = (p + z2 / (2.0 * n)) / den;
  const double h = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
  return {std::max(0.0, c - h), std::min(1.0, c + h)};
}

ProfileStats profile_stats(const MatrixXd& fields, const std::vector<char>& mask) {
  if (static_cast<Eigen::Index>(mask.size()) != fields.rows())
    throw std::invalid_argument("profile_stats: mask size differs from the number of fields");
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < fields.rows(); ++i)
    if (mask[i]) rows.push_back(i);
  if (rows.empty()) throw std::invalid_argument("profile_stats: empty class");
  ProfileStats s;
  s.count = static_cast<long>(rows.size());
  const Eigen::Index G = fields.cols();
  s.mean.resize(G);
  s.std.resize(G);
  std::vector<double> col(rows.size());
  for (Eigen::Index x = 0; x < G; ++x) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = fields(rows[r], x);
    const double m = compensated_sum(col.data(), s.count) / s.count;
    for (auto& v : col) v = (v - m) * (v - m);
    s.mean[x] = m;
    s.std[x] = std::sqrt(compensated_sum(col.data(), s.count) / s.count);
  }
  return s;
}

MetricClass classify(double metric, double threshold) {
  return std::abs(metric) > threshold ? MetricClass::Rare : MetricClass::Typical;
}

ClassProfiles class_profiles(const EigenBasis& basis, const MatrixXd& terminal, const VectorXd& metric,
                             double threshold) {
  const Eigen::Index n = terminal.rows();
  MatrixXd fields(n, basis.grid().nodes());
  std::vector<char> typ(n, 0), rare(n, 0);
  ClassProfiles out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!terminal.row(i).allFinite() || !std::isfinite(metric[i])) {
      fields.row(i).setZero();
      ++out.n_failed;
      continue;
    }
    VectorXd u = VectorXd::Zero(basis.size());
    const Eigen::Index k = std::min<Eigen::Index>(terminal.cols(), basis.size());
    u.head(k) = terminal.row(i).head(k).transpose();
    double sign = 1.0;
    if (classify(metric[i], threshold) == MetricClass::Rare) {
      rare[i] = 1;
      sign = metric[i] < 0 ? -1.0 : 1.0;
    } else {
      typ[i] = 1;
      sign = (basis.size() > 1 && u[1] < 0) ? -1.0 : 1.0;
    }
    fields.row(i) = sign * basis.reconstruct(u).transpose();
  }
  for (char c : typ) out.n_typical += c;
  for (char c : rare) out.n_rare += c;
  if (out.n_typical) out.typical = profile_stats(fields, typ);
  if (out.n_rare) out.rare = profile_stats(fields, rare);
  return out;
}

VectorXd acf(const VectorXd& x, int max_lag) {
  const Eigen::Index n = x.size();
  if (max_lag < 0 || n <= max_lag) throw std::invalid_argument("acf: series shorter than max_lag");
  const double m = x.mean();
  const VectorXd d = x.array() - m;
  const double c0 = d.squaredNorm() / n;
  VectorXd r(max_lag + 1);
  r[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    const double ck = d.head(n - k).dot(d.tail(n - k)) / (n - k);
    r[k] = c0 > 0 ? ck / c0 : 0.0;
  }
  return r;
}

AcfSet acf_summary(const EnsembleResult& r) {
  if (r.acf_lags == 0) throw std::invalid_argument("acf_summary: ensemble ran without ACFs");
  std::vector<Eigen::Index> rows;
  for (long i = 0; i < r.size(); ++i)
    if (r.acf.row(i).allFinite()) rows.push_back(i);
  if (rows.empty()) throw std::invalid_argument("acf_summary: no finished paths");
  AcfSet s;
  s.mean.resize(r.acf_modes, r.acf_lags);
  s.std.resize(r.acf_modes, r.acf_lags);
  std::vector<double> col(rows.size());
  for (int m = 0; m < r.acf_modes; ++m)
    for (int k = 0; k < r.acf_lags; ++k) {
      for (std::size_t j = 0; j < rows.size(); ++j) col[j] = r.acf(rows[j], m * r.acf_lags + k);
      const double mean = compensated_sum(col.data(), static_cast<long>(col.size())) / col.size();
      for (auto& v : col) v = (v - mean) * (v - mean);
      s.mean(m, k) = mean;
      s.std(m, k) = std::sqrt(compensated_sum(col.data(), static_cast<long>(col.size())) / col.size());
    }
  return s;
}

Trimodality trimodality(const std::vector<double>& metric, double bin_width, double range) {
  const int bins = static_cast<int>(std::lround(2.0 * range / bin_width));
  const Histogram h = histogram(metric, uniform_edges(-range, range, bins), false);
  const VectorXd c = h.centers();
  Trimodality t;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double a = std::abs(c[i]), v = h.counts[i];
    if (a <= 0.25) t.central_peak = std::max(t.central_peak, v);
    else if (a < 0.75) t.gap_max = std::max(t.gap_max, v);
    else if (c[i] > 0) t.right_peak = std::max(t.right_peak, v);
    else t.left_peak = std::max(t.left_peak, v);
  }
  t.central = t.central_peak > t.gap_max;
  t.left = t.left_peak > t.gap_max;
  t.right = t.right_peak > t.gap_max;
  return t;
}

Bimodality bimodality(const Histogram& h) {
  const VectorXd raw = h.values();
  const Eigen::Index n = raw.size();
  Bimodality b;
  if (n < 5) return b;
  VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - 1), hi = std::min<Eigen::Index>(n - 1, i + 1);
    s[i] = raw.segment(lo, hi - lo + 1).mean();
  }
  const double top = s.maxCoeff();
  std::vector<Eigen::Index> peaks;
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    if (s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] >= 0.1 * top) peaks.push_back(i);
  if (peaks.size() < 2) return b;
  // among pairs separated by a dip, the one with the tallest smaller peak;
  // falls back to the two tallest maxima when no pair qualifies
  std::sort(peaks.begin(), peaks.end(), [&](auto x, auto y) { return s[x] > s[y]; });
  Eigen::Index p = std::min(peaks[0], peaks[1]), q = std::max(peaks[0], peaks[1]);
  double dip = s.segment(p, q - p + 1).minCoeff() / std::min(s[p], s[q]);
  double best = -1.0;
  for (std::size_t a = 0; a < peaks.size(); ++a)
    for (std::size_t z = a + 1; z < peaks.size(); ++z) {
      const Eigen::Index i = std::min(peaks[a], peaks[z]), j = std::max(peaks[a], peaks[z]);
      const double low = std::min(s[i], s[j]);
      const double d = s.segment(i, j - i + 1).minCoeff() / low;
      if (d < 0.5 && low > best) {
        best = low;
        p = i;
        q = j;
        dip = d;
      }
    }
  const VectorXd c = h.centers();
  auto refine = [&](Eigen::Index i) {
    const double d = s[i - 1] - 2 * s[i] + s[i + 1];
    const double off = d < 0 ? 0.5 * (s[i - 1] - s[i + 1]) / d : 0.0;
    return c[i] + std::clamp(off, -0.5, 0.5) * (h.edges[i + 1] - h.edges[i]);
  };
  b.peak_lo = refine(p);
  b.peak_hi = refine(q);
  b.dip = dip;
  b.bimodal = dip < 0.5;
  return b;
}

double outer_mass(const std::vector<double>& samples, double p_lo, double p_hi, double frac) {
  if (!(p_hi > p_lo)) throw std::invalid_argument("outer_mass: peaks out of order");
  const double s = p_hi - p_lo, lo = p_lo - frac * s, hi = p_hi + frac * s;
  long n = 0, out = 0;
  for (double v : samples) {
    if (!std::isfinite(v)) continue;
    ++n;
    if (v < lo || v > hi) ++out;
  }
  if (n == 0) throw std::invalid_argument("outer_mass: no samples");
  return static_cast<double>(out) / n;
}

std::vector<double> pooled(const EnsembleResult& r) {
  std::vector<double> out;
  for (long i = 0; i < r.size(); ++i)
    if (r.ok(i)) out.insert(out.end(), r.samples[i].begin(), r.samples[i].end());
  return out;
}

std::vector<double> ok_metrics(const EnsembleResult& r) {
  std::vector<double> out;
  for (long i = 0; i < r.size(); ++i)
    if (r.ok(i) && std::isfinite(r.metric[i])) out.push_back(r.metric[i]);
  return out;
}

}  // namespace opm
