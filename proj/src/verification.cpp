#include "opm/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "opm/bifurcation.hpp"
#include "opm/error.hpp"
#include "opm/io.hpp"

namespace opm {

namespace {

std::string f(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string f(const char* format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof buf, format, ap);
  va_end(ap);
  return buf;
}

template <class Fn>
CheckResult timed(int id, const std::string& name, Fn fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.id = id;
  r.name = name;
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double loglog_slope(const std::vector<double>& dt, const std::vector<double>& err) {
  if (dt.size() != err.size() || dt.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dt.size());
  for (std::size_t i = 0; i < dt.size(); ++i) {
    const double x = std::log(dt[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

CheckResult check_linearized_spectrum() {
  return timed(1, "linearized spectrum beta_1..beta_5 within 1e-3", [](CheckResult& r) {
    const double ref[5] = {0.1815, -7.4966, -19.9665, -37.2840, -59.5108};
    const JumpModel model = make_jump_model(default_config(Study::Jump));
    double worst = 0.0;
    std::string vals;
    for (int i = 0; i < 5; ++i) {
      const double b = model.basis().eigenvalue(i);
      worst = std::max(worst, std::abs(b - ref[i]));
      vals += f("%s%.5f", i ? " " : "", b);
    }
    r.passed = worst <= 1e-3;
    r.detail = "beta = (" + vals + "), max |dev| = " + f("%.2e", worst);
  });
}

CheckResult check_bifurcation() {
  return timed(2, "fold at 1.3309 +- 0.005, three states at lambda=1.32, no fold for eps=0.35", [](CheckResult& r) {
    const ExperimentConfig c = default_config(Study::Jump);
    const auto& b = c.bifurcation;
    ContinuationOptions opts;
    opts.step = b.lambda_step;
    opts.lambda_end = b.lambda_end;
    const BifurcationDiagram d = bifurcation_diagram(c.jump.length, c.jump.eps, c.jump.galerkin_modes, opts,
                                                     b.lambda_start);
    const auto st = fold_steady_states(c.jump.length, 1.32, kEpsStar / 2.0, c.jump.galerkin_modes, b.multistart);
    ContinuationOptions cmp = opts;
    cmp.lambda_end = b.lambda_end_compare;
    const auto s0 = fold_steady_states(c.jump.length, b.lambda_start, b.eps_compare, c.jump.galerkin_modes);
    bool no_fold = false;
    double last = 0.0;
    if (!s0.solutions.empty()) {
      const Branch other =
          continue_branch(b.eps_compare, c.jump.galerkin_modes, c.jump.length, b.lambda_start, s0.solutions.front(), cmp);
      last = other.points.empty() ? 0.0 : other.points.back().lambda;
      no_fold = !other.turned && last >= b.lambda_end_compare - 1e-9;
    }
    const bool fold_ok = d.lower.turned && std::abs(d.fold_lower - 1.3309) <= 0.005;
    r.passed = fold_ok && st.solutions.size() == 3 && no_fold;
    r.detail = f("lambda* = %.5f, solutions at 1.32: %zu, eps=0.35 continued to %.3f %s", d.fold_lower,
                 st.solutions.size(), last, no_fold ? "without fold" : "with a fold");
  });
}

CheckResult check_energy_fractions() {
  return timed(3, "steady-state energy fractions within 0.5 points", [](CheckResult& r) {
    struct Ref {
      const char* name;
      int mode;
      double pct;
    };
    const Ref refs[] = {{"phi1+", 0, 94.69}, {"phi1+", 2, 4.79},  {"phi1+", 4, 0.46}, {"phi1+", 6, 0.05},
                        {"phi2a", 1, 99.16}, {"phi2a", 5, 0.83}, {"phi3a", 2, 99.93}};
    const auto states = allen_cahn_steady_states(3.9 * std::numbers::pi, 16);
    double worst = 0.0;
    std::string vals;
    for (const auto& ref : refs) {
      auto it = std::find_if(states.begin(), states.end(), [&](auto& s) { return s.name == ref.name; });
      if (it == states.end()) throw NumericalError(std::string("steady state ") + ref.name + " not found");
      const double pct = 100.0 * it->fractions[ref.mode];
      worst = std::max(worst, std::abs(pct - ref.pct));
      vals += f(" %s/e%d=%.2f", ref.name, ref.mode + 1, pct);
    }
    r.passed = worst <= 0.5;
    r.detail = f("max |dev| = %.3f pts;", worst) + vals;
  });
}

CheckResult check_memory_oracle() {
  return timed(4, "memory RDEs vs direct quadrature, 20 triples, dt=1e-3", [](CheckResult& r) {
    // Rates drawn over the spectra the RDEs run with: lambda_5..lambda_8 of
    // the sACE and beta_3, beta_5 of the jump study.
    const SaceModel sm(SaceParams{});
    const double kap_lo = sm.basis().eigenvalue(7), kap_hi = sm.basis().eigenvalue(4);
    const JumpModel jm = make_jump_model(default_config(Study::Jump));
    const double bet_lo = jm.basis().eigenvalue(4), bet_hi = jm.basis().eigenvalue(2);
    const double gain = jm.gain();
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double dt = 1e-3;
    double worst_z = 0.0, worst_i = 0.0, worst_j = 0.0;
    for (int t = 0; t < 20; ++t) {
      const double kappa = kap_lo + (kap_hi - kap_lo) * U(gen);
      const double beta = bet_lo + (bet_hi - bet_lo) * U(gen);
      const double tau = std::round((0.05 + 1.95 * U(gen)) / dt) * dt;
      const std::uint64_t seed = gen();
      const BrownianPaths P = sample_brownian(seed, {4}, VectorXd::Constant(1, 1.0), dt, -2.5, 5.0);
      const JumpSignal S = sample_jump_signal(seed, 0.35, 1.0, dt, -2.5, 5.0);
      MemoryState mi = init_memory_gaussian(P, {0}, VectorXd::Constant(1, kappa), VectorXd::Constant(1, tau), 0);
      MemoryState mj = init_memory_jump(S, VectorXd::Constant(1, beta), VectorXd::Constant(1, tau),
                                        VectorXd::Constant(1, gain), 0);
      const double zs = 0.2 * kappa;  // Z = sigma_n lambda_n I
      for (long k = 1; k <= 5000; ++k) {
        step_memory_I(mi, P);
        step_memory_J(mj, S);
        const double qi = memory_quadrature_I(P, 0, kappa, tau, k);
        const double qj = memory_quadrature_J(S, beta, tau, gain, k);
        worst_i = std::max(worst_i, std::abs(mi.value[0] - qi) / (1.0 + std::abs(qi)));
        worst_z = std::max(worst_z, std::abs(zs * (mi.value[0] - qi)) / (1.0 + std::abs(zs * qi)));
        worst_j = std::max(worst_j, std::abs(mj.value[0] - qj) / (1.0 + std::abs(qj)));
      }
    }
    r.passed = worst_i <= 1e-3 && worst_z <= 1e-3 && worst_j <= 1e-3;
    r.detail = f("max |prop-quad|/(1+|quad|): I %.2e, Z %.2e, J %.2e (kappa in [%.2f, %.2f], beta in [%.1f, %.1f])",
                 worst_i, worst_z, worst_j, kap_lo, kap_hi, bet_lo, bet_hi);
  });
}

CheckResult check_phi_oracle() {
  return timed(5, "closed-form Phi vs backward-forward integration, dt^1/2 and dt decay", [](CheckResult& r) {
    const std::vector<double> dts = {1e-2, 1e-3, 1e-4};
    // sACE: tau = 1 on every slot, fine path coarsened to each dt.
    const SaceModel sm(SaceParams{});
    ParameterizationSpec gs = make_sace_spec(sm, VectorXd::Constant(4, 1.0));
    std::vector<double> eg(3, 0.0), ej(3, 0.0);
    std::mt19937_64 gen(5);
    std::normal_distribution<double> N(0.0, 0.5);
    const int n_paths = 8;
    for (int s = 0; s < n_paths; ++s) {
      VectorXd X(4);
      for (int i = 0; i < 4; ++i) X[i] = N(gen);
      const auto modes = sm.forced_modes();
      VectorXd sig(static_cast<Eigen::Index>(modes.size()));
      for (std::size_t i = 0; i < modes.size(); ++i) sig[static_cast<Eigen::Index>(i)] = sm.sigma()[modes[i]];
      const BrownianPaths fine = sample_brownian(100 + s, modes, sig, 1e-4, -2.0, 2.0);
      for (int d = 0; d < 3; ++d) {
        const int factor = static_cast<int>(std::lround(dts[d] / 1e-4));
        BrownianPaths P = coarsen(fine, factor);
        const long k = std::lround(2.0 / dts[d]);
        const MemoryState mem = spec_memory(gs, P, k);
        for (int p = 0; p < gs.size(); ++p)
          eg[d] += std::abs(eval_phi_gaussian(gs, X, mem, P, p) - integrate_bf_numeric(gs, X, p, P, k)) /
                   (n_paths * gs.size());
      }
    }
    // Jump: same block realization at every dt.
    const JumpModel jm = make_jump_model(default_config(Study::Jump));
    ParameterizationSpec js = make_jump_spec(jm, VectorXd::Constant(2, 0.5));
    for (int s = 0; s < n_paths; ++s) {
      const double X = N(gen);
      for (int d = 0; d < 3; ++d) {
        const JumpSignal S = sample_jump_signal(200 + s, 0.35, 1.0, dts[d], -1.0, 3.0);
        const long k = std::lround(2.5 / dts[d]);
        const MemoryState mem = spec_memory(js, S, k);
        for (int p = 0; p < js.size(); ++p)
          ej[d] += std::abs(eval_phi_jump(js, X, mem, p) - integrate_bf_numeric(js, VectorXd::Constant(1, X), p, S, k)) /
                   (n_paths * js.size());
      }
    }
    const double sg = loglog_slope(dts, eg), sj = loglog_slope(dts, ej);
    const bool mono = eg[0] > eg[1] && eg[1] > eg[2] && ej[0] > ej[1] && ej[1] > ej[2];
    r.passed = mono && sg >= 0.4 && sj >= 0.8;
    r.detail = f("Gaussian err %.2e %.2e %.2e slope %.2f (need >= 0.4); jump err %.2e %.2e %.2e slope %.2f (need >= 0.8)",
                 eg[0], eg[1], eg[2], sg, ej[0], ej[1], ej[2], sj);
  });
}

CheckResult check_defect_structure(const VerifyOptions& o) {
  return timed(6, "defect minima: modes 5,6 improve >= 5%, modes 7,8 < 5% (median over training paths)",
               [&](CheckResult& r) {
                 const ExperimentConfig c = default_config(Study::Sace);
                 const SaceModel sm(c.sace);
                 std::vector<std::vector<double>> impr(4);
                 for (int s = 1; s <= o.defect_seeds; ++s) {
                   ExperimentConfig cs = c;
                   cs.training.seed = static_cast<std::uint64_t>(s);
                   const TrainingResult t = train(cs, sm);
                   for (int p = 0; p < 4; ++p) impr[p].push_back(t.curves[p].improvement);
                 }
                 double m[4];
                 for (int p = 0; p < 4; ++p) m[p] = median(impr[p]);
                 r.passed = m[0] >= 0.05 && m[1] >= 0.05 && m[2] < 0.05 && m[3] < 0.05;
                 r.detail = f("median improvement over %d paths: e5 %.3f, e6 %.3f, e7 %.3f, e8 %.3f", o.defect_seeds,
                              m[0], m[1], m[2], m[3]);
               });
}

std::vector<CheckResult> check_sace_ensemble(const VerifyOptions& o) {
  SaceComparison s;
  bool ran = false;
  std::string err;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ExperimentConfig c = default_config(Study::Sace);
    c.ensemble.paths = o.sace_paths;
    c.ensemble.workers = o.workers;
    c.ensemble.acf_max_lag = 0;
    const SaceModel sm(c.sace);
    const TrainingResult t = train(c, sm);
    const SaceClosure cl(sm, t.spec);
    double tau_max = 0.0;
    for (const auto& m : t.spec.modes()) tau_max = std::max(tau_max, m.tau);
    const EnsembleOptions eo = ensemble_options(c);
    const EnsembleResult full = run_sace_full(sm, eo, tau_max);
    const EnsembleResult red = run_sace_reduced(cl, sm, eo);
    s = compare_sace(full, red, sm.basis(), c.ensemble);
    ran = true;
  } catch (const std::exception& e) {
    err = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CheckResult a, b;
  a.id = 7;
  a.name = "min+max statistics: trimodal, rare fraction, L1 <= 0.2";
  b.id = 8;
  b.name = "class-conditioned mean profiles within 0.15 sup-norm";
  a.seconds = secs;
  if (!ran) {
    a.detail = b.detail = "error: " + err;
    return {a, b};
  }
  const double rf = static_cast<double>(s.rare_full) / s.n_full;
  const double rr = static_cast<double>(s.rare_reduced) / s.n_reduced;
  a.passed = s.tri_full.trimodal() && s.tri_reduced.trimodal() && s.rare_reduced > 0 &&
             rr <= 2.0 * s.wilson_full.hi && s.metric_pdf.l1 <= 0.2;
  a.detail = f("%ld paths; trimodal full %d reduced %d; rare full %.4f [99%% Wilson %.4f, %.4f], reduced %.4f "
               "(cap %.4f); L1 %.3f over %ld bins; failed %ld/%ld",
               o.sace_paths, s.tri_full.trimodal(), s.tri_reduced.trimodal(), rf, s.wilson_full.lo, s.wilson_full.hi,
               rr, 2.0 * s.wilson_full.hi, s.metric_pdf.l1, static_cast<long>(s.metric_pdf.a.counts.size()),
               s.failed_full, s.failed_reduced);
  b.passed = s.profile_typical <= 0.15 && s.profile_rare <= 0.15;
  b.detail = f("sup|mean_full - mean_reduced| / sup|mean_full|: typical %.3f (n %ld/%ld), rare %.3f (n %ld/%ld)",
               s.profile_typical, s.prof_full.n_typical, s.prof_reduced.n_typical, s.profile_rare,
               s.prof_full.n_rare, s.prof_reduced.n_rare);
  return {a, b};
}

CheckResult check_jump_bimodality(const VerifyOptions& o) {
  return timed(9, "jump y1 PDFs bimodal, peaks within 5%, reduced outer mass >= full", [&](CheckResult& r) {
    ExperimentConfig c = default_config(Study::Jump);
    c.ensemble.paths = o.jump_paths;
    c.ensemble.workers = o.workers;
    c.ensemble.horizon_time = o.jump_horizon_time;
    const JumpModel jm = make_jump_model(c);
    const TrainingResult t = train(c, jm);
    const JumpClosure cl(jm, t.spec, c.ou_approximation);
    const EnsembleOptions eo = ensemble_options(c);
    const JumpSampling smp{c.ensemble.sample_stride_steps, c.ensemble.sample_start_time};
    const EnsembleResult full = run_jump_full(jm, eo, smp);
    const EnsembleResult red = run_jump_reduced(cl, jm, eo, smp);
    const JumpComparison j = compare_jump(full, red, c.ensemble.histogram_bins);
    r.passed = j.full.bimodal && j.reduced.bimodal && j.peak_err_lo <= 0.05 && j.peak_err_hi <= 0.05 &&
               j.outer_reduced >= j.outer_full;
    r.detail = f("%ld paths x %.0f steps; tau* = (%.2f, %.2f); peaks full (%.3f, %.3f) reduced (%.3f, %.3f), rel err "
                 "(%.3f, %.3f); outer mass full %.4f reduced %.4f; L1 %.3f; failed %ld/%ld",
                 o.jump_paths, o.jump_horizon_time / c.jump.dt, t.spec.mode(0).tau, t.spec.mode(1).tau, j.full.peak_lo,
                 j.full.peak_hi, j.reduced.peak_lo, j.reduced.peak_hi, j.peak_err_lo, j.peak_err_hi, j.outer_full,
                 j.outer_reduced, j.pdf.l1, j.failed_full, j.failed_reduced);
  });
}

namespace {

bool same_bytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::equal(std::istreambuf_iterator<char>(fa), std::istreambuf_iterator<char>(),
                    std::istreambuf_iterator<char>(fb), std::istreambuf_iterator<char>());
}

// Runs `command` from config, then again from the emitted manifest into a
// second directory, and compares every listed output.
bool manifest_roundtrip(const std::string& command, RunRequest req, const std::string& dir2, std::string& why) {
  auto run = [&](const RunRequest& r) {
    if (command == "simulate") cmd_simulate(r);
    else if (command == "train") cmd_train(r);
    else if (command == "reduce") cmd_reduce(r);
    else if (command == "ensemble") cmd_ensemble(r);
    else cmd_bifurcation(r);
  };
  run(req);
  const auto m = read_json(req.out + "/manifest.json");
  RunRequest again = request_from_document(command, m);
  again.out = dir2;
  run(again);
  for (const auto& name : m.at("outputs")) {
    const std::string n = name.get<std::string>();
    if (n == "manifest.json") {
      // output_dir differs by construction; compare with it normalized
      auto a = read_json(req.out + "/" + n), b = read_json(dir2 + "/" + n);
      a["config"]["output_dir"] = b["config"]["output_dir"] = "";
      if (a != b) {
        why = command + ": manifest differs";
        return false;
      }
    } else if (!same_bytes(req.out + "/" + n, dir2 + "/" + n)) {
      why = command + ": " + n + " differs";
      return false;
    }
  }
  return true;
}

}  // namespace

CheckResult check_structural(const VerifyOptions& o) {
  return timed(10, "structural identities", [&](CheckResult& r) {
    std::vector<std::string> fails;
    std::string detail;
    std::mt19937_64 gen(10);
    std::normal_distribution<double> N(0.0, 1.0);

    const ExperimentConfig sc = default_config(Study::Sace);
    const SaceModel sm(sc.sace);
    const ParameterizationSpec gs = make_sace_spec(sm, VectorXd::Constant(4, 0.7));
    const SaceClosure cl(sm, gs);
    const ExperimentConfig jc = default_config(Study::Jump);
    const JumpModel jm = make_jump_model(jc);
    const ParameterizationSpec js = make_jump_spec(jm, VectorXd::Constant(2, 0.05));
    const JumpClosure ou(jm, js, true), full(jm, js, false);

    // Galerkin degeneration
    double g1 = 0.0, g2 = 0.0;
    const auto& T = js.tensors();
    const double b1 = jm.basis().eigenvalue(0), c2 = T.quad(0, 0, 0), c3 = jm.cubic_scale() * T.cubic(0, 0, 0, 0);
    for (int s = 0; s < 20; ++s) {
      VectorXd y(4);
      for (int i = 0; i < 4; ++i) y[i] = N(gen);
      const VectorXd a = cl.rhs(y, VectorXd::Zero(4)), b = cl.galerkin_rhs(y);
      g1 = std::max(g1, (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff()));
      const double x = 2.0 * N(gen);
      const double ref = b1 * x + c2 * x * x + c3 * x * x * x;
      g2 = std::max(g2, std::abs(ou.rhs(x, VectorXd::Zero(2)) - ref) / (1.0 + std::abs(ref)));
    }
    if (g1 > 1e-12 || g2 > 1e-12) fails.push_back("galerkin");
    detail += f("galerkin %.1e/%.1e", g1, g2);

    // pseudo-spectral vs tensor closure
    double e59 = 0.0;
    for (int s = 0; s < 20; ++s) {
      VectorXd y(4), ph(4);
      for (int i = 0; i < 4; ++i) {
        y[i] = N(gen);
        ph[i] = 0.3 * N(gen);
      }
      const VectorXd a = cl.nonlinear(y, ph), b = cl.nonlinear_expanded(y, ph);
      e59 = std::max(e59, (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff()));
    }
    if (e59 > 1e-10) fails.push_back("closure-vs-lift");
    detail += f("; lift %.1e", e59);

    // polynomial coefficients vs quadrature
    const EigenBasis& jb = jm.basis();
    const VectorXd e1 = jb.mode(0).transpose(), e3 = jb.mode(js.mode(0).mode).transpose();
    const VectorXd& a = jm.quad_weight();
    const double q_yy = jb.grid().integrate(a.cwiseProduct(e1).cwiseProduct(e1).cwiseProduct(e1));
    const double q_y3 = 2.0 * jb.grid().integrate(a.cwiseProduct(e1).cwiseProduct(e3).cwiseProduct(e1));
    double e84 = std::max(std::abs(ou.coefficient(2, 0, 0) - q_yy), std::abs(ou.coefficient(1, 1, 0) - q_y3));
    for (int s = 0; s < 20; ++s) {
      const double y = 2.0 * N(gen);
      VectorXd J(2);
      J << 3.0 * N(gen), N(gen);
      for (const JumpClosure* c : {&ou, &full}) {
        const double p = c->rhs(y, J), q = c->rhs_quadrature(y, J);
        e84 = std::max(e84, std::abs(p - q) / (1.0 + std::abs(q)));
      }
    }
    if (e84 > 1e-8) fails.push_back("polynomial");
    detail += f("; poly %.1e (deg %d)", e84, full.degree());

    // Ito identity
    std::vector<double> dts = {1e-2, 1e-3, 1e-4}, ito(3, 0.0);
    for (int s = 0; s < 8; ++s) {
      const BrownianPaths fine = sample_brownian(300 + s, {4}, VectorXd::Constant(1, 1.0), 1e-4, -2.0, 3.0);
      for (int d = 0; d < 3; ++d) {
        const BrownianPaths P = coarsen(fine, static_cast<int>(std::lround(dts[d] / 1e-4)));
        const double kappa = sm.basis().eigenvalue(4 + s % 4), tau = 1.0;
        const long k = std::lround(3.0 / dts[d]), m = P.steps(tau);
        const double lhs = P.at(0, k) - std::exp(kappa * tau) * P.at(0, k - m) +
                           kappa * memory_quadrature_I(P, 0, kappa, tau, k);
        ito[d] += std::abs(lhs - stochastic_convolution(P, 0, kappa, tau, k)) / 8.0;
      }
    }
    const double ito_slope = loglog_slope(dts, ito);
    if (ito_slope < 0.4) fails.push_back("ito");
    detail += f("; ito slope %.2f", ito_slope);

    // non-resonance
    const InteractionTensors tens = interaction_tensors(sm.basis(), VectorXd(), 4, 8);
    const NonresonanceReport nr =
        check_nonresonance(sm.basis().eigenvalues().head(8), &tens, 4, sm.sigma().head(8), 3);
    if (!nr.all_clear()) fails.push_back("nonresonance");
    detail += f("; nonres %ld checked, %zu violations", nr.checked, nr.violations.size());

    // energy decay without noise
    SaceParams quiet = sc.sace;
    quiet.sigma = 0.0;
    const SaceModel qm(quiet);
    VectorXd u0 = VectorXd::Zero(qm.basis().size());
    for (int i = 0; i < 8; ++i) u0[i] = 0.5 * N(gen);
    const BrownianPaths none = sace_paths(qm, 1, 20.0, 0.0);
    const Trajectory tr = integrate_sace(qm, u0, none, 20.0, 1);
    double rise = 0.0, prev = 0.0;
    for (long s = 0; s < tr.size(); ++s) {
      const double E = gl_energy(SpectralField(qm.basis_ptr(), tr.coeffs.row(s).transpose(), 4));
      if (s) rise = std::max(rise, E - prev);
      prev = E;
    }
    if (rise > 1e-12) fails.push_back("energy");
    detail += f("; energy max rise %.1e", rise);

    // manifest reproducibility
    const std::string root = o.scratch_dir;
    std::filesystem::remove_all(root);
    std::string why;
    bool repro = true;
    {
      ExperimentConfig c = default_config(Study::Sace);
      c.training.tau_max_time = 2.0;
      c.ensemble.paths = 6;
      c.ensemble.acf_max_lag = 20;
      c.simulate.horizon_time = 12.0;
      RunRequest rq{"simulate", c, std::nullopt, root + "/sim-a", std::nullopt};
      repro = repro && manifest_roundtrip("simulate", rq, root + "/sim-b", why);
      rq = {"train", c, std::nullopt, root + "/train-a", std::nullopt};
      repro = repro && manifest_roundtrip("train", rq, root + "/train-b", why);
      if (repro) {
        const auto spec = read_json(root + "/train-a/spec.json");
        rq = {"ensemble", c, spec, root + "/ens-a", std::nullopt};
        repro = repro && manifest_roundtrip("ensemble", rq, root + "/ens-b", why);
        rq = {"reduce", c, spec, root + "/red-a", std::nullopt};
        repro = repro && manifest_roundtrip("reduce", rq, root + "/red-b", why);
      }
    }
    if (!repro) fails.push_back("manifest (" + why + ")");
    detail += repro ? "; manifests reproduce" : "; manifest mismatch";

    r.passed = fails.empty();
    if (!fails.empty()) {
      detail += "; failed:";
      for (const auto& s : fails) detail += " " + s;
    }
    r.detail = detail;
  });
}

std::vector<CheckResult> run_checks(const std::vector<int>& ids, const VerifyOptions& o) {
  std::vector<CheckResult> out;
  auto want = [&](int i) { return std::find(ids.begin(), ids.end(), i) != ids.end(); };
  if (want(1)) out.push_back(check_linearized_spectrum());
  if (want(2)) out.push_back(check_bifurcation());
  if (want(3)) out.push_back(check_energy_fractions());
  if (want(4)) out.push_back(check_memory_oracle());
  if (want(5)) out.push_back(check_phi_oracle());
  if (want(6)) out.push_back(check_defect_structure(o));
  if (want(7) || want(8)) {
    for (auto& r : check_sace_ensemble(o))
      if (want(r.id)) out.push_back(r);
  }
  if (want(9)) out.push_back(check_jump_bimodality(o));
  if (want(10)) out.push_back(check_structural(o));
  return out;
}

std::string format_line(const CheckResult& r) {
  return f("[%s] criterion %d: %s | %s (%.1fs)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
           r.seconds);
}

}  // namespace opm
