#include "opm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "opm/error.hpp"

namespace opm {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

void write_trajectory_csv(const std::string& path, const Trajectory& tr, const std::vector<std::string>& names) {
  std::ostringstream s;
  s << "t";
  for (Eigen::Index c = 0; c < tr.coeffs.cols(); ++c)
    s << "," << (c < static_cast<Eigen::Index>(names.size()) ? names[c] : "a" + std::to_string(c + 1));
  s << "\n";
  for (long r = 0; r < tr.size(); ++r) {
    s << fmt(tr.times[r]);
    for (Eigen::Index c = 0; c < tr.coeffs.cols(); ++c) s << "," << fmt(tr.coeffs(r, c));
    s << "\n";
  }
  write_text(path, s.str());
}

void write_defect_csv(const std::string& path, const std::vector<DefectCurve>& curves) {
  std::ostringstream s;
  s << "mode,tau,defect,normalized\n";
  for (const auto& c : curves)
    for (Eigen::Index i = 0; i < c.tau.size(); ++i)
      s << c.mode + 1 << "," << fmt(c.tau[i]) << "," << fmt(c.raw[i]) << "," << fmt(c.normalized[i]) << "\n";
  write_text(path, s.str());
}

void write_branch_csv(const std::string& path, const std::vector<std::pair<std::string, const Branch*>>& branches) {
  std::ostringstream s;
  s << "branch,lambda,a1,stable,min_eig,residual\n";
  for (const auto& [name, b] : branches)
    for (const auto& p : b->points)
      s << name << "," << fmt(p.lambda) << "," << fmt(p.a[0]) << "," << (p.stable ? 1 : 0) << "," << fmt(p.min_eig)
        << "," << fmt(p.residual) << "\n";
  write_text(path, s.str());
}

void write_pdf_csv(const std::string& path, const PdfComparison& c, const std::string& a_name,
                   const std::string& b_name) {
  std::ostringstream s;
  s << "lo,hi," << a_name << "," << b_name << "\n";
  const VectorXd pa = c.a.values(), pb = c.b.values();
  for (Eigen::Index i = 0; i < pa.size(); ++i)
    s << fmt(c.a.edges[i]) << "," << fmt(c.a.edges[i + 1]) << "," << fmt(pa[i]) << "," << fmt(pb[i]) << "\n";
  write_text(path, s.str());
}

namespace {
void profile_cols(std::ostringstream& s, const ProfileStats& p, Eigen::Index i) {
  if (p.count == 0)
    s << ",,";
  else
    s << "," << fmt(p.mean[i]) << "," << fmt(p.std[i]);
}
}  // namespace

void write_profiles_csv(const std::string& path, const VectorXd& x, const ClassProfiles& a, const ClassProfiles& b) {
  std::ostringstream s;
  s << "x,full_typical_mean,full_typical_std,full_rare_mean,full_rare_std,"
       "reduced_typical_mean,reduced_typical_std,reduced_rare_mean,reduced_rare_std\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s << fmt(x[i]);
    profile_cols(s, a.typical, i);
    profile_cols(s, a.rare, i);
    profile_cols(s, b.typical, i);
    profile_cols(s, b.rare, i);
    s << "\n";
  }
  write_text(path, s.str());
}

void write_acf_csv(const std::string& path, const AcfSet& a, const AcfSet& b, double lag_time) {
  std::ostringstream s;
  s << "mode,lag_time,full_mean,full_std,reduced_mean,reduced_std\n";
  const Eigen::Index modes = std::min(a.mean.rows(), b.mean.rows());
  for (Eigen::Index m = 0; m < modes; ++m)
    for (Eigen::Index k = 0; k < a.mean.cols(); ++k)
      s << m + 1 << "," << fmt(k * lag_time) << "," << fmt(a.mean(m, k)) << "," << fmt(a.std(m, k)) << ","
        << fmt(b.mean(m, k)) << "," << fmt(b.std(m, k)) << "\n";
  write_text(path, s.str());
}

void write_seeds_csv(const std::string& path, const std::vector<std::uint64_t>& a,
                     const std::vector<std::uint64_t>& b) {
  std::ostringstream s;
  s << "path,seed_full,seed_reduced\n";
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i)
    s << i << "," << (i < a.size() ? std::to_string(a[i]) : "") << "," << (i < b.size() ? std::to_string(b[i]) : "")
      << "\n";
  write_text(path, s.str());
}

void write_terminal_csv(const std::string& path, const EnsembleResult& r) {
  std::ostringstream s;
  s << "path,seed,metric";
  for (Eigen::Index c = 0; c < r.terminal.cols(); ++c) s << ",a" << c + 1;
  s << "\n";
  for (long i = 0; i < r.size(); ++i) {
    s << i << "," << r.seeds[i] << "," << fmt(r.metric[i]);
    for (Eigen::Index c = 0; c < r.terminal.cols(); ++c) s << "," << fmt(r.terminal(i, c));
    s << "\n";
  }
  write_text(path, s.str());
}

json spec_to_json(const ParameterizationSpec& spec) {
  json j;
  j["kind"] = spec.kind() == NoiseKind::Gaussian ? "gaussian" : "jump";
  j["q"] = spec.q();
  j["cubic_scale"] = spec.cubic_scale();
  json modes = json::array();
  for (const auto& m : spec.modes())
    modes.push_back({{"mode", m.mode + 1},
                     {"tau_time", m.tau},
                     {"Y", m.Y},
                     {"rate", m.rate},
                     {"sigma", m.sigma},
                     {"asymptotic", m.asymptotic}});
  j["modes"] = modes;
  return j;
}

ParameterizationSpec spec_from_json(const json& j, ParameterizationSpec tmpl) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if ((kind == "gaussian") != (tmpl.kind() == NoiseKind::Gaussian)) throw ConfigError("spec.kind", "study mismatch");
    if (j.at("q").get<int>() != tmpl.q()) throw ConfigError("spec.q", "differs from the configured model");
    const auto& modes = j.at("modes");
    if (!modes.is_array() || static_cast<int>(modes.size()) != tmpl.size())
      throw ConfigError("spec.modes", "slot count differs from the configured model");
    for (int p = 0; p < tmpl.size(); ++p) {
      const auto& m = modes[p];
      const std::string f = "spec.modes[" + std::to_string(p) + "]";
      if (m.at("mode").get<int>() != tmpl.mode(p).mode + 1) throw ConfigError(f + ".mode", "differs from the model");
      const double rate = m.at("rate").get<double>();
      if (std::abs(rate - tmpl.mode(p).rate) > 1e-9 * std::max(1.0, std::abs(rate)))
        throw ConfigError(f + ".rate", "differs from the model spectrum");
      const double tau = m.at("tau_time").get<double>();
      if (!(tau >= 0)) throw ConfigError(f + ".tau_time", "must be non-negative");
      tmpl.set_tau(p, tau);
      tmpl.set_asymptotic(p, m.at("asymptotic").get<bool>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("spec", e.what());
  }
  return tmpl;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// Header cells and numeric rows of a CSV file.
std::vector<std::vector<double>> read_table(const std::string& path, std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path, "empty file");
  header = split(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw ConfigError(path, "ragged row " + std::to_string(rows.size() + 2));
    std::vector<double> r;
    for (const auto& c : cells) {
      try {
        r.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw ConfigError(path, "bad number '" + c + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  if (rows.size() < 2) throw ConfigError(path, "need at least two rows");
  return rows;
}

// Step index grid from the time column; dt must match to 1e-9 relative.
void time_grid(const std::string& path, const std::vector<std::vector<double>>& rows, double dt, long& k_min,
               long& k_max) {
  k_min = std::lround(rows.front()[0] / dt);
  k_max = k_min + static_cast<long>(rows.size()) - 1;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::abs(rows[i][0] - (k_min + static_cast<long>(i)) * dt) > 1e-9 * std::max(1.0, std::abs(rows[i][0])))
      throw ConfigError(path, "time column is not a uniform grid with step dt");
}

}  // namespace

void write_noise_csv(const std::string& path, const BrownianPaths& p) {
  std::ostringstream s;
  s << "t";
  for (int m : p.modes) s << ",W" << m + 1;
  s << "\n";
  for (long k = p.k_min; k <= p.k_max; ++k) {
    s << fmt(p.time(k));
    for (int r = 0; r < static_cast<int>(p.modes.size()); ++r) s << "," << fmt(p.at(r, k));
    s << "\n";
  }
  write_text(path, s.str());
}

BrownianPaths read_noise_csv(const std::string& path, const std::vector<int>& modes, const VectorXd& sigma,
                             double dt) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  BrownianPaths p;
  p.dt = dt;
  p.modes = modes;
  p.sigma = sigma;
  time_grid(path, rows, dt, p.k_min, p.k_max);
  if (p.k_min > 0) throw ConfigError(path, "noise must start at t <= 0");
  p.W.resize(static_cast<Eigen::Index>(modes.size()), p.samples());
  for (std::size_t r = 0; r < modes.size(); ++r) {
    const std::string name = "W" + std::to_string(modes[r] + 1);
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError(path, "missing column " + name);
    const auto c = static_cast<std::size_t>(it - header.begin());
    for (std::size_t i = 0; i < rows.size(); ++i) p.W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = rows[i][c];
  }
  if (std::abs(p.at(0, 0)) > 0.0) throw ConfigError(path, "paths must vanish at t = 0");
  return p;
}

void write_signal_csv(const std::string& path, const JumpSignal& sig) {
  std::ostringstream s;
  s << "t,f,zeta\n";
  for (long k = sig.k_min; k <= sig.k_max; ++k)
    s << fmt(sig.time(k)) << "," << fmt(sig.f[k - sig.k_min]) << "," << fmt(sig.zeta[k - sig.k_min]) << "\n";
  write_text(path, s.str());
}

JumpSignal read_signal_csv(const std::string& path, double firing_rate, double block, double dt) {
  std::vector<std::string> header;
  const auto rows = read_table(path, header);
  if (header != std::vector<std::string>{"t", "f", "zeta"}) throw ConfigError(path, "expected columns t,f,zeta");
  JumpSignal s;
  s.firing_rate = firing_rate;
  s.block = block;
  s.dt = dt;
  time_grid(path, rows, dt, s.k_min, s.k_max);
  s.f.resize(s.samples());
  s.zeta.resize(s.samples());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.f[static_cast<Eigen::Index>(i)] = rows[i][1];
    s.zeta[static_cast<Eigen::Index>(i)] = rows[i][2];
  }
  return s;
}

void write_field_csv(const std::string& path, const EigenBasis& basis, const Trajectory& tr) {
  std::ostringstream s;
  s << "t,x,u\n";
  const VectorXd& x = basis.grid().x;
  for (long r = 0; r < tr.size(); ++r) {
    const VectorXd u = basis.reconstruct(tr.coeffs.row(r).transpose());
    for (Eigen::Index i = 0; i < x.size(); ++i) s << fmt(tr.times[r]) << "," << fmt(x[i]) << "," << fmt(u[i]) << "\n";
  }
  write_text(path, s.str());
}

void write_basis_csv(const std::string& path, const EigenBasis& basis) {
  std::ostringstream s;
  s << "x";
  for (int k = 0; k < basis.size(); ++k) s << ",e" << k + 1;
  s << "\n";
  const VectorXd& x = basis.grid().x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s << fmt(x[i]);
    for (int k = 0; k < basis.size(); ++k) s << "," << fmt(basis.mode(k)[i]);
    s << "\n";
  }
  write_text(path, s.str());
}

void write_tensors_csv(const std::string& path, const InteractionTensors& t) {
  std::ostringstream s;
  s << "kind,n,i,j,k,value\n";
  const int N = t.total(), q = t.resolved();
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        const double b = t.quad(n, i, j);
        if (std::abs(b) > 1e-14) s << "quad," << n + 1 << "," << i + 1 << "," << j + 1 << ",," << fmt(b) << "\n";
        for (int k = 0; k < q; ++k) {
          const double c = t.cubic(n, i, j, k);
          if (std::abs(c) > 1e-14)
            s << "cubic," << n + 1 << "," << i + 1 << "," << j + 1 << "," << k + 1 << "," << fmt(c) << "\n";
        }
      }
  write_text(path, s.str());
}

}  // namespace opm
