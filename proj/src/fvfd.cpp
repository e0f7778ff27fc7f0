#include "mtfe/fvfd.hpp"

#include <algorithm>
#include <cmath>

#include "mtfe/error.hpp"
#include "mtfe/tridiagonal.hpp"

namespace mtfe {

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Neumann Laplacian (u_{i+1} - 2u_i + u_{i-1}) / h^2 with mirrored ghosts.
Tridiagonal neumann_laplacian(int n, double h) {
  Tridiagonal L(static_cast<std::size_t>(n));
  const double s = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (i > 0) {
      L.lower[k] = s;
      L.diag[k] -= s;
    }
    if (i + 1 < n) {
      L.upper[k] = s;
      L.diag[k] -= s;
    }
  }
  return L;
}

class Baseline {
 public:
  Baseline(const ModelSpec& m, const FvfdConfig& cfg)
      : m_(m), cfg_(cfg), n_(cfg.N_cells), h_((m.b - m.a) / cfg.N_cells), L_(neumann_laplacian(n_, h_)),
        cell_(m.cell_reaction, m.field_names()) {
    for (const auto& f : m.fields) reactions_.emplace_back(f.reaction, m.field_names());
  }

  double centre(int i) const { return m_.a + (i + 0.5) * h_; }

  // Interface velocities of the taxis flux, u_{i+1/2} = (Phi_{i+1} - Phi_i)/h, i = 0..n-2.
  std::vector<double> velocities(const std::vector<std::vector<double>>& f) const {
    std::vector<double> phi(static_cast<std::size_t>(n_), 0.0);
    for (const auto& tc : m_.taxis) {
      const auto& c = f[static_cast<std::size_t>(m_.field_index(tc.field))];
      for (int i = 0; i < n_; ++i) phi[i] += tc.chi * c[i];
    }
    std::vector<double> u(static_cast<std::size_t>(std::max(n_ - 1, 0)));
    for (int i = 0; i + 1 < n_; ++i) u[i] = (phi[i + 1] - phi[i]) / h_;
    return u;
  }

  std::vector<double> taxis_rhs(const std::vector<double>& r, const std::vector<double>& u) const {
    std::vector<double> slope(static_cast<std::size_t>(n_), 0.0);
    for (int i = 1; i + 1 < n_; ++i) slope[i] = minmod(r[i] - r[i - 1], r[i + 1] - r[i]);
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i + 1 < n_; ++i) {
      const double face = u[i] >= 0.0 ? r[i] + 0.5 * slope[i] : r[i + 1] - 0.5 * slope[i + 1];
      const double flux = u[i] * face;  // flux of rho rho' = -(rho u)_x with u = Phi_x
      out[i] -= flux / h_;
      out[i + 1] += flux / h_;
    }
    return out;
  }

  void taxis(std::vector<double>& r, const std::vector<double>& u, double dt) const {
    const auto k1 = taxis_rhs(r, u);
    std::vector<double> r1(r);
    for (int i = 0; i < n_; ++i) r1[i] += dt * k1[i];
    const auto k2 = taxis_rhs(r1, u);
    for (int i = 0; i < n_; ++i) r[i] = 0.5 * (r[i] + r1[i] + dt * k2[i]);
  }

  // IMEX midpoint for every component: implicit diffusion, explicit reactions.
  void diffusion_reaction(std::vector<double>& r, std::vector<std::vector<double>>& f, double dt) const {
    const std::size_t nf = f.size();
    auto vals = [&](const std::vector<std::vector<double>>& g, int i) {
      std::vector<double> v(nf);
      for (std::size_t k = 0; k < nf; ++k) v[k] = g[k][i];
      return v;
    };
    auto stage = [&](const std::vector<double>& base, double D, double eps, double step,
                     const std::vector<double>& rate, std::vector<double>& out) {
      // (2eps/dt I - D L) y = 2eps/dt base + rate
      const double s = 2.0 * eps / step;
      Tridiagonal A(L_);
      for (std::size_t i = 0; i < A.size(); ++i) {
        A.lower[i] *= -D;
        A.upper[i] *= -D;
        A.diag[i] = s - D * A.diag[i];
      }
      std::vector<double> rhs(base.size());
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = s * base[i] + rate[i];
      if (!A.solve(rhs, out)) throw SolverError(ErrorCode::InstabilityDetected, "singular diffusion system");
    };

    // Stage 1 at the midpoint.
    std::vector<double> rate(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) rate[i] = cell_(r[i], vals(f, i));
    std::vector<double> rt;
    stage(r, m_.diffusion.D, 1.0, dt, rate, rt);
    std::vector<std::vector<double>> ft(f);
    for (std::size_t k = 0; k < nf; ++k) {
      for (int i = 0; i < n_; ++i) rate[i] = reactions_[k](r[i], vals(f, i));
      const FieldSpec& spec = m_.fields[k];
      if (spec.diffusing) {
        stage(f[k], spec.D, spec.eps, dt, rate, ft[k]);
      } else {
        for (int i = 0; i < n_; ++i) ft[k][i] = f[k][i] + 0.5 * dt * rate[i];
      }
    }

    // Stage 2 from the midpoint values.
    auto full = [&](std::vector<double>& y, const std::vector<double>& yt, double D, double eps,
                    const CompiledReaction& R) {
      const auto Ly = L_.apply(yt);
      for (int i = 0; i < n_; ++i) {
        const double reac = R(rt[i], vals(ft, i));
        y[i] += dt / eps * (D * Ly[i] + reac);
      }
    };
    full(r, rt, m_.diffusion.D, 1.0, cell_);
    for (std::size_t k = 0; k < nf; ++k) {
      const FieldSpec& spec = m_.fields[k];
      full(f[k], ft[k], spec.diffusing ? spec.D : 0.0, spec.diffusing ? spec.eps : 1.0, reactions_[k]);
    }
  }

  double step_size(const std::vector<double>& u) const {
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    double dt = cfg_.dt_max;
    if (umax > 0.0) dt = std::min(dt, cfg_.cfl * h_ / umax);
    return dt;
  }

  FvfdResult run(double t_end) const {
    FvfdResult res;
    res.a = m_.a;
    res.b = m_.b;
    res.rho.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) res.rho[i] = m_.cell_profile(centre(i));
    for (const auto& fs : m_.fields) {
      std::vector<double> c(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) c[i] = fs.initial(centre(i));
      res.fields.push_back(std::move(c));
    }
    const double tol = 1e-12 * std::max(1.0, t_end);
    while (t_end - res.t > tol) {
      auto u = velocities(res.fields);
      double dt = cfg_.fixed_dt ? *cfg_.fixed_dt : step_size(u);
      if (dt >= (t_end - res.t) * (1.0 - 1e-9)) dt = t_end - res.t;
      taxis(res.rho, u, 0.5 * dt);
      diffusion_reaction(res.rho, res.fields, dt);
      u = velocities(res.fields);
      taxis(res.rho, u, 0.5 * dt);
      res.t += dt;
      ++res.steps;
      for (double v : res.rho)
        if (!std::isfinite(v) || v < -1e-6)
          throw SolverError(ErrorCode::InstabilityDetected, "baseline density became " + std::to_string(v) +
                                                                " at t = " + std::to_string(res.t));
    }
    res.t = t_end;
    return res;
  }

 private:
  const ModelSpec& m_;
  FvfdConfig cfg_;
  int n_;
  double h_;
  Tridiagonal L_;
  CompiledReaction cell_;
  std::vector<CompiledReaction> reactions_;
};

}  // namespace

PiecewiseConstantDensity FvfdResult::density() const {
  PiecewiseConstantDensity d;
  const int n = static_cast<int>(rho.size());
  for (int i = 0; i <= n; ++i) d.interfaces.push_back(i == n ? b : a + i * (b - a) / n);
  d.values = rho;
  return d;
}

FvfdResult fvfd_run(const ModelSpec& model, const FvfdConfig& cfg, double t_end) {
  if (model.whole_line || model.attractant == AttractantKind::LogKernel)
    throw SolverError(ErrorCode::ConfigError, "the baseline needs a bounded domain with FE attractants");
  if (model.diffusion.kind != DiffusionKind::Linear)
    throw SolverError(ErrorCode::ConfigError, "the baseline supports linear cell diffusion only");
  if (cfg.N_cells < 8) throw SolverError(ErrorCode::ConfigError, "the baseline needs at least 8 cells");
  if (model.cell_init != CellInit::Density)
    throw SolverError(ErrorCode::ConfigError, "the baseline needs density initial data");
  return Baseline(model, cfg).run(t_end);
}

std::vector<double> project_to_grid(const PiecewiseConstantDensity& src, std::span<const double> target) {
  const std::size_t n = target.size() - 1;
  std::vector<double> out(n, 0.0);
  const auto& I = src.interfaces;
  std::size_t s = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = target[k], hi = target[k + 1];
    while (s + 1 < I.size() && I[s + 1] <= lo) ++s;
    double integral = 0.0;
    for (std::size_t q = s; q + 1 < I.size() && I[q] < hi; ++q) {
      const double l = std::max(lo, I[q]), r = std::min(hi, I[q + 1]);
      if (r > l) integral += src.values[q] * (r - l);
    }
    out[k] = integral / (hi - lo);
  }
  return out;
}

}  // namespace mtfe
