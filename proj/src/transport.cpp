#include "mtfe/transport.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mtfe/error.hpp"
#include "mtfe/tridiagonal.hpp"

namespace mtfe {

double DiffusionLaw::effective_coefficient(double dw) const {
  return D / gamma * std::pow(dw, gamma - 1.0);
}

double DiffusionLaw::flux(double dw, double gap) const {
  switch (kind) {
    case DiffusionKind::Linear:
      return D / gap;
    case DiffusionKind::PowerLaw:
      return effective_coefficient(dw) * std::pow(gap, -gamma);
    case DiffusionKind::VolumeFilling:
      // Pressure D (rho + (gamma-1)/(gamma+1) rho^(gamma+1)) with rho = dw / gap.
      return D / gap + D * (gamma - 1.0) / (gamma + 1.0) * std::pow(dw, gamma) * std::pow(gap, -gamma - 1.0);
  }
  return 0.0;
}

double DiffusionLaw::flux_derivative(double dw, double gap) const {
  switch (kind) {
    case DiffusionKind::Linear:
      return -D / (gap * gap);
    case DiffusionKind::PowerLaw:
      return -gamma * effective_coefficient(dw) * std::pow(gap, -gamma - 1.0);
    case DiffusionKind::VolumeFilling:
      return -D / (gap * gap) - D * (gamma - 1.0) * std::pow(dw, gamma) * std::pow(gap, -gamma - 2.0);
  }
  return 0.0;
}

namespace {

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool increasing(std::span<const double> v) {
  for (std::size_t j = 1; j < v.size(); ++j)
    if (!(v[j] > v[j - 1])) return false;
  return true;
}

// Principal-value sum S_j = sum_{i != j} 1/(P_j - P_i).
std::vector<double> log_kernel_sums(std::span<const double> P) {
  const std::size_t n = P.size();
  std::vector<double> S(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) {
      const double d = P[j] - P[i];
      if (d == 0.0)
        throw SolverError(ErrorCode::CoincidentNodes,
                          "nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      S[j] += 1.0 / d;
      S[i] -= 1.0 / d;
    }
  return S;
}

// Residual and Jacobian pieces of the stage-1 system on the full node vector.
class StageOperator {
 public:
  StageOperator(const InverseDistribution& V, const TaxisSource& taxis, const DiffusionLaw& law,
                Ends ends)
      : V_(V.nodes), taxis_(taxis), law_(law), dw_(V.grid.dw()), M_(V.M()),
        lo_(ends == Ends::Pinned ? 1 : 0), hi_(ends == Ends::Pinned ? V.M() - 1 : V.M()),
        factor_(taxis_factors(V, law)) {
    if (taxis.kind == TaxisSource::Kind::SplineField) explicit_slope_ = taxis.spline.derivative(V_);
  }

  int unknowns() const { return hi_ - lo_ + 1; }
  bool implicit_taxis() const { return taxis_.kind == TaxisSource::Kind::LogKernel && taxis_.chi != 0.0; }

  std::vector<double> full(std::span<const double> x) const {
    std::vector<double> v = V_;
    std::copy(x.begin(), x.end(), v.begin() + lo_);
    return v;
  }
  std::vector<double> free_part(std::span<const double> v) const {
    return {v.begin() + lo_, v.begin() + hi_ + 1};
  }

  double diffusion(std::span<const double> v, int j) const {
    double r = 0.0;
    if (j < M_) r += law_.flux(dw_, v[j + 1] - v[j]);
    if (j > 0) r -= law_.flux(dw_, v[j] - v[j - 1]);
    return r;
  }

  // Taxis term of the node equation, i.e. -chi * factor * c'(position).
  std::vector<double> taxis_term(std::span<const double> v, bool at_stage) const {
    std::vector<double> t(v.size(), 0.0);
    if (taxis_.kind == TaxisSource::Kind::None || taxis_.chi == 0.0) return t;
    std::vector<double> slope;
    if (taxis_.kind == TaxisSource::Kind::SplineField)
      slope = at_stage ? taxis_.spline.derivative(v) : explicit_slope_;
    else
      slope = eval_taxis_gradient(taxis_, dw_, v);
    for (std::size_t j = 0; j < v.size(); ++j) t[j] = -taxis_.chi * factor_[j] * slope[j];
    return t;
  }

  // Stage 1: G_j = x_j - V_j + dt/2 (F_j(x) + taxis_j).
  void residual(std::span<const double> x, double dt, std::vector<double>& r) const {
    const auto v = full(x);
    const auto tax = taxis_term(implicit_taxis() ? std::span<const double>(v) : std::span<const double>(V_), false);
    r.resize(static_cast<std::size_t>(unknowns()));
    for (int j = lo_; j <= hi_; ++j)
      r[static_cast<std::size_t>(j - lo_)] = v[j] - V_[j] + 0.5 * dt * (diffusion(v, j) + tax[j]);
  }

  Tridiagonal tridiagonal_jacobian(std::span<const double> v, double dt) const {
    Tridiagonal J(static_cast<std::size_t>(unknowns()));
    for (int j = lo_; j <= hi_; ++j) {
      const auto row = static_cast<std::size_t>(j - lo_);
      double coupling = 0.0;  // both gaps summed as a pair, so mirrored rows agree bitwise
      if (j < M_) {
        const double e = 0.5 * dt * law_.flux_derivative(dw_, v[j + 1] - v[j]);
        coupling += e;
        if (j + 1 <= hi_) J.upper[row] = e;
      }
      if (j > 0) {
        const double e = 0.5 * dt * law_.flux_derivative(dw_, v[j] - v[j - 1]);
        coupling += e;
        if (j - 1 >= lo_) J.lower[row] = e;
      }
      J.diag[row] = 1.0 - coupling;
    }
    return J;
  }

  // Derivatives of the implicit log-kernel term: d tax_j / d v_i.
  Eigen::MatrixXd dense_jacobian(std::span<const double> v, double dt) const {
    const int n = unknowns();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const auto T = tridiagonal_jacobian(v, dt);
    for (int r = 0; r < n; ++r) {
      J(r, r) = T.diag[static_cast<std::size_t>(r)];
      if (r > 0) J(r, r - 1) = T.lower[static_cast<std::size_t>(r)];
      if (r + 1 < n) J(r, r + 1) = T.upper[static_cast<std::size_t>(r)];
    }
    if (implicit_taxis()) {
      const double c = taxis_.chi * dw_ / std::numbers::pi;
      for (int j = lo_; j <= hi_; ++j)
        for (int i = lo_; i <= hi_; ++i) {
          if (i == j) continue;
          const double d = v[j] - v[i];
          const double e = 0.5 * dt * c * factor_[j] / (d * d);
          J(j - lo_, i - lo_) += e;
          J(j - lo_, j - lo_) -= e;
        }
    }
    return J;
  }

  bool diagonally_dominant(double dt) const {
    if (implicit_taxis()) {
      const auto J = dense_jacobian(V_, dt);
      for (int r = 0; r < J.rows(); ++r) {
        double off = 0.0;
        for (int c = 0; c < J.cols(); ++c)
          if (c != r) off += std::abs(J(r, c));
        if (!(std::abs(J(r, r)) > off)) return false;
      }
      return true;
    }
    const auto T = tridiagonal_jacobian(V_, dt);
    for (std::size_t r = 0; r < T.size(); ++r)
      if (!(std::abs(T.diag[r]) > std::abs(T.lower[r]) + std::abs(T.upper[r]))) return false;
    return true;
  }

  const std::vector<double>& nodes() const { return V_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }

 private:
  std::vector<double> V_;
  const TaxisSource& taxis_;
  DiffusionLaw law_;
  double dw_;
  int M_, lo_, hi_;
  std::vector<double> factor_;
  std::vector<double> explicit_slope_;
};

}  // namespace

std::vector<double> newton_solve_stage1(const NewtonSystem& system, std::vector<double> x,
                                        const NewtonConfig& cfg, NewtonReport* report) {
  NewtonReport local;
  NewtonReport& rep = report ? *report : local;
  rep = {};
  std::vector<double> r, step;
  system.residual(x, r);
  const double r0 = sup_norm(r);
  rep.residuals.push_back(r0);
  if (!std::isfinite(r0)) throw SolverError(ErrorCode::Diverged, "non-finite initial residual");
  if (r0 <= cfg.tol) return x;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    if (!system.solve_jacobian(x, r, step))
      throw SolverError(ErrorCode::Diverged, "singular Jacobian at iteration " + std::to_string(it));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step[i];
    rep.iterations = it;
    rep.folded = all_finite(x) && system.admissible && !system.admissible(x);
    if (!all_finite(x) || rep.folded)
      throw SolverError(ErrorCode::Diverged, "inadmissible iterate at iteration " + std::to_string(it));
    system.residual(x, r);
    const double rn = sup_norm(r);
    rep.residuals.push_back(rn);
    if (rn <= cfg.tol) return x;
    if (!std::isfinite(rn) || rn > cfg.divergence_factor * r0)
      throw SolverError(ErrorCode::Diverged, "residual growth at iteration " + std::to_string(it));
  }
  throw SolverError(ErrorCode::Diverged, "no convergence in " + std::to_string(cfg.max_iter) + " iterations");
}

std::vector<double> eval_taxis_gradient(const TaxisSource& taxis, double dw,
                                        std::span<const double> positions) {
  switch (taxis.kind) {
    case TaxisSource::Kind::None:
      return std::vector<double>(positions.size(), 0.0);
    case TaxisSource::Kind::SplineField:
      return taxis.spline.derivative(positions);
    case TaxisSource::Kind::LogKernel: {
      auto S = log_kernel_sums(positions);
      for (double& s : S) s *= -dw / std::numbers::pi;
      return S;
    }
  }
  return {};
}

std::vector<double> taxis_factors(const InverseDistribution& V, const DiffusionLaw& law) {
  const int M = V.M();
  std::vector<double> f(static_cast<std::size_t>(M + 1), 1.0);
  if (law.kind != DiffusionKind::VolumeFilling) return f;
  const double dw = V.grid.dw();
  // The centred density estimate is zero at both end nodes.
  f.front() = 1.0;
  f.back() = 1.0;
  for (int j = 1; j < M; ++j) {
    const double rho_bar = 2.0 * dw / (V.nodes[j + 1] - V.nodes[j - 1]);
    f[static_cast<std::size_t>(j)] = 1.0 - std::pow(rho_bar, law.gamma);
  }
  return f;
}

InverseDistribution t_step(const InverseDistribution& V, const TaxisSource& taxis,
                           const DiffusionLaw& law, double dt, const NewtonConfig& cfg, Ends ends,
                           TransportDiagnostics* diag) {
  if (!V.strictly_increasing())
    throw SolverError(ErrorCode::NonMonotone, "transport step needs a strictly increasing V");
  const StageOperator op(V, taxis, law, ends);

  NewtonSystem system;
  system.residual = [&](std::span<const double> x, std::vector<double>& r) { op.residual(x, dt, r); };
  if (op.implicit_taxis()) {
    system.solve_jacobian = [&](std::span<const double> x, std::span<const double> r, std::vector<double>& step) {
      const auto J = op.dense_jacobian(op.full(x), dt);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
      const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
      const Eigen::VectorXd s = lu.solve(rhs);
      step.assign(s.data(), s.data() + s.size());
      return s.allFinite();
    };
  } else {
    system.solve_jacobian = [&](std::span<const double> x, std::span<const double> r, std::vector<double>& step) {
      return op.tridiagonal_jacobian(op.full(x), dt).solve(r, step);
    };
  }
  system.admissible = [&](std::span<const double> x) { return increasing(op.full(x)); };

  std::vector<double> stage;
  NewtonReport local;
  NewtonReport& rep = diag ? diag->newton : local;
  try {
    stage = op.full(newton_solve_stage1(system, op.free_part(V.nodes), cfg, &rep));
  } catch (const SolverError& e) {
    if (e.code() == ErrorCode::Diverged && rep.folded)
      throw SolverError(ErrorCode::NonMonotoneResult, std::string("implicit stage folded (") + e.what() + ")");
    if (e.code() == ErrorCode::Diverged)
      throw SolverError(ErrorCode::BlowupDetected, std::string("implicit stage diverged (") + e.what() + ")");
    throw;
  }

  const auto tax = op.taxis_term(stage, true);
  InverseDistribution out = V;
  for (int j = op.lo(); j <= op.hi(); ++j)
    out.nodes[j] = V.nodes[j] - dt * (op.diffusion(stage, j) + tax[j]);
  if (!out.strictly_increasing() || !all_finite(out.nodes))
    throw SolverError(ErrorCode::NonMonotoneResult, "transport step lost monotonicity");
  return out;
}

bool stage1_diagonally_dominant(const InverseDistribution& V, const TaxisSource& taxis,
                                const DiffusionLaw& law, double dt, Ends ends) {
  return StageOperator(V, taxis, law, ends).diagonally_dominant(dt);
}

double diagonal_dominance_dt(const InverseDistribution& V, const TaxisSource& taxis,
                             const DiffusionLaw& law, double dt_start, double dt_min, Ends ends) {
  // The stage-1 Jacobian at V is I + (dt/2) B, so B is formed once and each candidate dt
  // costs one pass over its row sums.
  const StageOperator op(V, taxis, law, ends);
  const Eigen::MatrixXd B = op.dense_jacobian(V.nodes, 2.0) - Eigen::MatrixXd::Identity(op.unknowns(), op.unknowns());
  const auto n = B.rows();
  std::vector<double> diag(static_cast<std::size_t>(n)), off(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index r = 0; r < n; ++r) {
    diag[static_cast<std::size_t>(r)] = B(r, r);
    for (Eigen::Index c = 0; c < n; ++c)
      if (c != r) off[static_cast<std::size_t>(r)] += std::abs(B(r, c));
  }
  double dt = dt_start;
  while (dt >= dt_min) {
    const double h = 0.5 * dt;
    bool ok = true;
    for (std::size_t r = 0; r < diag.size() && ok; ++r) ok = std::abs(1.0 + h * diag[r]) > h * off[r];
    if (ok) return dt;
    dt *= 0.5;
  }
  return 0.0;
}

}  // namespace mtfe
