#include "mtfe/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "mtfe/config.hpp"
#include "mtfe/error.hpp"

namespace mtfe {

namespace {

SimState final_state(const ModelSpec& model, double t_end, double dt) {
  TimeController ctl = TimeController::for_model(model);
  ctl.t_end = t_end;
  ctl.snapshot_times.clear();
  ctl.fixed_dt = dt;
  auto r = Simulation(model).run(ctl);
  if (r.blowup) throw SolverError(ErrorCode::BlowupDetected, r.blowup->message);
  return std::move(r.snapshots.back());
}

FvfdConfig with_cells(int n) {
  FvfdConfig c;
  c.N_cells = n;
  return c;
}

int max_nodes_per_cell(const InverseDistribution& V, const EulerGrid& g) {
  std::vector<int> count(static_cast<std::size_t>(g.N), 0);
  for (double v : V.nodes) {
    for (int i = 0; i < g.N; ++i)
      if (g.node(i) <= v && v <= g.node(i + 1)) ++count[static_cast<std::size_t>(i)];
  }
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw SolverError(ErrorCode::ConfigError, "bad CSV number '" + s + "'");
  return v;
}

template <class Row, class F>
std::vector<Row> parse_rows(std::string_view text, std::size_t columns, F make) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Row> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto cells = csv_split(line);
    if (cells.size() != columns) throw SolverError(ErrorCode::ConfigError, "CSV row has wrong width: " + line);
    rows.push_back(make(cells));
  }
  return rows;
}

}  // namespace

double error_V(const InverseDistribution& coarse, const InverseDistribution& fine) {
  const int M = coarse.M();
  if (fine.M() != 2 * M)
    throw SolverError(ErrorCode::ResolutionMismatch, "fine solution has " + std::to_string(fine.M()) +
                                                          " cells, expected " + std::to_string(2 * M));
  double e = 0.0;
  for (int j = 1; j < M; ++j) e += std::abs(coarse.nodes[j] - fine.nodes[2 * j]);
  return e / M;
}

std::vector<double> eoc(const std::vector<double>& errors) {
  if (errors.size() < 2) throw SolverError(ErrorCode::NonPositiveError, "EOC needs at least two errors");
  for (double e : errors)
    if (!(e > 0.0)) throw SolverError(ErrorCode::NonPositiveError, "EOC needs positive errors");
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) out.push_back(std::log2(errors[k] / errors[k + 1]));
  return out;
}

double error_rho(const PiecewiseConstantDensity& coarse, const PiecewiseConstantDensity& fine) {
  const auto proj = project_to_grid(fine, coarse.interfaces);
  double e = 0.0;
  for (int j = 0; j < coarse.cells(); ++j)
    e += std::abs(coarse.values[j] - proj[j]) * (coarse.interfaces[j + 1] - coarse.interfaces[j]);
  return e;
}

double error_temporal(const InverseDistribution& a, const InverseDistribution& b) {
  const int M = a.M();
  if (b.M() != M) throw SolverError(ErrorCode::ResolutionMismatch, "temporal error needs equal M");
  double e = 0.0;
  for (int j = 1; j < M; ++j) e += std::abs(a.nodes[j] - b.nodes[j]);
  return e / M;
}

double windowed_l1(const PiecewiseConstantDensity& density, const PiecewiseConstantDensity& reference, double lo,
                   double hi) {
  const auto proj = project_to_grid(reference, density.interfaces);
  double e = 0.0;
  for (int j = 0; j < density.cells(); ++j) {
    const double l = std::max(lo, density.interfaces[j]), r = std::min(hi, density.interfaces[j + 1]);
    if (r > l) e += std::abs(density.values[j] - proj[j]) * (r - l);
  }
  return e;
}

EocLadder spatial_ladder(const ModelSpec& model, const std::vector<int>& Ms, double dt, double t_end) {
  EocLadder L;
  L.mode = LadderMode::Spatial;
  L.resolutions = Ms;
  std::vector<std::future<SimState>> jobs;
  for (int M : Ms) {
    ModelSpec m = model;
    m.M = M;
    m.N = m.attractant == AttractantKind::LogKernel ? 0 : M;
    L.dts.push_back(dt);
    jobs.push_back(std::async(std::launch::async, [m, t_end, dt] { return final_state(m, t_end, dt); }));
  }
  std::vector<SimState> runs;
  for (auto& j : jobs) runs.push_back(j.get());
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
    L.errors_V.push_back(error_V(runs[k].V, runs[k + 1].V));
    L.errors_rho.push_back(error_rho(reconstruct_density(runs[k].V), reconstruct_density(runs[k + 1].V)));
    if (model.attractant != AttractantKind::LogKernel) {
      ModelSpec m = model;
      m.N = Ms[k];
      L.max_nodes_per_fe_cell.push_back(max_nodes_per_cell(runs[k].V, m.euler_grid()));
    }
  }
  if (L.errors_V.size() >= 2) {
    L.eoc_V = eoc(L.errors_V);
    L.eoc_rho = eoc(L.errors_rho);
  }
  return L;
}

EocLadder temporal_ladder(const ModelSpec& model, int M, const std::vector<double>& dts, double t_end) {
  EocLadder L;
  L.mode = LadderMode::Temporal;
  L.resolutions = {M};
  L.dts = dts;
  ModelSpec m = model;
  m.M = M;
  m.N = m.attractant == AttractantKind::LogKernel ? 0 : M;
  std::vector<std::future<SimState>> jobs;
  for (double dt : dts)
    jobs.push_back(std::async(std::launch::async, [m, t_end, dt] { return final_state(m, t_end, dt); }));
  std::vector<SimState> runs;
  for (auto& j : jobs) runs.push_back(j.get());
  for (std::size_t k = 0; k + 1 < runs.size(); ++k) L.errors_V.push_back(error_temporal(runs[k].V, runs[k + 1].V));
  if (L.errors_V.size() >= 2) L.eoc_V = eoc(L.errors_V);
  return L;
}

std::vector<RunRecord> compare_efficiency(const ModelSpec& model, const std::vector<int>& S,
                                          const EfficiencyOptions& opt) {
  using clock = std::chrono::steady_clock;
  const int smax = S.empty() ? 0 : *std::max_element(S.begin(), S.end());
  const int ref_cells = opt.reference_cells > 0 ? opt.reference_cells : 2 * opt.fvfd_factor * smax;
  const PiecewiseConstantDensity reference = fvfd_run(model, with_cells(ref_cells), opt.t_end).density();

  auto timed = [&](const std::string& method, int res) {
    RunRecord r;
    r.preset = model.name;
    r.method = method;
    r.resolution = res;
    try {
      std::vector<double> dts;
      PiecewiseConstantDensity d;
      const auto t0 = clock::now();
      if (method == "mtfe") {
        ModelSpec m = model;
        m.M = res;
        m.N = res;
        m.snapshots.clear();
        TimeController ctl = TimeController::for_model(m);
        ctl.t_end = opt.t_end;
        auto run = Simulation(m).run(ctl);
        r.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
        if (run.blowup) throw SolverError(ErrorCode::BlowupDetected, run.blowup->message);
        const auto& s = run.snapshots.back();
        r.steps = s.step_count;
        r.newton_iters = s.newton_iters;
        dts = s.dt_history;
        d = reconstruct_density(s.V);
      } else {
        auto run = fvfd_run(model, with_cells(res), opt.t_end);
        r.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
        r.steps = run.steps;
        d = run.density();
      }
      r.error = windowed_l1(d, reference, opt.window_lo, opt.window_hi);
      if (!dts.empty()) {
        r.dt_min = *std::min_element(dts.begin(), dts.end());
        r.dt_max = *std::max_element(dts.begin(), dts.end());
        double sum = 0.0;
        for (double v : dts) sum += v;
        r.dt_mean = sum / static_cast<double>(dts.size());
      }
    } catch (const SolverError& e) {
      r.status = std::string(to_string(e.code()));
    }
    return r;
  };

  // Rows run one after another so that wall times are not distorted by contention.
  std::vector<RunRecord> rows;
  for (int M : S) rows.push_back(timed("mtfe", M));
  for (int M : S) rows.push_back(timed("fvfd", opt.fvfd_factor * M));
  std::stable_sort(rows.begin(), rows.end(), [](const RunRecord& a, const RunRecord& b) {
    return a.method != b.method ? a.method > b.method : a.resolution < b.resolution;
  });
  return rows;
}

double mtfe_wins_at_equal_time(const std::vector<RunRecord>& rows) {
  std::vector<std::pair<double, double>> base;  // (log time, log error)
  for (const auto& r : rows)
    if (r.method == "fvfd" && r.status == "ok" && r.error > 0.0 && r.wall_seconds > 0.0)
      base.emplace_back(std::log(r.wall_seconds), std::log(r.error));
  std::sort(base.begin(), base.end());
  if (base.size() < 2) return 0.0;
  // Spending less time than the cheapest baseline run cannot buy a smaller error, so the baseline
  // is held flat there; a straight log-log extrapolation runs past any error the solution allows.
  auto baseline_at = [&](double lt) {
    if (lt <= base.front().first) return base.front().second;
    std::size_t k = 0;
    while (k + 2 < base.size() && lt > base[k + 1].first) ++k;
    const auto [x0, y0] = base[k];
    const auto [x1, y1] = base[k + 1];
    return x1 == x0 ? y0 : y0 + (y1 - y0) * (lt - x0) / (x1 - x0);
  };
  int total = 0, wins = 0;
  for (const auto& r : rows) {
    if (r.method != "mtfe" || r.status != "ok") continue;
    ++total;
    if (r.wall_seconds > 0.0 && r.error > 0.0 && std::log(r.error) <= baseline_at(std::log(r.wall_seconds))) ++wins;
  }
  return total ? static_cast<double>(wins) / total : 0.0;
}

std::vector<std::size_t> prominent_peaks(const std::vector<double>& v, double min_prominence) {
  std::vector<std::size_t> peaks;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || v[i] > v[i - 1];
    // Plateaus count once, at their left end.
    std::size_t r = i;
    while (r + 1 < n && v[r + 1] == v[i]) ++r;
    const bool right_ok = r + 1 == n || v[r + 1] < v[i];
    if (!left_ok || !right_ok || (i == 0 && r + 1 == n)) continue;
    double left_min = v[i], right_min = v[i];
    for (std::size_t k = i; k-- > 0;) {
      if (v[k] > v[i]) break;
      left_min = std::min(left_min, v[k]);
    }
    for (std::size_t k = r + 1; k < n; ++k) {
      if (v[k] > v[i]) break;
      right_min = std::min(right_min, v[k]);
    }
    if (v[i] - std::max(left_min, right_min) >= min_prominence) peaks.push_back(i);
  }
  return peaks;
}

std::string state_csv(const std::vector<SimState>& states) {
  std::string out = "t,j,w_j,V_j,rho_j\n";
  for (const auto& s : states) {
    const int M = s.V.M();
    const auto rho = reconstruct_density(s.V);
    for (int j = 0; j <= M; ++j) {
      out += format_double(s.t) + "," + std::to_string(j) + "," + format_double(static_cast<double>(j) / M) + "," +
             format_double(s.V.nodes[j]) + "," + format_double(j == 0 ? 0.0 : rho.values[j - 1]) + "\n";
    }
  }
  return out;
}

std::string fields_csv(const std::vector<SimState>& states, const ModelSpec& model) {
  std::string out = "t,k,x_k";
  for (const auto& f : model.fields) out += "," + f.name;
  out += "\n";
  if (model.fields.empty()) return out;
  const EulerGrid g = model.euler_grid();
  for (const auto& s : states) {
    std::vector<std::vector<double>> nodal;
    for (const auto& f : s.fields.fields) nodal.push_back(f.node_values());
    for (int k = 0; k <= g.N; ++k) {
      out += format_double(s.t) + "," + std::to_string(k) + "," + format_double(g.node(k));
      for (const auto& n : nodal) out += "," + format_double(n[k]);
      out += "\n";
    }
  }
  return out;
}

std::string records_csv(const std::vector<RunRecord>& rows) {
  std::string out = "preset,method,resolution,wall_seconds,error,steps,newton_iters,dt_min,dt_max,dt_mean,status\n";
  for (const auto& r : rows)
    out += r.preset + "," + r.method + "," + std::to_string(r.resolution) + "," + format_double(r.wall_seconds) + "," +
           format_double(r.error) + "," + std::to_string(r.steps) + "," + std::to_string(r.newton_iters) + "," +
           format_double(r.dt_min) + "," + format_double(r.dt_max) + "," + format_double(r.dt_mean) + "," + r.status +
           "\n";
  return out;
}

std::string ladder_csv(const EocLadder& L) {
  std::string out = L.mode == LadderMode::Spatial ? "M_coarse,M_fine,dt,error_V,eoc_V,error_rho,eoc_rho\n"
                                                  : "M,dt_coarse,dt_fine,error_V,eoc_V\n";
  for (std::size_t k = 0; k < L.errors_V.size(); ++k) {
    const std::string eV = k > 0 && k - 1 < L.eoc_V.size() ? format_double(L.eoc_V[k - 1]) : "";
    if (L.mode == LadderMode::Spatial) {
      const std::string er = k > 0 && k - 1 < L.eoc_rho.size() ? format_double(L.eoc_rho[k - 1]) : "";
      out += std::to_string(L.resolutions[k]) + "," + std::to_string(L.resolutions[k + 1]) + "," +
             format_double(L.dts[k]) + "," + format_double(L.errors_V[k]) + "," + eV + "," +
             format_double(L.errors_rho[k]) + "," + er + "\n";
    } else {
      out += std::to_string(L.resolutions[0]) + "," + format_double(L.dts[k]) + "," + format_double(L.dts[k + 1]) +
             "," + format_double(L.errors_V[k]) + "," + eV + "\n";
    }
  }
  return out;
}

std::vector<StateRow> parse_state_csv(std::string_view text) {
  return parse_rows<StateRow>(text, 5, [](const std::vector<std::string>& c) {
    return StateRow{to_double(c[0]), std::stoi(c[1]), to_double(c[2]), to_double(c[3]), to_double(c[4])};
  });
}

std::vector<RunRecord> parse_records_csv(std::string_view text) {
  return parse_rows<RunRecord>(text, 11, [](const std::vector<std::string>& c) {
    RunRecord r;
    r.preset = c[0];
    r.method = c[1];
    r.resolution = std::stoi(c[2]);
    r.wall_seconds = to_double(c[3]);
    r.error = to_double(c[4]);
    r.steps = std::stol(c[5]);
    r.newton_iters = std::stol(c[6]);
    r.dt_min = to_double(c[7]);
    r.dt_max = to_double(c[8]);
    r.dt_mean = to_double(c[9]);
    r.status = c[10];
    return r;
  });
}

}  // namespace mtfe
