#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mgems/tariff.hpp"

namespace mgems::testing {

namespace {

struct Hyperplane {
  std::vector<double> a;
  double b;
};

// Gaussian elimination with full row pivoting; nullopt when (near) singular.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a,
                                                std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    }
    if (std::abs(a[p][k]) < 1e-11) return std::nullopt;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = a[i][k] / a[k][k];
      for (std::size_t c = k; c < n; ++c) a[i][c] -= f * a[k][c];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

bool feasible_point(const lp::LpProblem& p, const std::vector<double>& x, double tol) {
  for (const auto& c : p.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < p.n_vars; ++j) lhs += c.coeffs[j] * x[j];
    const double scale = 1.0 + std::abs(c.rhs);
    if (c.relation == lp::Relation::less_equal && lhs > c.rhs + tol * scale) return false;
    if (c.relation == lp::Relation::greater_equal && lhs < c.rhs - tol * scale) return false;
    if (c.relation == lp::Relation::equal && std::abs(lhs - c.rhs) > tol * scale) return false;
  }
  for (std::size_t j = 0; j < p.n_vars; ++j) {
    const lp::Bound b = p.bounds.empty() ? lp::Bound{} : p.bounds[j];
    if (x[j] < b.lower - tol * (1.0 + std::abs(b.lower))) return false;
    if (x[j] > b.upper + tol * (1.0 + std::abs(b.upper))) return false;
  }
  return true;
}

}  // namespace

VertexOracleResult enumerate_vertices(const lp::LpProblem& problem, double tol) {
  const std::size_t n = problem.n_vars;
  // Equalities are always active, so any vertex has n independent active
  // hyperplanes drawn from the full set; the feasibility check enforces them.
  std::vector<Hyperplane> optional;
  for (const auto& c : problem.constraints) optional.push_back({c.coeffs, c.rhs});
  for (std::size_t j = 0; j < n; ++j) {
    const lp::Bound b = problem.bounds.empty() ? lp::Bound{} : problem.bounds[j];
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    optional.push_back({e, b.lower});
    if (std::isfinite(b.upper)) optional.push_back({e, b.upper});
  }

  VertexOracleResult result;
  const std::size_t need = n;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (pick.size() == need) {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (auto k : pick) {
        a.push_back(optional[k].a);
        b.push_back(optional[k].b);
      }
      auto x = solve_square(std::move(a), std::move(b));
      if (!x || !feasible_point(problem, *x, tol)) return;
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += problem.objective[j] * (*x)[j];
      if (!result.feasible || obj < result.best_objective) {
        result.best_objective = obj;
        result.best_x = *x;
      }
      result.feasible = true;
      result.vertices.push_back(std::move(*x));
      return;
    }
    for (std::size_t k = start; k < optional.size(); ++k) {
      pick.push_back(k);
      rec(k + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return result;
}

std::optional<double> dispatch_cost(const Scenario& s, const std::vector<double>& p_st) {
  const auto& b = s.battery;
  const double dt = s.time.step_hours;
  const double c_st = ageing_unit_cost(s.ageing, b.e_nom);
  double soe = b.soe_init;
  double cost = 0.0;
  for (std::size_t t = 0; t < p_st.size(); ++t) {
    const double dis = std::max(p_st[t], 0.0);
    const double ch = std::min(p_st[t], 0.0);
    if (dis > b.p_discharge_max * b.eta_cvs + 1e-12) return std::nullopt;
    if (ch < b.p_charge_max / (b.eta_cvs * b.eta_e) - 1e-12) return std::nullopt;
    soe += -dis * dt / (b.eta_cvs * b.e_nom) - ch * b.eta_cvs * b.eta_e * dt / b.e_nom;
    if (soe < b.soe_min - 1e-12 || soe > b.soe_max + 1e-12) return std::nullopt;
    const double pg = s.load.values[t] - s.pv.values[t] - p_st[t];
    if (pg > s.grid.p_buy_max + 1e-12 || pg < s.grid.p_sell_max - 1e-12) return std::nullopt;
    const double price = pg > 0.0 ? buy_price(s.tariff, t, s.time) : s.tariff.sell;
    cost += dt * (price * pg + c_st * std::abs(p_st[t]));
  }
  if (s.terminal_soe && soe < *s.terminal_soe - 1e-12) return std::nullopt;
  return cost;
}

DispatchOracleResult brute_force_dispatch(const Scenario& s, double resolution, bool breakpoints) {
  const auto& b = s.battery;
  const double dt = s.time.step_hours;
  const double lo = b.p_charge_max / (b.eta_cvs * b.eta_e);
  const double hi = b.p_discharge_max * b.eta_cvs;
  const std::size_t n = s.time.n_steps;

  std::vector<double> grid;
  for (double k = std::ceil(lo / resolution - 1e-9); k * resolution <= hi + 1e-9; k += 1.0) {
    grid.push_back(std::clamp(k * resolution, lo, hi));
  }

  DispatchOracleResult best;
  std::vector<double> path;
  std::function<void(std::size_t, double)> rec = [&](std::size_t t, double soe) {
    if (t == n) {
      auto cost = dispatch_cost(s, path);
      if (cost && (!best.feasible || *cost < best.best_cost)) {
        best.feasible = true;
        best.best_cost = *cost;
        best.best_p_st = path;
      }
      return;
    }
    std::vector<double> cands = grid;
    if (breakpoints) {
      const double net = s.load.values[t] - s.pv.values[t];
      cands.insert(cands.end(), {0.0, lo, hi, net, net - s.grid.p_buy_max, net - s.grid.p_sell_max});
      for (double target : {b.soe_min, b.soe_max}) {
        const double delta = target - soe;  // required SoE change
        cands.push_back(-delta * b.eta_cvs * b.e_nom / dt);               // discharge branch
        cands.push_back(-delta * b.e_nom / (b.eta_cvs * b.eta_e * dt));  // charge branch
      }
      if (s.terminal_soe && t + 1 == n) {
        const double delta = *s.terminal_soe - soe;
        cands.push_back(-delta * b.eta_cvs * b.e_nom / dt);
        cands.push_back(-delta * b.e_nom / (b.eta_cvs * b.eta_e * dt));
      }
    }
    for (double p : cands) {
      if (p < lo - 1e-12 || p > hi + 1e-12) continue;
      const double dis = std::max(p, 0.0);
      const double ch = std::min(p, 0.0);
      const double next =
          soe - dis * dt / (b.eta_cvs * b.e_nom) - ch * b.eta_cvs * b.eta_e * dt / b.e_nom;
      if (next < b.soe_min - 1e-12 || next > b.soe_max + 1e-12) continue;
      const double pg = s.load.values[t] - s.pv.values[t] - p;
      if (pg > s.grid.p_buy_max + 1e-12 || pg < s.grid.p_sell_max - 1e-12) continue;
      path.push_back(p);
      rec(t + 1, next);
      path.pop_back();
    }
  };
  rec(0, b.soe_init);
  return best;
}

}  // namespace mgems::testing
