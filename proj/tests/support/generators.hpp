#pragma once

#include <cstdint>
#include <random>

#include "mgems/lp_solver.hpp"
#include "mgems/scenario.hpp"

namespace mgems::testing {

/// Seeded generator with distribution mappings independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 engine_;
};

/// Small LP with every variable boxed, so the feasible region is bounded.
/// `degenerate` favours integer data, zero right-hand sides and repeated rows.
lp::LpProblem random_bounded_lp(Rng& rng, bool degenerate);

/// 1-3 step scenario with O(1) powers, for brute-force comparisons.
Scenario random_short_scenario(Rng& rng);

/// Full-day scenario with c_st > 0, buy > sell and grid limits that never bind.
Scenario random_day_scenario(Rng& rng, std::size_t n_steps = 48);

/// Day scenario with all efficiencies equal to one.
Scenario random_lossless_day_scenario(Rng& rng, std::size_t n_steps = 48);

/// Two-step scenario from the worked example (S1).
Scenario scenario_s1();

}  // namespace mgems::testing
