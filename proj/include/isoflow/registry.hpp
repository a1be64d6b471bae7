#pragma once

#include <string>
#include <vector>

#include "isoflow/scenario.hpp"

namespace isoflow {

struct RegistryEntry {
  std::string name;
  std::string text;
};

/// Built-in scenarios; the same texts ship as scenarios/<name>.cfg.
inline const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries{
      {"existence-uniqueness", R"cfg(# Bounded data, degenerate medium: the fixed-point (Picard) solver on short windows.
name = existence-uniqueness
class = check

[kernel]
family = gaussian
sigma = 1

[medium]
family = power-decay
amplitude = 1
exponent = 2

[grid]
dim = 1
half_extent = 10
points = 101

[initial]
family = gaussian-bump
amplitude = 1
width = 1

[solver]
scheme = picard-oracle
dt = 0.002
t_end = 1
boundary = mask
snapshot_every = 50
picard_tol = 1e-12

[outputs]
lp_p = 2
lp_radius = 5
)cfg"},
      {"isothermalization", R"cfg(# Integrable medium: u(x, t) -> E_rho(u0).
name = isothermalization
class = check

[kernel]
family = gaussian
sigma = 1

[medium]
family = power-decay
amplitude = 1
exponent = 2

[grid]
dim = 1
half_extent = 50
points = 1001

[initial]
family = gaussian-bump
amplitude = 1
width = 1

[solver]
scheme = exponential
dt = 0.05
t_end = 500
boundary = mask
snapshot_every = 200

[outputs]
weighted_mean = true
lp_p = 2
lp_radius = 5
)cfg"},
      {"flux-decay", R"cfg(# Non-integrable medium, compact data: u(x, t) -> 0.
name = flux-decay
class = check

[kernel]
family = gaussian
sigma = 1

[medium]
family = constant
value = 1

[grid]
dim = 1
half_extent = 50
points = 1001

[initial]
family = gaussian-bump
amplitude = 1
width = 1

[solver]
scheme = exponential
dt = 0.05
t_end = 30
boundary = mask
snapshot_every = 20

[outputs]
lp_p = 2
lp_radius = 5
)cfg"},
      {"quadratic-growth", R"cfg(# Data growing like |x|^2 under rho >= eta / (1 + |x|): minimal solution by truncation and flooring.
name = quadratic-growth
class = check

[kernel]
family = gaussian
sigma = 1

[medium]
family = power-decay
amplitude = 1
exponent = 1

[grid]
dim = 1
half_extent = 50
points = 1001

[initial]
family = quadratic
amplitude = 1

[solver]
scheme = exponential
dt = 0.05
t_end = 10
boundary = mask
snapshot_every = 20
approx_n = 12 16 20 24

[outputs]
lp_p = 2
lp_radius = 5
)cfg"},
      {"unbounded-isothermalization", R"cfg(# Unbounded data in L1(rho), integrable medium: u(x, t) -> E_rho(u0).
name = unbounded-isothermalization
class = check

[kernel]
family = gaussian
sigma = 1

[medium]
family = power-decay
amplitude = 1
exponent = 2

[grid]
dim = 1
half_extent = 50
points = 1001

[initial]
family = power-growth
amplitude = 1
exponent = 0.5

[solver]
scheme = exponential
dt = 0.05
t_end = 200
boundary = mask
snapshot_every = 200
approx_n = 12 16 20 24

[outputs]
weighted_mean = true
lp_p = 2
lp_radius = 5
)cfg"},
      {"infinite-isothermalization", R"cfg(# Integrable medium, u0 = 1 + |x|^2 not in L1(rho): u_n(0, t) grows without bound in n.
name = infinite-isothermalization
class = check

[kernel]
family = gaussian
sigma = 1

[medium]
family = power-decay
amplitude = 1
exponent = 2

[grid]
dim = 1
half_extent = 50
points = 1001

[initial]
family = quadratic
amplitude = 1

[solver]
scheme = exponential
dt = 0.05
t_end = 200
boundary = mask
snapshot_every = 200
approx_n = 12 16 20 24

[outputs]
lp_p = 2
lp_radius = 5
)cfg"},
      {"open-problem-explore", R"cfg(# Non-integrable medium with data outside L1(rho). Output only; nothing is asserted.
name = open-problem-explore
class = explore

[kernel]
family = gaussian
sigma = 1

[medium]
family = constant
value = 1

[grid]
dim = 1
half_extent = 50
points = 1001

[initial]
family = quadratic
amplitude = 1

[solver]
scheme = exponential
dt = 0.05
t_end = 20
boundary = mask
snapshot_every = 20
approx_n = 12 16 20 24

[outputs]
lp_p = 2
lp_radius = 5
)cfg"},
  };
  return entries;
}

inline const RegistryEntry* find_registered(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return &e;
  return nullptr;
}

inline Scenario registered_scenario(const std::string& name) {
  const RegistryEntry* e = find_registered(name);
  if (!e) throw ConfigError("no built-in scenario named '" + name + "'");
  return parse_scenario_text(e->text);
}

}  // namespace isoflow
