#pragma once

#include <vector>

#include "abep/model.hpp"

namespace abep {

struct SingleAbsorption {
  double p_left = 0.0;
  double p_right = 0.0;
};

// Closed form for one dual particle started at site i. For the alpha coupling
// this is the linear profile p_right = i/(N+1); for unit coupling
// p_right = (i + alpha - 1)/(N + 2 alpha - 1).
SingleAbsorption single_absorption(int i, const SystemParams& p);

// Same quantity from a linear solve of the one-particle harmonic equations.
SingleAbsorption single_absorption_solve(int i, const SystemParams& p);

struct AbsorptionResult {
  double p_both_left = 0.0;
  double p_both_right = 0.0;
  double p_split = 0.0;

  double sum() const { return p_both_left + p_both_right + p_split; }
};

// Exact absorption probabilities of two SIP particles started at sites
// i <= j, from the generator on unordered pair states.
AbsorptionResult two_particle_solve(int i, int j, const SystemParams& p);

// All pairs from one factorisation: entry [i-1][j-1] for 1 <= i <= j <= N
// (entries with j < i mirror [j-1][i-1]).
std::vector<std::vector<AbsorptionResult>> two_particle_table(
    const SystemParams& p);

// Displayed closed forms (alpha coupling only; ParameterError otherwise).
// The split probability uses the general (1 + alpha(N+1)) j coefficient on
// the diagonal as well.
AbsorptionResult two_particle_closed_form(int i, int j, const SystemParams& p);

}  // namespace abep
