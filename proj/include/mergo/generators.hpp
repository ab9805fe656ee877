#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mergo/averages.hpp"
#include "mergo/processes.hpp"
#include "mergo/random.hpp"

namespace mergo {

/// Cycle lengths the random maps draw from: the divisors of 360, so the joint
/// period of any generated map (and of its powers) divides 360.
std::vector<std::size_t> const &allowed_cycle_lengths();

/// Random permutation: shuffled points cut into cycles with allowed lengths.
std::vector<std::size_t> random_permutation(Rng &rng, std::size_t n);

/// Positive weights, constant along the cycles of `perm`, summing to one.
std::vector<double> orbit_constant_weights(Rng &rng, std::vector<std::size_t> const &perm);

/// Decreasing chain starting at singletons; each step merges `merges_per_stage`
/// uniformly chosen pairs of blocks. For increasing chains the stages are reversed.
Filtration random_filtration(Rng &rng, SpaceRef const &space, Direction direction,
                             std::size_t stages, std::size_t merges_per_stage = 0);

/// Distributions: "normal" (mean, stddev), "uniform" (low, high),
/// "exponential" (rate, random signs), "spikes" (a few large entries, others 0).
VectorObservable random_observable(Rng &rng, SpaceRef const &space, std::size_t dim,
                                   std::string const &distribution, double a = 0.0,
                                   double b = 1.0);

/// 1..max_terms cosine terms with rational frequencies a/b, b <= 12, and
/// total amplitude sum |amp| = envelope.
BesicovitchWeights random_weights(Rng &rng, std::size_t max_terms, double envelope);

/// Random instance for fuzzing the inequality suites.
struct FuzzOptions {
  std::size_t max_points = 64;
  std::size_t max_multi_points = 32;
  std::vector<std::size_t> dims{1, 2, 4};
  std::size_t max_stages = 5;
};

ProcessSpec random_process(Rng &rng, Family family, ProcessKind kind, double p,
                           FuzzOptions const &opts = {});

} // namespace mergo
