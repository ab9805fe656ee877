#include "mergo/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mergo {

std::vector<std::size_t> const &allowed_cycle_lengths() {
  static std::vector<std::size_t> const lengths{1, 2, 3, 4, 5, 6, 8, 9, 10, 12};
  return lengths;
}

std::vector<std::size_t> random_permutation(Rng &rng, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  auto const &lengths = allowed_cycle_lengths();
  std::vector<std::size_t> perm(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t len = lengths[rng.index(lengths.size())];
    while (start + len > n)
      len = lengths[rng.index(lengths.size())];
    for (std::size_t k = 0; k < len; ++k)
      perm[order[start + k]] = order[start + (k + 1) % len];
    start += len;
  }
  return perm;
}

std::vector<double> orbit_constant_weights(Rng &rng, std::vector<std::size_t> const &perm) {
  std::size_t const n = perm.size();
  std::vector<double> w(n, 0.0);
  std::vector<bool> seen(n, false);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s])
      continue;
    double const mass = rng.uniform(0.1, 1.0);
    for (std::size_t x = s; !seen[x]; x = perm[x]) {
      seen[x] = true;
      w[x] = mass;
      total += mass;
    }
  }
  for (double &x : w)
    x /= total;
  return w;
}

Filtration random_filtration(Rng &rng, SpaceRef const &space, Direction direction,
                             std::size_t stages, std::size_t merges_per_stage) {
  if (stages == 0)
    throw Error("random_filtration needs at least one stage");
  std::size_t const n = space->size();
  if (merges_per_stage == 0)
    merges_per_stage = std::max<std::size_t>(1, (n - 1) / stages);

  std::vector<std::size_t> labels(n);
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  std::vector<Partition> chain;
  chain.emplace_back(space, labels);
  for (std::size_t k = 1; k < stages; ++k) {
    for (std::size_t m = 0; m < merges_per_stage; ++m) {
      std::vector<std::size_t> present = labels;
      std::sort(present.begin(), present.end());
      present.erase(std::unique(present.begin(), present.end()), present.end());
      if (present.size() < 2)
        break;
      std::size_t const a = rng.index(present.size());
      std::size_t b = rng.index(present.size() - 1);
      if (b >= a)
        ++b;
      std::size_t const from = present[b], to = present[a];
      for (auto &l : labels)
        if (l == from)
          l = to;
    }
    chain.emplace_back(space, labels);
  }
  if (direction == Direction::increasing)
    std::reverse(chain.begin(), chain.end());
  return Filtration(direction, std::move(chain));
}

VectorObservable random_observable(Rng &rng, SpaceRef const &space, std::size_t dim,
                                   std::string const &distribution, double a, double b) {
  std::size_t const n = space->size();
  std::vector<double> v(n * dim);
  if (distribution == "normal") {
    for (double &x : v)
      x = a + b * rng.normal();
  } else if (distribution == "uniform") {
    if (!(b > a))
      throw Error("uniform observable needs high > low");
    for (double &x : v)
      x = rng.uniform(a, b);
  } else if (distribution == "exponential") {
    if (!(a > 0.0))
      throw Error("exponential observable needs rate > 0");
    for (double &x : v) {
      double u = rng.uniform();
      while (u <= 0.0)
        u = rng.uniform();
      x = (rng.coin() ? 1.0 : -1.0) * (-std::log(u) / a);
    }
  } else if (distribution == "spikes") {
    for (std::size_t i = 0; i < n; ++i) {
      bool const spike = rng.coin(0.15);
      for (std::size_t j = 0; j < dim; ++j)
        v[i * dim + j] = spike ? 5.0 * b * rng.normal() : 0.0;
    }
  } else {
    throw Error("unknown observable distribution '" + distribution + "'");
  }
  return VectorObservable(space, dim, std::move(v));
}

BesicovitchWeights random_weights(Rng &rng, std::size_t max_terms, double envelope) {
  std::size_t const count = 1 + rng.index(std::max<std::size_t>(1, max_terms));
  std::vector<CosineTerm> terms(count);
  double total = 0.0;
  for (auto &t : terms) {
    std::size_t const den = 1 + rng.index(12);
    std::size_t const num = rng.index(den);
    t.frequency = static_cast<double>(num) / static_cast<double>(den);
    t.amplitude = rng.normal();
    if (t.amplitude == 0.0)
      t.amplitude = 1.0;
    t.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    total += std::abs(t.amplitude);
  }
  for (auto &t : terms)
    t.amplitude *= envelope / total;
  return BesicovitchWeights(std::move(terms));
}

namespace {

char const *pick_distribution(Rng &rng) {
  static char const *const names[] = {"normal", "uniform", "exponential", "spikes"};
  return names[rng.index(4)];
}

VectorObservable fuzz_observable(Rng &rng, SpaceRef const &space, std::size_t dim) {
  std::string const dist = pick_distribution(rng);
  if (dist == "uniform")
    return random_observable(rng, space, dim, dist, -2.0, 3.0);
  if (dist == "exponential")
    return random_observable(rng, space, dim, dist, 0.7, 0.0);
  return random_observable(rng, space, dim, dist, 0.0, rng.uniform(0.5, 4.0));
}

NormSpec fuzz_norm(Rng &rng, std::size_t dim) {
  if (dim == 1)
    return NormSpec(2.0);
  switch (rng.index(3)) {
  case 0:
    return NormSpec(1.0);
  case 1:
    return NormSpec::infinity();
  default:
    return NormSpec(2.0);
  }
}

} // namespace

ProcessSpec random_process(Rng &rng, Family family, ProcessKind kind, double p,
                           FuzzOptions const &opts) {
  bool const multi = family == Family::multiparameter;
  std::size_t const max_points = multi ? opts.max_multi_points : opts.max_points;
  std::size_t const n = 2 + rng.index(max_points - 1);
  std::size_t const dim = opts.dims[rng.index(opts.dims.size())];

  auto const perm = random_permutation(rng, n);
  SpaceRef const space = rng.coin() ? uniform_space(n)
                                    : make_space(orbit_constant_weights(rng, perm));
  Endomorphism const base(space, perm);
  VectorObservable f = fuzz_observable(rng, space, dim);
  NormSpec const norm = fuzz_norm(rng, dim);

  auto pick_direction = [&](bool must_decrease) {
    if (must_decrease)
      return Direction::decreasing;
    return rng.coin() ? Direction::decreasing : Direction::increasing;
  };

  if (!multi) {
    bool const weighted = family == Family::weighted;
    bool const must_decrease = kind == ProcessKind::martingale_ergodic || weighted;
    std::size_t const stages = 2 + rng.index(opts.max_stages - 1);
    Filtration filt = random_filtration(rng, space, pick_direction(must_decrease), stages);
    std::optional<BesicovitchWeights> w;
    if (weighted)
      w = random_weights(rng, 3, rng.uniform(0.2, 1.0));
    return ProcessSpec::single(kind, std::move(f), base, std::move(filt), std::move(w), norm);
  }

  if (std::floor(p) != p || p < 2.0)
    throw Error("multiparameter fuzz instances need an integer p >= 2");
  std::size_t const d_maps = 1 + rng.index(2);
  std::vector<Endomorphism> maps{base};
  if (d_maps == 2)
    maps.push_back(base.power(rng.index(static_cast<std::size_t>(base.period()) + 1)));
  std::size_t const m = static_cast<std::size_t>(p) + 1;
  std::vector<Filtration> filts;
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t const stages = m >= 4 ? 2 : 2 + rng.index(2);
    filts.push_back(random_filtration(rng, space, pick_direction(false), stages));
  }
  std::vector<BesicovitchWeights> weights;
  if (rng.coin())
    for (std::size_t j = 0; j < d_maps; ++j)
      weights.push_back(random_weights(rng, 2, rng.uniform(0.2, 1.0)));
  return ProcessSpec(kind, std::move(f), std::move(maps), std::move(filts), std::move(weights),
                     norm, true);
}

} // namespace mergo
