#include "mergo/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mergo {

char const *to_string(ProcessKind k) {
  return k == ProcessKind::martingale_ergodic ? "martingale_ergodic" : "ergodic_martingale";
}

char const *to_string(Family f) {
  switch (f) {
  case Family::plain:
    return "plain";
  case Family::weighted:
    return "weighted";
  case Family::multiparameter:
    return "multiparameter";
  }
  return "?";
}

ProcessSpec::ProcessSpec(ProcessKind kind, VectorObservable f, std::vector<Endomorphism> maps,
                         std::vector<Filtration> filtrations,
                         std::vector<BesicovitchWeights> weights, NormSpec norm,
                         bool multiparameter)
    : kind_(kind), f_(std::move(f)), maps_(std::move(maps)), filtrations_(std::move(filtrations)),
      norm_(norm), weighted_(!weights.empty()) {
  if (maps_.empty())
    throw Error("process needs at least one map");
  if (filtrations_.empty())
    throw Error("process needs at least one filtration");
  for (auto const &m : maps_)
    require_same_space(f_.space(), m.space(), "process map");
  for (auto const &fl : filtrations_)
    require_same_space(f_.space(), fl.space(), "process filtration");
  if (weighted_ && weights.size() != maps_.size())
    throw Error("process has " + std::to_string(weights.size()) + " weight sequences for " +
                std::to_string(maps_.size()) + " maps");
  weights_ = weighted_ ? std::move(weights)
                       : std::vector<BesicovitchWeights>(maps_.size(), BesicovitchWeights::unit());

  if (multiparameter || maps_.size() > 1 || filtrations_.size() > 1)
    family_ = Family::multiparameter;
  else
    family_ = weighted_ ? Family::weighted : Family::plain;
}

ProcessSpec ProcessSpec::single(ProcessKind kind, VectorObservable f, Endomorphism map,
                                Filtration filtration, std::optional<BesicovitchWeights> weights,
                                NormSpec norm) {
  std::vector<BesicovitchWeights> w;
  if (weights)
    w.push_back(std::move(*weights));
  return ProcessSpec(kind, std::move(f), {std::move(map)}, {std::move(filtration)}, std::move(w),
                     norm, false);
}

ProcessSpec ProcessSpec::multi(ProcessKind kind, VectorObservable f, MultiParamSpec const &spec,
                               bool weighted, NormSpec norm) {
  return ProcessSpec(kind, std::move(f), spec.maps(), spec.filtrations(),
                     weighted ? spec.weight_seqs() : std::vector<BesicovitchWeights>{}, norm,
                     true);
}

std::uint64_t ProcessSpec::period() const {
  std::uint64_t p = 1;
  for (auto const &m : maps_) {
    std::uint64_t const q = m.period();
    std::uint64_t const g = std::gcd(p, q);
    if (p / g > std::numeric_limits<std::uint64_t>::max() / q)
      throw Error("joint period of the maps overflows 64 bits");
    p = p / g * q;
  }
  return p;
}

std::size_t ProcessSpec::max_stage_count() const {
  std::size_t m = 0;
  for (auto const &f : filtrations_)
    m = std::max(m, f.stage_count());
  return m;
}

ProcessSpec ProcessSpec::with_observable(VectorObservable f) const {
  ProcessSpec out = *this;
  require_same_space(f.space(), f_.space(), "with_observable");
  out.f_ = std::move(f);
  return out;
}

ProcessSpec ProcessSpec::with_kind(ProcessKind kind) const {
  ProcessSpec out = *this;
  out.kind_ = kind;
  return out;
}

namespace {

VectorObservable average_part(ProcessSpec const &spec, VectorObservable const &g,
                              std::vector<std::size_t> const &n) {
  static std::vector<BesicovitchWeights> const none;
  return multi_average(g, spec.maps(), spec.weighted() ? spec.weights() : none, n);
}

} // namespace

VectorObservable evaluate(ProcessSpec const &spec, ProcessIndex const &index) {
  if (index.n.size() != spec.maps().size())
    throw Error("process index has " + std::to_string(index.n.size()) + " lengths for " +
                std::to_string(spec.maps().size()) + " maps");
  if (spec.kind() == ProcessKind::martingale_ergodic)
    return composite_cond_expect(average_part(spec, spec.f(), index.n), spec.filtrations(),
                                 index.s);
  return average_part(spec, composite_cond_expect(spec.f(), spec.filtrations(), index.s),
                      index.n);
}

ProcessIndex broadcast_index(ProcessSpec const &spec, std::size_t n1, std::size_t n2) {
  if (n2 >= spec.max_stage_count())
    throw Error("stage index " + std::to_string(n2) + " out of range (longest filtration has " +
                std::to_string(spec.max_stage_count()) + " stages)");
  ProcessIndex idx;
  idx.n.assign(spec.maps().size(), n1);
  for (auto const &f : spec.filtrations())
    idx.s.push_back(std::min(n2, f.stage_count() - 1));
  return idx;
}

VectorObservable evaluate(ProcessSpec const &spec, std::size_t n1, std::size_t n2) {
  return evaluate(spec, broadcast_index(spec, n1, n2));
}

VectorObservable limit_target(ProcessSpec const &spec) {
  double scale = 1.0;
  if (spec.weighted()) {
    for (auto const &w : spec.weights()) {
      if (!w.is_constant())
        throw Error("no closed-form target for non-constant weights; use trace stabilization");
      scale *= w(0);
    }
  }
  VectorObservable out =
      spec.kind() == ProcessKind::martingale_ergodic
          ? composite_limit(iterated_limit(spec.f(), spec.maps()), spec.filtrations())
          : iterated_limit(composite_limit(spec.f(), spec.filtrations()), spec.maps());
  if (scale != 1.0)
    out *= scale;
  return out;
}

std::vector<std::size_t> default_n1_grid(ProcessSpec const &spec) {
  std::uint64_t const period = spec.period();
  std::vector<std::size_t> grid;
  for (std::uint64_t n = 1; n < period; n *= 2)
    grid.push_back(static_cast<std::size_t>(n));
  for (std::uint64_t k = 1; k <= 4; ++k)
    grid.push_back(static_cast<std::size_t>(k * period));
  return grid;
}

std::vector<std::size_t> default_n2_grid(ProcessSpec const &spec) {
  std::vector<std::size_t> grid(spec.max_stage_count());
  std::iota(grid.begin(), grid.end(), std::size_t{0});
  return grid;
}

namespace {

void require_increasing(std::vector<std::size_t> const &grid, char const *name) {
  if (grid.empty())
    throw Error(std::string(name) + " grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (grid[k] <= grid[k - 1])
      throw Error(std::string(name) + " grid must be strictly increasing");
}

} // namespace

ConvergenceTrace convergence_trace(ProcessSpec const &spec, std::vector<std::size_t> const &n1_grid,
                                   std::vector<std::size_t> const &n2_grid, double p,
                                   std::optional<VectorObservable> const &reference) {
  require_increasing(n1_grid, "n1");
  require_increasing(n2_grid, "n2");
  if (n1_grid.front() == 0)
    throw Error("n1 grid entries must be >= 1");
  if (std::isnan(p) || p < 1.0)
    throw Error("trace exponent p must be >= 1");

  ConvergenceTrace trace;
  trace.p = p;
  VectorObservable target = reference ? *reference : limit_target(spec);
  require_compatible(target, spec.f(), "convergence_trace reference");
  if (reference)
    trace.target_description = "caller-supplied reference";
  else if (spec.kind() == ProcessKind::martingale_ergodic)
    trace.target_description = "E(f* | F_inf)";
  else
    trace.target_description = "(E(f | F_inf))*";

  for (std::size_t n1 : n1_grid) {
    for (std::size_t n2 : n2_grid) {
      VectorObservable const diff = evaluate(spec, n1, n2) - target;
      trace.rows.push_back({n1, n2, lp_norm(diff, p, spec.norm()), linf_norm(diff, spec.norm())});
    }
  }
  return trace;
}

MeanIdentityReport mean_identity_check(ProcessSpec const &spec) {
  if (spec.weighted())
    throw Error("mean_identity_check applies to unweighted processes");
  MeanIdentityReport r;
  VectorObservable const target = limit_target(spec);
  r.mean_target = mean(target);
  r.mean_f = mean(spec.f());
  for (std::size_t j = 0; j < r.mean_f.size(); ++j)
    r.max_gap = std::max(r.max_gap, std::abs(r.mean_target[j] - r.mean_f[j]));
  r.passed = r.max_gap <= 1e-12;
  for (double p : {1.0, 2.0, 3.0}) {
    NormBound b;
    b.p = p;
    b.target_norm = lp_norm(target, p, spec.norm());
    b.f_norm = lp_norm(spec.f(), p, spec.norm());
    b.ok = b.target_norm <= b.f_norm + 1e-12;
    r.passed = r.passed && b.ok;
    r.norm_bounds.push_back(b);
  }

  std::vector<double> sup(spec.f().size(), 0.0);
  auto absorb = [&](VectorObservable const &g) {
    for (std::size_t i = 0; i < g.size(); ++i)
      sup[i] = std::max(sup[i], point_norm(g.row(i), spec.norm()));
  };
  if (spec.kind() == ProcessKind::martingale_ergodic) {
    static std::vector<BesicovitchWeights> const none;
    for (std::size_t n : default_n1_grid(spec))
      absorb(multi_average(spec.f(), spec.maps(), none,
                           std::vector<std::size_t>(spec.maps().size(), n)));
  } else {
    for (std::size_t s : default_n2_grid(spec))
      absorb(composite_cond_expect(spec.f(), spec.filtrations(), broadcast_index(spec, 1, s).s));
  }
  r.hypothesis_l1 = lp_norm(VectorObservable::scalar(spec.space(), sup), 1.0);
  return r;
}

StabilizationReport weighted_stabilization(ProcessSpec const &spec, std::size_t n2,
                                           std::size_t periods, double p, double threshold) {
  if (periods < 2)
    throw Error("weighted_stabilization needs at least two periods");
  StabilizationReport r;
  std::uint64_t joint = spec.period();
  for (auto const &w : spec.weights()) {
    auto const b = w.period();
    if (!b)
      throw Error("weight frequencies must be rational for the stabilization trace");
    joint = std::lcm(joint, *b);
  }
  r.period = joint;

  std::vector<VectorObservable> evals;
  for (std::size_t k = 1; k <= periods; ++k)
    evals.push_back(evaluate(spec, static_cast<std::size_t>(k * joint), n2));
  VectorObservable const &last = evals.back();

  r.trace.p = p;
  r.trace.target_description = "value at n1 = " + std::to_string(periods * joint);
  for (std::size_t k = 0; k < periods; ++k) {
    VectorObservable const diff = evals[k] - last;
    r.trace.rows.push_back({static_cast<std::size_t>((k + 1) * joint), n2,
                            lp_norm(diff, p, spec.norm()), linf_norm(diff, spec.norm())});
  }
  std::size_t const tail = std::max<std::size_t>(2, (periods + 3) / 4);
  for (std::size_t a = periods - tail; a < periods; ++a)
    for (std::size_t b = a + 1; b < periods; ++b)
      r.tail_variation = std::max(r.tail_variation, linf_norm(evals[a] - evals[b], spec.norm()));
  r.passed = r.tail_variation <= threshold;
  return r;
}

} // namespace mergo
