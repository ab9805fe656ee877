#include "mergo/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

// Mutation-testing hooks. The regular build leaves both factors at 1; the
// mutant builds scale them to confirm that selfcheck notices.
#ifndef MERGO_MUTATE_CONSTANT
#define MERGO_MUTATE_CONSTANT 1.0
#endif
#ifndef MERGO_MUTATE_LHS
#define MERGO_MUTATE_LHS 1.0
#endif

namespace mergo {

namespace {

constexpr double kSatisfiedTolerance = 1e-12;
constexpr std::size_t kSingleBoxCap = 4096;
constexpr std::size_t kMultiBoxCap = 32;

using Buffer = std::vector<double>;

void cond_expect_raw(Buffer const &src, Buffer &dst, Partition const &part,
                     MeasureSpace const &space, std::size_t d, Buffer &sums) {
  std::size_t const n = space.size();
  sums.assign(part.block_count() * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double const w = space.weight(i);
    double *acc = sums.data() + part.block_of(i) * d;
    double const *r = src.data() + i * d;
    for (std::size_t j = 0; j < d; ++j)
      acc[j] += w * r[j];
  }
  for (std::size_t b = 0; b < part.block_count(); ++b) {
    double const m = part.block_mass(b);
    for (std::size_t j = 0; j < d; ++j)
      sums[b * d + j] /= m;
  }
  dst.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double const *s = sums.data() + part.block_of(i) * d;
    std::copy(s, s + d, dst.data() + i * d);
  }
}

// Visits the multiparameter average of g for every n-vector in the box.
// Level j handles map j-1, so map d-1 is averaged first (innermost).
template <class Visit>
void for_each_average(ProcessSpec const &spec, Buffer const &g, std::size_t level,
                      SupBox const &box, Visit &visit) {
  if (level == 0) {
    visit(g);
    return;
  }
  std::size_t const j = level - 1;
  Endomorphism const &map = spec.maps()[j];
  BesicovitchWeights const &weights = spec.weights()[j];
  bool const weighted = spec.weighted();
  std::size_t const size = spec.space()->size();
  std::size_t const d = spec.f().dim();

  std::vector<std::size_t> at(size);
  std::iota(at.begin(), at.end(), std::size_t{0});
  Buffer acc(size * d, 0.0);
  Buffer avg(size * d);
  for (std::size_t n = 1; n <= box.n_max[j]; ++n) {
    double const c = weighted ? weights(n - 1) : 1.0;
    for (std::size_t w = 0; w < size; ++w) {
      double const *src = g.data() + at[w] * d;
      double *dst = acc.data() + w * d;
      for (std::size_t k = 0; k < d; ++k)
        dst[k] += c * src[k];
      at[w] = map(at[w]);
    }
    double const nn = static_cast<double>(n);
    for (std::size_t k = 0; k < acc.size(); ++k)
      avg[k] = acc[k] / nn;
    for_each_average(spec, avg, level - 1, box, visit);
  }
}

// Visits E^1_{s_1} ... E^m_{s_m} g for every stage vector in the box; E^m first.
template <class Visit>
void for_each_composite(ProcessSpec const &spec, Buffer const &g, std::size_t level,
                        SupBox const &box, Visit &visit) {
  if (level == 0) {
    visit(g);
    return;
  }
  std::size_t const k = level - 1;
  Filtration const &filt = spec.filtrations()[k];
  MeasureSpace const &space = *spec.space();
  std::size_t const d = spec.f().dim();
  Buffer h, sums;
  for (std::size_t s = 0; s < box.stage_count[k]; ++s) {
    cond_expect_raw(g, h, filt.stage(s), space, d, sums);
    for_each_composite(spec, h, level - 1, box, visit);
  }
}

} // namespace

void require_box(ProcessSpec const &spec, SupBox const &box) {
  if (box.n_max.size() != spec.maps().size())
    throw Error("sup box has " + std::to_string(box.n_max.size()) + " lengths for " +
                std::to_string(spec.maps().size()) + " maps");
  if (box.stage_count.size() != spec.filtrations().size())
    throw Error("sup box has " + std::to_string(box.stage_count.size()) +
                " stage counts for " + std::to_string(spec.filtrations().size()) +
                " filtrations");
  for (std::size_t n : box.n_max)
    if (n == 0)
      throw Error("sup box averaging lengths must be >= 1");
  for (std::size_t k = 0; k < box.stage_count.size(); ++k)
    if (box.stage_count[k] == 0 || box.stage_count[k] > spec.filtrations()[k].stage_count())
      throw Error("sup box stage count for filtration " + std::to_string(k) + " out of range");
}

namespace {

struct SupAccumulator {
  std::vector<double> sup;
  std::size_t d;
  NormSpec ns;
  void operator()(Buffer const &g) {
    for (std::size_t i = 0; i < sup.size(); ++i)
      sup[i] = std::max(sup[i], point_norm({g.data() + i * d, d}, ns));
  }
};

std::size_t horizon_of(SupBox const &box) {
  return *std::max_element(box.n_max.begin(), box.n_max.end());
}

bool is_integer(double p) { return std::floor(p) == p; }

} // namespace

void require_hypotheses(ProcessSpec const &spec, double p, bool maximal) {
  if (!std::isfinite(p) || !(p > 1.0))
    throw Error("inequality exponent p must be > 1 (got " + std::to_string(p) + ")");
  bool const me = spec.kind() == ProcessKind::martingale_ergodic;
  switch (spec.family()) {
  case Family::plain:
  case Family::weighted: {
    // The martingale-ergodic bounds, and both weighted bounds, are stated for
    // a decreasing filtration.
    bool const needs_decreasing = me || spec.family() == Family::weighted;
    if (needs_decreasing &&
        spec.filtrations().front().direction() != Direction::decreasing)
      throw Error(std::string(maximal ? "maximal" : "dominant") +
                  " bound for the " + to_string(spec.kind()) + " " + to_string(spec.family()) +
                  " process assumes a decreasing filtration F_n -> F_inf");
    break;
  }
  case Family::multiparameter:
    if (maximal && !me)
      throw Error("no maximal inequality is stated for the multiparameter ergodic-martingale "
                  "process");
    if (!is_integer(p))
      throw Error("multiparameter bounds need an integer p (got " + std::to_string(p) + ")");
    if (static_cast<double>(spec.filtrations().size()) != p + 1.0)
      throw Error("multiparameter bounds use p + 1 = " + std::to_string(int(p) + 1) +
                  " filtrations (got " + std::to_string(spec.filtrations().size()) + ")");
    break;
  }
}


SupBox default_box(ProcessSpec const &spec) {
  std::size_t const cap =
      spec.family() == Family::multiparameter ? kMultiBoxCap : kSingleBoxCap;
  std::uint64_t const period = spec.period();
  std::size_t const n =
      period > cap / 4 ? cap : static_cast<std::size_t>(4 * period);
  SupBox box;
  box.n_max.assign(spec.maps().size(), n);
  for (auto const &f : spec.filtrations())
    box.stage_count.push_back(f.stage_count());
  return box;
}

SupBox uniform_box(ProcessSpec const &spec, std::size_t n_max, std::size_t stages) {
  SupBox box;
  box.n_max.assign(spec.maps().size(), n_max);
  for (auto const &f : spec.filtrations())
    box.stage_count.push_back(std::min(stages, f.stage_count()));
  return box;
}

VectorObservable sup_field(ProcessSpec const &spec, SupBox const &box) {
  require_box(spec, box);
  std::size_t const d = spec.f().dim();
  SupAccumulator acc{std::vector<double>(spec.f().size(), 0.0), d, spec.norm()};
  Buffer const &f = spec.f().values();
  std::size_t const maps = spec.maps().size();
  std::size_t const filts = spec.filtrations().size();
  if (spec.kind() == ProcessKind::martingale_ergodic) {
    auto inner = [&](Buffer const &avg) { for_each_composite(spec, avg, filts, box, acc); };
    for_each_average(spec, f, maps, box, inner);
  } else {
    auto inner = [&](Buffer const &e) { for_each_average(spec, e, maps, box, acc); };
    for_each_composite(spec, f, filts, box, inner);
  }
  return VectorObservable::scalar(spec.space(), std::move(acc.sup));
}

VectorObservable hypothesis_field(ProcessSpec const &spec, SupBox const &box) {
  require_box(spec, box);
  SupAccumulator acc{std::vector<double>(spec.f().size(), 0.0), spec.f().dim(), spec.norm()};
  if (spec.kind() == ProcessKind::martingale_ergodic)
    for_each_average(spec, spec.f().values(), spec.maps().size(), box, acc);
  else
    for_each_composite(spec, spec.f().values(), spec.filtrations().size(), box, acc);
  return VectorObservable::scalar(spec.space(), std::move(acc.sup));
}

double dominant_constant(Family family, double p, double alpha, std::size_t d) {
  double const r = p / (p - 1.0);
  double c = 0.0;
  switch (family) {
  case Family::plain:
    c = r * r;
    break;
  case Family::weighted:
    c = alpha * r * r;
    break;
  case Family::multiparameter:
    c = alpha * std::pow(r, static_cast<double>(d) + p + 1.0);
    break;
  }
  return c * MERGO_MUTATE_CONSTANT;
}

double maximal_constant(Family family, double p, double alpha, std::size_t d) {
  double const r = p / (p - 1.0);
  double c = 0.0;
  switch (family) {
  case Family::plain:
    c = std::pow(r, p);
    break;
  case Family::weighted:
    c = alpha * std::pow(r, p);
    break;
  case Family::multiparameter:
    c = std::pow(alpha, p) * std::pow(r, p * static_cast<double>(d));
    break;
  }
  return c * MERGO_MUTATE_CONSTANT;
}

std::string dominant_tag(ProcessSpec const &spec) {
  bool const me = spec.kind() == ProcessKind::martingale_ergodic;
  switch (spec.family()) {
  case Family::plain:
    return me ? "Thm2.4" : "Thm3.4";
  case Family::weighted:
    return me ? "Thm4.1-dominant" : "Thm4.2-dominant";
  case Family::multiparameter:
    return me ? "Thm4.3-dominant" : "Thm4.4-dominant";
  }
  return "?";
}

std::string maximal_tag(ProcessSpec const &spec) {
  bool const me = spec.kind() == ProcessKind::martingale_ergodic;
  switch (spec.family()) {
  case Family::plain:
    return me ? "Thm2.5" : "Thm3.5";
  case Family::weighted:
    return me ? "Thm4.1-maximal" : "Thm4.2-maximal";
  case Family::multiparameter:
    return me ? "Thm4.3-maximal" : "Thm4.4-maximal";
  }
  return "?";
}

double spec_alpha(ProcessSpec const &spec, std::size_t horizon) {
  if (!spec.weighted())
    return 1.0;
  double a = 0.0;
  for (auto const &w : spec.weights())
    a = std::max(a, w.alpha(horizon));
  return a;
}

namespace {

InequalityReport base_report(ProcessSpec const &spec, double p, SupBox const &box,
                             VectorObservable const &hyp) {
  InequalityReport r;
  r.p = p;
  r.truncation = box;
  r.alpha = spec_alpha(spec, horizon_of(box));
  r.f_norm = lp_norm(spec.f(), p, spec.norm());
  r.hypothesis_l1 = lp_norm(hyp, 1.0);
  return r;
}

void finish(InequalityReport &r) {
  r.margin = r.rhs - r.lhs;
  r.satisfied = r.lhs <= r.rhs + kSatisfiedTolerance;
}

InequalityReport maximal_from_field(ProcessSpec const &spec, double p, double epsilon,
                                    SupBox const &box, VectorObservable const &sup,
                                    VectorObservable const &hyp) {
  if (!std::isfinite(epsilon) || !(epsilon > 0.0))
    throw Error("maximal check needs epsilon > 0");
  InequalityReport r = base_report(spec, p, box, hyp);
  r.theorem_tag = maximal_tag(spec);
  r.epsilon = epsilon;
  r.constant = maximal_constant(spec.family(), p, r.alpha, spec.maps().size());
  MeasureSpace const &space = *spec.space();
  double level = 0.0;
  for (std::size_t i = 0; i < sup.size(); ++i)
    if (sup(i, 0) >= epsilon)
      level += space.weight(i);
  r.lhs = level * MERGO_MUTATE_LHS;
  r.rhs = r.constant * std::pow(r.f_norm, p) / std::pow(epsilon, p);
  finish(r);
  return r;
}

} // namespace

InequalityReport dominant_check(ProcessSpec const &spec, double p, SupBox const &box,
                                unsigned orlicz_order) {
  require_hypotheses(spec, p, false);
  VectorObservable const sup = sup_field(spec, box);
  InequalityReport r = base_report(spec, p, box, hypothesis_field(spec, box));
  r.theorem_tag = dominant_tag(spec);
  r.constant = dominant_constant(spec.family(), p, r.alpha, spec.maps().size());
  r.lhs = lp_norm(sup, p) * MERGO_MUTATE_LHS;
  r.rhs = r.constant * r.f_norm;

  OrliczRecord o;
  o.m = orlicz_order;
  o.f_value = llog_norm(spec.f(), orlicz_order + 2, spec.norm());
  o.sup_value = llog_norm(sup, orlicz_order);
  o.finite = std::isfinite(o.f_value) && std::isfinite(o.sup_value);
  r.orlicz = o;
  finish(r);
  return r;
}

InequalityReport dominant_check(ProcessSpec const &spec, double p) {
  return dominant_check(spec, p, default_box(spec));
}

InequalityReport maximal_check(ProcessSpec const &spec, double p, double epsilon,
                               SupBox const &box) {
  require_hypotheses(spec, p, true);
  return maximal_from_field(spec, p, epsilon, box, sup_field(spec, box),
                            hypothesis_field(spec, box));
}

std::vector<InequalityReport> epsilon_sweep(ProcessSpec const &spec, double p,
                                            std::vector<double> const &eps_grid,
                                            SupBox const &box) {
  require_hypotheses(spec, p, true);
  if (eps_grid.empty())
    throw Error("epsilon grid is empty");
  for (std::size_t k = 1; k < eps_grid.size(); ++k)
    if (!(eps_grid[k] > eps_grid[k - 1]))
      throw Error("epsilon grid must be strictly ascending");
  VectorObservable const sup = sup_field(spec, box);
  VectorObservable const hyp = hypothesis_field(spec, box);
  std::vector<InequalityReport> out;
  for (double eps : eps_grid)
    out.push_back(maximal_from_field(spec, p, eps, box, sup, hyp));
  return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw Error("log_spaced needs 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  double const a = std::log(lo), b = std::log(hi);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

} // namespace mergo
