#include "mergo/averages.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace mergo {

BesicovitchWeights::BesicovitchWeights(std::vector<CosineTerm> terms) : terms_(std::move(terms)) {
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    CosineTerm const &t = terms_[k];
    if (!std::isfinite(t.amplitude) || !std::isfinite(t.phase))
      throw Error("cosine term " + std::to_string(k) + " has a non-finite amplitude or phase");
    if (!(t.frequency >= 0.0 && t.frequency < 1.0))
      throw Error("cosine term " + std::to_string(k) + " frequency must lie in [0, 1)");
  }
}

BesicovitchWeights BesicovitchWeights::unit() { return constant(1.0); }

BesicovitchWeights BesicovitchWeights::constant(double c) {
  return BesicovitchWeights({CosineTerm{c, 0.0, 0.0}});
}

namespace {

double term_value(CosineTerm const &t, std::size_t i) {
  if (t.frequency == 0.0)
    return t.amplitude * std::cos(t.phase);
  // Reduce the angle mod one turn before scaling so large i stays accurate.
  double turns = std::fmod(t.frequency * static_cast<double>(i), 1.0);
  return t.amplitude * std::cos(2.0 * std::numbers::pi * turns + t.phase);
}

} // namespace

double BesicovitchWeights::operator()(std::size_t i) const {
  double s = 0.0;
  for (auto const &t : terms_)
    s += term_value(t, i);
  return s;
}

std::vector<double> BesicovitchWeights::sample(std::size_t horizon) const {
  std::vector<double> out(horizon);
  for (std::size_t i = 0; i < horizon; ++i)
    out[i] = (*this)(i);
  return out;
}

double BesicovitchWeights::sup_bound(std::size_t horizon) const {
  double m = 0.0;
  for (std::size_t i = 0; i < horizon; ++i)
    m = std::max(m, std::abs((*this)(i)));
  return m;
}

double BesicovitchWeights::envelope() const {
  double s = 0.0;
  for (auto const &t : terms_)
    s += std::abs(t.amplitude);
  return s;
}

double BesicovitchWeights::alpha(std::size_t horizon) const {
  return std::max(sup_bound(horizon), envelope());
}

bool BesicovitchWeights::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](CosineTerm const &t) { return t.frequency == 0.0; });
}

std::optional<std::uint64_t> BesicovitchWeights::period(std::uint64_t max_denominator) const {
  std::uint64_t p = 1;
  for (auto const &t : terms_) {
    if (t.amplitude == 0.0)
      continue;
    std::optional<std::uint64_t> den;
    for (std::uint64_t b = 1; b <= max_denominator; ++b) {
      double const x = t.frequency * static_cast<double>(b);
      if (std::abs(x - std::round(x)) <= 1e-9) {
        den = b;
        break;
      }
    }
    if (!den)
      return std::nullopt;
    p = std::lcm(p, *den);
  }
  return p;
}

double besicovitch_defect(BesicovitchWeights const &w, std::vector<std::size_t> const &poly_terms,
                          std::size_t horizon) {
  if (horizon == 0)
    throw Error("besicovitch_defect needs a positive horizon");
  std::vector<std::size_t> subset = poly_terms;
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  std::vector<CosineTerm> chosen;
  for (std::size_t k : subset) {
    if (k >= w.terms().size())
      throw Error("besicovitch_defect: term index " + std::to_string(k) + " out of range");
    chosen.push_back(w.terms()[k]);
  }
  BesicovitchWeights const phi(std::move(chosen));
  double s = 0.0;
  for (std::size_t i = 0; i < horizon; ++i)
    s += std::abs(w(i) - phi(i));
  return s / static_cast<double>(horizon);
}

namespace {

// Accumulates sum_{i<n} coeff(i) * f(tau^i omega) by advancing an index array.
template <class Coeff>
VectorObservable orbit_sum(VectorObservable const &f, Endomorphism const &t, std::size_t n,
                           Coeff coeff) {
  require_same_space(f.space(), t.space(), "orbit average");
  if (n == 0)
    throw Error("averaging length n must be >= 1");
  std::size_t const size = f.size();
  std::size_t const d = f.dim();
  std::vector<std::size_t> at(size);
  std::iota(at.begin(), at.end(), std::size_t{0});
  std::vector<double> acc(size * d, 0.0);
  auto const &vals = f.values();
  for (std::size_t i = 0; i < n; ++i) {
    double const c = coeff(i);
    for (std::size_t w = 0; w < size; ++w) {
      double const *src = vals.data() + at[w] * d;
      double *dst = acc.data() + w * d;
      for (std::size_t j = 0; j < d; ++j)
        dst[j] += c * src[j];
      at[w] = t(at[w]);
    }
  }
  double const nn = static_cast<double>(n);
  for (double &x : acc)
    x /= nn;
  return VectorObservable(f.space(), d, std::move(acc));
}

} // namespace

VectorObservable ergodic_average(VectorObservable const &f, Endomorphism const &t, std::size_t n) {
  return orbit_sum(f, t, n, [](std::size_t) { return 1.0; });
}

VectorObservable weighted_average(VectorObservable const &f, Endomorphism const &t,
                                  BesicovitchWeights const &w, std::size_t n) {
  return orbit_sum(f, t, n, [&w](std::size_t i) { return w(i); });
}

VectorObservable ergodic_limit(VectorObservable const &f, Endomorphism const &t) {
  require_same_space(f.space(), t.space(), "ergodic_limit");
  MeasureSpace const &space = *f.space();
  std::size_t const d = f.dim();
  std::vector<double> out(f.values().size());
  std::vector<double> acc(d);
  for (auto const &cycle : t.cycles()) {
    std::fill(acc.begin(), acc.end(), 0.0);
    double mass = 0.0;
    for (std::size_t x : cycle) {
      double const w = space.weight(x);
      mass += w;
      auto r = f.row(x);
      for (std::size_t j = 0; j < d; ++j)
        acc[j] += w * r[j];
    }
    for (std::size_t j = 0; j < d; ++j)
      acc[j] /= mass;
    for (std::size_t x : cycle)
      std::copy(acc.begin(), acc.end(), out.begin() + static_cast<std::ptrdiff_t>(x * d));
  }
  return VectorObservable(f.space(), d, std::move(out));
}

MultiParamSpec::MultiParamSpec(std::vector<Endomorphism> maps,
                               std::vector<BesicovitchWeights> weight_seqs,
                               std::vector<Filtration> filtrations)
    : maps_(std::move(maps)), weights_(std::move(weight_seqs)),
      filtrations_(std::move(filtrations)) {
  if (maps_.empty())
    throw Error("multiparameter spec needs at least one map");
  if (filtrations_.empty())
    throw Error("multiparameter spec needs at least one filtration");
  if (weights_.empty())
    weights_.assign(maps_.size(), BesicovitchWeights::unit());
  if (weights_.size() != maps_.size())
    throw Error("multiparameter spec has " + std::to_string(weights_.size()) +
                " weight sequences for " + std::to_string(maps_.size()) + " maps");
  for (auto const &m : maps_)
    require_same_space(m.space(), space(), "multiparameter spec");
  for (auto const &f : filtrations_)
    require_same_space(f.space(), space(), "multiparameter spec");
}

VectorObservable multi_average(VectorObservable const &f, std::vector<Endomorphism> const &maps,
                               std::vector<BesicovitchWeights> const &weights,
                               std::vector<std::size_t> const &n_vec) {
  if (maps.empty())
    throw Error("multi_average needs at least one map");
  if (n_vec.size() != maps.size())
    throw Error("multi_average: " + std::to_string(n_vec.size()) + " lengths for " +
                std::to_string(maps.size()) + " maps");
  if (!weights.empty() && weights.size() != maps.size())
    throw Error("multi_average: " + std::to_string(weights.size()) + " weight sequences for " +
                std::to_string(maps.size()) + " maps");
  VectorObservable g = f;
  for (std::size_t j = maps.size(); j-- > 0;) {
    g = weights.empty() ? ergodic_average(g, maps[j], n_vec[j])
                        : weighted_average(g, maps[j], weights[j], n_vec[j]);
  }
  return g;
}

VectorObservable multi_average(VectorObservable const &f, MultiParamSpec const &spec,
                               std::vector<std::size_t> const &n_vec) {
  return multi_average(f, spec.maps(), spec.weight_seqs(), n_vec);
}

VectorObservable iterated_limit(VectorObservable const &f, std::vector<Endomorphism> const &maps) {
  VectorObservable g = f;
  for (std::size_t j = maps.size(); j-- > 0;)
    g = ergodic_limit(g, maps[j]);
  return g;
}

VectorObservable composite_cond_expect(VectorObservable const &f,
                                       std::vector<Filtration> const &filtrations,
                                       std::vector<std::size_t> const &s_vec) {
  if (filtrations.empty())
    throw Error("composite_cond_expect needs at least one filtration");
  if (s_vec.size() != filtrations.size())
    throw Error("composite_cond_expect: " + std::to_string(s_vec.size()) +
                " stage indices for " + std::to_string(filtrations.size()) + " filtrations");
  for (std::size_t k = 0; k < filtrations.size(); ++k)
    if (s_vec[k] >= filtrations[k].stage_count())
      throw Error("composite_cond_expect: stage index " + std::to_string(s_vec[k]) +
                  " out of range for filtration " + std::to_string(k));
  VectorObservable g = f;
  for (std::size_t k = filtrations.size(); k-- > 0;)
    g = cond_expect(g, filtrations[k].stage(s_vec[k]));
  return g;
}

VectorObservable composite_limit(VectorObservable const &f,
                                 std::vector<Filtration> const &filtrations) {
  VectorObservable g = f;
  for (std::size_t k = filtrations.size(); k-- > 0;)
    g = cond_expect(g, filtrations[k].limit());
  return g;
}

} // namespace mergo
