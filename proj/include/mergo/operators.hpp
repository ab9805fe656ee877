#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mergo/measure_space.hpp"
#include "mergo/observables.hpp"

namespace mergo {

/// A measure-preserving self-map tau of a finite space.
///
/// The constructor checks mu(tau^{-1}{y}) = mu(y) for every point y. With full
/// support this forces tau to be a permutation whose weights are constant
/// along each cycle.
class Endomorphism {
public:
  Endomorphism(SpaceRef space, std::vector<std::size_t> map);

  static Endomorphism identity(SpaceRef space);
  /// i -> i + shift mod N.
  static Endomorphism rotation(SpaceRef space, std::size_t shift = 1);
  /// Consecutive cycles of the given lengths: (0 1 .. l0-1)(l0 .. l0+l1-1)...
  static Endomorphism from_cycle_lengths(SpaceRef space, std::vector<std::size_t> const &lengths);

  SpaceRef const &space() const { return space_; }
  std::size_t size() const { return map_.size(); }
  std::size_t operator()(std::size_t i) const { return map_[i]; }
  std::vector<std::size_t> const &map() const { return map_; }

  /// Cycles, each listed starting at its smallest point in forward orbit order.
  std::vector<std::vector<std::size_t>> const &cycles() const { return cycles_; }
  /// lcm of the cycle lengths.
  std::uint64_t period() const { return period_; }

  Endomorphism power(std::size_t k) const;
  /// (this then other): omega -> other(this(omega)).
  Endomorphism then(Endomorphism const &other) const;
  bool commutes_with(Endomorphism const &other) const;

  bool operator==(Endomorphism const &other) const {
    return map_ == other.map_ && same_space(space_, other.space_);
  }

private:
  SpaceRef space_;
  std::vector<std::size_t> map_;
  std::vector<std::vector<std::size_t>> cycles_;
  std::uint64_t period_ = 1;
};

/// (Tf)(omega) = f(tau(omega)). The same composition on a scalar field is the
/// positive dominant T'.
VectorObservable koopman(VectorObservable const &f, Endomorphism const &t);

/// Block averages: E(f | sigma(P)). Valid for scalar fields as E'(.|P) too.
VectorObservable cond_expect(VectorObservable const &f, Partition const &p);

using VectorOperator = std::function<VectorObservable(VectorObservable const &)>;

struct DominationSample {
  double max_slack = 0.0;  // max_omega ||Tf|| - T'(||f||)
  double min_dominant_value = 0.0;  // min of T'(||f||): must be >= 0
  double dominant_l1 = 0.0;  // ||T'(||f||)||_1
  double input_l1 = 0.0;     // ||f||_1
  bool passed = false;
};

struct DominationReport {
  std::vector<DominationSample> samples;
  bool passed = false;
};

/// Sample-based check of ||Tf||_X <= T'(||f||_X), positivity of T' and the L1
/// contraction of T'. A pass is a necessary condition only.
DominationReport check_positive_domination(VectorOperator const &apply_t,
                                           VectorOperator const &apply_dominant,
                                           std::vector<VectorObservable> const &samples,
                                           NormSpec ns = {});

struct ContractionSample {
  double l1_in = 0.0, l1_out = 0.0;
  double linf_in = 0.0, linf_out = 0.0;
  bool passed = false;
};

struct ContractionReport {
  std::vector<ContractionSample> samples;
  bool passed = false;
};

ContractionReport check_L1_Linf_contraction(VectorOperator const &apply_t,
                                            std::vector<VectorObservable> const &samples,
                                            NormSpec ns = {});

} // namespace mergo
