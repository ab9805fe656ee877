#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mergo/measure_space.hpp"
#include "mergo/observables.hpp"
#include "mergo/operators.hpp"

namespace mergo {

struct CosineTerm {
  double amplitude = 1.0;
  double frequency = 0.0;  // in [0, 1)
  double phase = 0.0;
};

/// Bounded weight sequence alpha_i = sum_k amp_k cos(2 pi freq_k i + phase_k).
/// Trigonometric polynomials are Besicovitch by construction.
class BesicovitchWeights {
public:
  BesicovitchWeights() = default;
  explicit BesicovitchWeights(std::vector<CosineTerm> terms);

  /// alpha_i = 1.
  static BesicovitchWeights unit();
  /// alpha_i = c.
  static BesicovitchWeights constant(double c);

  std::vector<CosineTerm> const &terms() const { return terms_; }
  double operator()(std::size_t i) const;
  std::vector<double> sample(std::size_t horizon) const;

  /// max_{i < horizon} |alpha_i|.
  double sup_bound(std::size_t horizon) const;
  /// sum_k |amp_k|, an upper bound on every |alpha_i|.
  double envelope() const;
  /// Bound used in inequality constants: the larger of the two.
  double alpha(std::size_t horizon) const;

  /// All frequencies zero, so alpha_i does not depend on i.
  bool is_constant() const;
  /// Smallest common period b of the terms, if every frequency is a rational
  /// a/b with b <= max_denominator.
  std::optional<std::uint64_t> period(std::uint64_t max_denominator = 100000) const;

private:
  std::vector<CosineTerm> terms_;
};

/// Cesaro l1 distance (1/N) sum_{i<N} |alpha_i - phi(i)|, phi built from the
/// chosen subset of alpha's terms.
double besicovitch_defect(BesicovitchWeights const &w, std::vector<std::size_t> const &poly_terms,
                          std::size_t horizon);

/// (1/n) sum_{i<n} f o tau^i, by orbit iteration.
VectorObservable ergodic_average(VectorObservable const &f, Endomorphism const &t, std::size_t n);

/// f* via cycle decomposition: weighted orbit means.
VectorObservable ergodic_limit(VectorObservable const &f, Endomorphism const &t);

/// (1/n) sum_{i<n} alpha_i f o tau^i.
VectorObservable weighted_average(VectorObservable const &f, Endomorphism const &t,
                                  BesicovitchWeights const &w, std::size_t n);

/// Maps T_1..T_d with weight sequences, plus the filtrations F^1..F^m that
/// the composite conditional expectation E_s = E^1_{s_1} ... E^m_{s_m} uses.
class MultiParamSpec {
public:
  MultiParamSpec(std::vector<Endomorphism> maps, std::vector<BesicovitchWeights> weight_seqs,
                 std::vector<Filtration> filtrations);

  SpaceRef const &space() const { return maps_.front().space(); }
  std::vector<Endomorphism> const &maps() const { return maps_; }
  std::vector<BesicovitchWeights> const &weight_seqs() const { return weights_; }
  std::vector<Filtration> const &filtrations() const { return filtrations_; }

private:
  std::vector<Endomorphism> maps_;
  std::vector<BesicovitchWeights> weights_;
  std::vector<Filtration> filtrations_;
};

/// (1/prod n_j) sum_k prod_j alpha^j_{k_j} T_1^{k_1} ... T_d^{k_d} f.
///
/// The box sum factorizes, so this is evaluated as nested one-parameter
/// weighted averages with T_d innermost.
VectorObservable multi_average(VectorObservable const &f, std::vector<Endomorphism> const &maps,
                               std::vector<BesicovitchWeights> const &weights,
                               std::vector<std::size_t> const &n_vec);
VectorObservable multi_average(VectorObservable const &f, MultiParamSpec const &spec,
                               std::vector<std::size_t> const &n_vec);

/// Nested ergodic limits, T_d innermost; the unit-weight limit of multi_average.
VectorObservable iterated_limit(VectorObservable const &f, std::vector<Endomorphism> const &maps);

/// E^1_{s_1}( E^2_{s_2}( ... E^m_{s_m}(f) ) ): E^m is applied first, E^1 last.
VectorObservable composite_cond_expect(VectorObservable const &f,
                                       std::vector<Filtration> const &filtrations,
                                       std::vector<std::size_t> const &s_vec);

/// Same composition at every filtration's limit stage.
VectorObservable composite_limit(VectorObservable const &f,
                                 std::vector<Filtration> const &filtrations);

} // namespace mergo
