#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mergo/averages.hpp"
#include "mergo/measure_space.hpp"
#include "mergo/observables.hpp"
#include "mergo/operators.hpp"

namespace mergo {

/// martingale_ergodic: E(S_{n1} f | F_{n2}).
/// ergodic_martingale: S_{n1}(E(f | F_{n2})).
enum class ProcessKind { martingale_ergodic, ergodic_martingale };

/// Which family of bounds applies: one map and one filtration without
/// weights, one map with Besicovitch weights, or the multiparameter averages
/// combined with the composite expectation E_s.
enum class Family { plain, weighted, multiparameter };

char const *to_string(ProcessKind k);
char const *to_string(Family f);

class ProcessSpec {
public:
  /// Empty `weights` means unit weights and an unweighted process.
  ProcessSpec(ProcessKind kind, VectorObservable f, std::vector<Endomorphism> maps,
              std::vector<Filtration> filtrations, std::vector<BesicovitchWeights> weights = {},
              NormSpec norm = {}, bool multiparameter = false);

  static ProcessSpec single(ProcessKind kind, VectorObservable f, Endomorphism map,
                            Filtration filtration,
                            std::optional<BesicovitchWeights> weights = std::nullopt,
                            NormSpec norm = {});
  static ProcessSpec multi(ProcessKind kind, VectorObservable f, MultiParamSpec const &spec,
                           bool weighted, NormSpec norm = {});

  ProcessKind kind() const { return kind_; }
  Family family() const { return family_; }
  VectorObservable const &f() const { return f_; }
  SpaceRef const &space() const { return f_.space(); }
  std::vector<Endomorphism> const &maps() const { return maps_; }
  std::vector<Filtration> const &filtrations() const { return filtrations_; }
  /// Always one entry per map; unit sequences when unweighted.
  std::vector<BesicovitchWeights> const &weights() const { return weights_; }
  bool weighted() const { return weighted_; }
  NormSpec norm() const { return norm_; }

  /// lcm of all map periods.
  std::uint64_t period() const;
  std::size_t max_stage_count() const;

  ProcessSpec with_observable(VectorObservable f) const;
  ProcessSpec with_kind(ProcessKind kind) const;

private:
  ProcessKind kind_;
  VectorObservable f_;
  std::vector<Endomorphism> maps_;
  std::vector<Filtration> filtrations_;
  std::vector<BesicovitchWeights> weights_;
  NormSpec norm_;
  bool weighted_;
  Family family_;
};

/// Averaging lengths per map and stage indices per filtration.
struct ProcessIndex {
  std::vector<std::size_t> n;
  std::vector<std::size_t> s;
};

VectorObservable evaluate(ProcessSpec const &spec, ProcessIndex const &index);

/// Broadcasts n1 to every map and n2 to every filtration. With several
/// filtrations n2 is clipped to each one's last stage; it must index a stage
/// of the longest filtration.
VectorObservable evaluate(ProcessSpec const &spec, std::size_t n1, std::size_t n2);
ProcessIndex broadcast_index(ProcessSpec const &spec, std::size_t n1, std::size_t n2);

/// Exact limit for unweighted (or constant-weight) processes.
///  martingale_ergodic: E(f* | F_inf).
///  ergodic_martingale: (E(f | F_inf))*.
/// Multiparameter: nested orbit averages combined with E_s at every limit.
VectorObservable limit_target(ProcessSpec const &spec);

struct TraceRow {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double lp_error = 0.0;
  double sup_error = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  std::string target_description;
  double p = 2.0;
};

/// Powers of two below L followed by L, 2L, 3L, 4L, with L the joint period.
std::vector<std::size_t> default_n1_grid(ProcessSpec const &spec);
/// Every stage of the longest filtration.
std::vector<std::size_t> default_n2_grid(ProcessSpec const &spec);

/// Errors against limit_target, or against `reference` when given.
ConvergenceTrace convergence_trace(ProcessSpec const &spec, std::vector<std::size_t> const &n1_grid,
                                   std::vector<std::size_t> const &n2_grid, double p,
                                   std::optional<VectorObservable> const &reference = std::nullopt);

struct NormBound {
  double p = 1.0;
  double target_norm = 0.0;
  double f_norm = 0.0;
  bool ok = false;
};

struct MeanIdentityReport {
  std::vector<double> mean_target;
  std::vector<double> mean_f;
  double max_gap = 0.0;
  std::vector<NormBound> norm_bounds;
  /// L1 norm of the integrability sup (sup_n ||S_n f|| or sup_n ||E(f|F_n)||);
  /// always finite here, reported so the hypothesis stays visible.
  double hypothesis_l1 = 0.0;
  bool passed = false;
};

MeanIdentityReport mean_identity_check(ProcessSpec const &spec);

struct StabilizationReport {
  std::uint64_t period = 0;  // joint period of the maps and the weights
  ConvergenceTrace trace;    // n1 = period, 2 period, ...; errors vs the last row
  double tail_variation = 0.0;
  bool passed = false;
};

/// For weighted processes without a closed-form limit: evaluates at multiples
/// of the joint period and measures the spread over the final quarter.
StabilizationReport weighted_stabilization(ProcessSpec const &spec, std::size_t n2,
                                           std::size_t periods = 8, double p = 2.0,
                                           double threshold = 1e-9);

} // namespace mergo
