#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mergo/processes.hpp"

namespace mergo {

/// Finite index box standing in for sup_{n1,n2}: averaging lengths
/// 1..n_max[j] per map and stages 0..stage_count[k]-1 per filtration.
/// Truncating only lowers the supremum, so every check on a box is a
/// necessary condition for the unbounded statement.
struct SupBox {
  std::vector<std::size_t> n_max;
  std::vector<std::size_t> stage_count;
};

/// n_max = 4 L per map (L the joint period), capped at 4096 for one map and
/// at 32 per map in the multiparameter family; every stage of every filtration.
SupBox default_box(ProcessSpec const &spec);
/// Same n_max for every map, and the first `stages` stages of each filtration
/// (clipped to its length).
SupBox uniform_box(ProcessSpec const &spec, std::size_t n_max, std::size_t stages);

/// Throws unless the box has one length per map and one stage count per
/// filtration, all within range.
void require_box(ProcessSpec const &spec, SupBox const &box);

/// Pointwise max over the box of ||evaluate(spec, n, s)||_X.
VectorObservable sup_field(ProcessSpec const &spec, SupBox const &box);

/// The integrability sup of the hypotheses: sup_n ||S_n f||_X for
/// martingale-ergodic kinds, sup_s ||E_s f||_X for ergodic-martingale kinds.
VectorObservable hypothesis_field(ProcessSpec const &spec, SupBox const &box);

/// Orlicz functionals of the L log+ L statements, recorded for reporting.
/// On a finite space both are finite, so the membership claim holds trivially.
struct OrliczRecord {
  unsigned m = 1;
  double f_value = 0.0;    // llog_norm(f, m + 2)
  double sup_value = 0.0;  // llog_norm(sup field, m)
  bool finite = true;
};

struct InequalityReport {
  std::string theorem_tag;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double p = 2.0;
  std::optional<double> epsilon;
  bool satisfied = false;
  double margin = 0.0;  // rhs - lhs
  SupBox truncation;
  double alpha = 1.0;
  double f_norm = 0.0;  // ||f||_p
  double hypothesis_l1 = 0.0;
  std::optional<OrliczRecord> orlicz;
};

/// Constant C in ||sup|| <= C ||f||_p.
///   plain:          (p/(p-1))^2
///   weighted:       alpha (p/(p-1))^2
///   multiparameter: alpha (p/(p-1))^(d+p+1), d maps, integer p
double dominant_constant(Family family, double p, double alpha = 1.0, std::size_t d = 1);

/// Constant C in mu{sup >= eps} <= C ||f||_p^p / eps^p.
///   plain:          (p/(p-1))^p
///   weighted:       alpha (p/(p-1))^p
///   multiparameter: alpha^p (p/(p-1))^(p d)
double maximal_constant(Family family, double p, double alpha = 1.0, std::size_t d = 1);

std::string dominant_tag(ProcessSpec const &spec);
std::string maximal_tag(ProcessSpec const &spec);

/// alpha used in the constants: max over maps of max(sup_{i<horizon} |alpha_i|,
/// sum |amp|). One for unweighted processes.
double spec_alpha(ProcessSpec const &spec, std::size_t horizon);

/// Throws unless the bound is stated for this spec and exponent: p > 1, a
/// decreasing filtration where the statement asks for one, integer p with
/// p + 1 filtrations for the multiparameter family.
void require_hypotheses(ProcessSpec const &spec, double p, bool maximal);

InequalityReport dominant_check(ProcessSpec const &spec, double p, SupBox const &box,
                                unsigned orlicz_order = 1);
InequalityReport dominant_check(ProcessSpec const &spec, double p);

InequalityReport maximal_check(ProcessSpec const &spec, double p, double epsilon,
                               SupBox const &box);

/// One maximal check per epsilon, sharing a single sup field.
std::vector<InequalityReport> epsilon_sweep(ProcessSpec const &spec, double p,
                                            std::vector<double> const &eps_grid,
                                            SupBox const &box);

/// `count` log-spaced values between lo and hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

} // namespace mergo
