#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "mergo/measure_space.hpp"

namespace mergo {

/// Exponent of the l^q norm used on R^d. q = infinity selects the max norm.
struct NormSpec {
  double q = 2.0;

  NormSpec() = default;
  explicit NormSpec(double exponent);

  static NormSpec infinity() { return NormSpec(std::numeric_limits<double>::infinity()); }
  bool is_infinite() const { return q == std::numeric_limits<double>::infinity(); }
};

double point_norm(std::span<const double> row, NormSpec ns);

/// A function from the points of a measure space into R^d, stored row-major.
class VectorObservable {
public:
  VectorObservable(SpaceRef space, std::size_t dim, std::vector<double> values);

  static VectorObservable zeros(SpaceRef space, std::size_t dim);
  static VectorObservable scalar(SpaceRef space, std::vector<double> values);
  static VectorObservable constant(SpaceRef space, std::vector<double> value);
  static VectorObservable from_rows(SpaceRef space,
                                    std::vector<std::vector<double>> const &rows);

  SpaceRef const &space() const { return space_; }
  std::size_t size() const { return space_->size(); }
  std::size_t dim() const { return dim_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * dim_ + j]; }

  std::vector<double> const &values() const { return values_; }
  std::vector<double> &values() { return values_; }

  VectorObservable &operator+=(VectorObservable const &rhs);
  VectorObservable &operator-=(VectorObservable const &rhs);
  VectorObservable &operator*=(double c);

private:
  SpaceRef space_;
  std::size_t dim_;
  std::vector<double> values_;
};

VectorObservable operator+(VectorObservable lhs, VectorObservable const &rhs);
VectorObservable operator-(VectorObservable lhs, VectorObservable const &rhs);
VectorObservable operator*(double c, VectorObservable f);

void require_compatible(VectorObservable const &a, VectorObservable const &b, char const *what);

/// Scalar field omega -> ||f(omega)||_X.
VectorObservable point_norm_field(VectorObservable const &f, NormSpec ns = {});

/// (sum_omega mu_omega ||f(omega)||_X^p)^(1/p); p >= 1.
double lp_norm(VectorObservable const &f, double p, NormSpec ns = {});

/// Essential supremum of the point norm. Every point carries mass, so this is a max.
double linf_norm(VectorObservable const &f, NormSpec ns = {});

/// Orlicz functional sum_omega mu_omega ||f|| (ln max(1, ||f||))^m, natural log.
double llog_norm(VectorObservable const &f, unsigned m, NormSpec ns = {});

/// Raw integral sum_omega mu_omega f(omega).
std::vector<double> integral(VectorObservable const &f);
/// Integral divided by the total mass.
std::vector<double> mean(VectorObservable const &f);

} // namespace mergo
