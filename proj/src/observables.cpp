#include "mergo/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mergo {

NormSpec::NormSpec(double exponent) : q(exponent) {
  if (std::isnan(q) || q < 1.0)
    throw Error("norm exponent q must satisfy q >= 1 (got " + std::to_string(q) + ")");
}

double point_norm(std::span<const double> row, NormSpec ns) {
  if (row.size() == 1)
    return std::abs(row[0]);
  if (ns.is_infinite()) {
    double m = 0.0;
    for (double x : row)
      m = std::max(m, std::abs(x));
    return m;
  }
  if (ns.q == 1.0) {
    double s = 0.0;
    for (double x : row)
      s += std::abs(x);
    return s;
  }
  if (ns.q == 2.0) {
    double s = 0.0;
    for (double x : row)
      s += x * x;
    return std::sqrt(s);
  }
  // Scale by the max entry so large q does not overflow.
  double m = 0.0;
  for (double x : row)
    m = std::max(m, std::abs(x));
  if (m == 0.0)
    return 0.0;
  double s = 0.0;
  for (double x : row)
    s += std::pow(std::abs(x) / m, ns.q);
  return m * std::pow(s, 1.0 / ns.q);
}

VectorObservable::VectorObservable(SpaceRef space, std::size_t dim, std::vector<double> values)
    : space_(std::move(space)), dim_(dim), values_(std::move(values)) {
  if (!space_)
    throw Error("observable needs a measure space");
  if (dim_ == 0)
    throw Error("observable dimension must be positive");
  if (values_.size() != space_->size() * dim_)
    throw Error("observable has " + std::to_string(values_.size()) + " entries, expected " +
                std::to_string(space_->size()) + " x " + std::to_string(dim_));
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (!std::isfinite(values_[k]))
      throw Error("observable entry (" + std::to_string(k / dim_) + "," +
                  std::to_string(k % dim_) + ") is not finite");
}

VectorObservable VectorObservable::zeros(SpaceRef space, std::size_t dim) {
  std::size_t const n = space->size();
  return VectorObservable(std::move(space), dim, std::vector<double>(n * dim, 0.0));
}

VectorObservable VectorObservable::scalar(SpaceRef space, std::vector<double> values) {
  return VectorObservable(std::move(space), 1, std::move(values));
}

VectorObservable VectorObservable::constant(SpaceRef space, std::vector<double> value) {
  std::size_t const n = space->size();
  std::size_t const d = value.size();
  std::vector<double> values;
  values.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i)
    values.insert(values.end(), value.begin(), value.end());
  return VectorObservable(std::move(space), d, std::move(values));
}

VectorObservable VectorObservable::from_rows(SpaceRef space,
                                             std::vector<std::vector<double>> const &rows) {
  if (rows.empty())
    throw Error("observable needs at least one row");
  std::size_t const d = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d)
      throw Error("observable row " + std::to_string(i) + " has " +
                  std::to_string(rows[i].size()) + " entries, expected " + std::to_string(d));
    values.insert(values.end(), rows[i].begin(), rows[i].end());
  }
  return VectorObservable(std::move(space), d, std::move(values));
}

void require_compatible(VectorObservable const &a, VectorObservable const &b, char const *what) {
  require_same_space(a.space(), b.space(), what);
  if (a.dim() != b.dim())
    throw Error(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                " vs " + std::to_string(b.dim()) + ")");
}

VectorObservable &VectorObservable::operator+=(VectorObservable const &rhs) {
  require_compatible(*this, rhs, "observable +");
  for (std::size_t k = 0; k < values_.size(); ++k)
    values_[k] += rhs.values_[k];
  return *this;
}

VectorObservable &VectorObservable::operator-=(VectorObservable const &rhs) {
  require_compatible(*this, rhs, "observable -");
  for (std::size_t k = 0; k < values_.size(); ++k)
    values_[k] -= rhs.values_[k];
  return *this;
}

VectorObservable &VectorObservable::operator*=(double c) {
  for (double &x : values_)
    x *= c;
  return *this;
}

VectorObservable operator+(VectorObservable lhs, VectorObservable const &rhs) {
  lhs += rhs;
  return lhs;
}

VectorObservable operator-(VectorObservable lhs, VectorObservable const &rhs) {
  lhs -= rhs;
  return lhs;
}

VectorObservable operator*(double c, VectorObservable f) {
  f *= c;
  return f;
}

VectorObservable point_norm_field(VectorObservable const &f, NormSpec ns) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    out[i] = point_norm(f.row(i), ns);
  return VectorObservable::scalar(f.space(), std::move(out));
}

double lp_norm(VectorObservable const &f, double p, NormSpec ns) {
  if (std::isnan(p) || p < 1.0)
    throw Error("lp_norm requires p >= 1 (got " + std::to_string(p) + ")");
  MeasureSpace const &space = *f.space();
  if (p == std::numeric_limits<double>::infinity())
    return linf_norm(f, ns);
  double s = 0.0;
  if (p == 1.0) {
    for (std::size_t i = 0; i < f.size(); ++i)
      s += space.weight(i) * point_norm(f.row(i), ns);
    return s;
  }
  for (std::size_t i = 0; i < f.size(); ++i)
    s += space.weight(i) * std::pow(point_norm(f.row(i), ns), p);
  return std::pow(s, 1.0 / p);
}

double linf_norm(VectorObservable const &f, NormSpec ns) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    m = std::max(m, point_norm(f.row(i), ns));
  return m;
}

double llog_norm(VectorObservable const &f, unsigned m, NormSpec ns) {
  MeasureSpace const &space = *f.space();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double const r = point_norm(f.row(i), ns);
    double const lg = std::log(std::max(1.0, r));
    s += space.weight(i) * r * std::pow(lg, static_cast<double>(m));
  }
  return s;
}

std::vector<double> integral(VectorObservable const &f) {
  MeasureSpace const &space = *f.space();
  std::vector<double> out(f.dim(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto r = f.row(i);
    for (std::size_t j = 0; j < f.dim(); ++j)
      out[j] += space.weight(i) * r[j];
  }
  return out;
}

std::vector<double> mean(VectorObservable const &f) {
  auto out = integral(f);
  double const total = f.space()->total_mass();
  for (double &x : out)
    x /= total;
  return out;
}

} // namespace mergo
