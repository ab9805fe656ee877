#include "mergo/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mergo {

namespace {

constexpr double kTolerance = 1e-12;

// Absolute up to magnitude 1e3, relative beyond.
double tolerance_for(double magnitude) {
  double const m = std::abs(magnitude);
  return m <= 1e3 ? kTolerance : kTolerance * m;
}

std::uint64_t checked_lcm(std::uint64_t a, std::uint64_t b) {
  std::uint64_t const g = std::gcd(a, b);
  std::uint64_t const q = a / g;
  if (q > std::numeric_limits<std::uint64_t>::max() / b)
    throw Error("permutation period overflows 64 bits");
  return q * b;
}

} // namespace

Endomorphism::Endomorphism(SpaceRef space, std::vector<std::size_t> map)
    : space_(std::move(space)), map_(std::move(map)) {
  if (!space_)
    throw Error("endomorphism needs a measure space");
  std::size_t const n = space_->size();
  if (map_.size() != n)
    throw Error("endomorphism has " + std::to_string(map_.size()) + " images for " +
                std::to_string(n) + " points");

  std::vector<double> preimage_mass(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (map_[i] >= n)
      throw Error("endomorphism sends point " + std::to_string(i) + " outside the space");
    preimage_mass[map_[i]] += space_->weight(i);
  }
  for (std::size_t y = 0; y < n; ++y) {
    double const w = space_->weight(y);
    if (std::abs(preimage_mass[y] - w) > kTolerance * std::max(1.0, w))
      throw Error("map is not measure preserving at point " + std::to_string(y) +
                  ": mu(tau^-1{y}) = " + std::to_string(preimage_mass[y]) +
                  ", mu(y) = " + std::to_string(w));
  }
  std::vector<bool> hit(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (hit[map_[i]])
      throw Error("measure-preserving map must be a permutation; point " +
                  std::to_string(map_[i]) + " has two preimages");
    hit[map_[i]] = true;
  }

  std::vector<bool> seen(n, false);
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start])
      continue;
    std::vector<std::size_t> cycle;
    for (std::size_t x = start; !seen[x]; x = map_[x]) {
      seen[x] = true;
      cycle.push_back(x);
    }
    period_ = checked_lcm(period_, cycle.size());
    cycles_.push_back(std::move(cycle));
  }
}

Endomorphism Endomorphism::identity(SpaceRef space) {
  std::vector<std::size_t> map(space->size());
  std::iota(map.begin(), map.end(), std::size_t{0});
  return Endomorphism(std::move(space), std::move(map));
}

Endomorphism Endomorphism::rotation(SpaceRef space, std::size_t shift) {
  std::size_t const n = space->size();
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i)
    map[i] = (i + shift) % n;
  return Endomorphism(std::move(space), std::move(map));
}

Endomorphism Endomorphism::from_cycle_lengths(SpaceRef space,
                                              std::vector<std::size_t> const &lengths) {
  std::size_t const n = space->size();
  std::vector<std::size_t> map(n);
  std::iota(map.begin(), map.end(), std::size_t{0});
  std::size_t start = 0;
  for (std::size_t len : lengths) {
    if (len == 0 || start + len > n)
      throw Error("cycle lengths do not fit the space");
    for (std::size_t k = 0; k < len; ++k)
      map[start + k] = start + (k + 1) % len;
    start += len;
  }
  return Endomorphism(std::move(space), std::move(map));
}

Endomorphism Endomorphism::power(std::size_t k) const {
  std::vector<std::size_t> out(map_.size());
  for (auto const &cycle : cycles_) {
    std::size_t const len = cycle.size();
    for (std::size_t j = 0; j < len; ++j)
      out[cycle[j]] = cycle[(j + k) % len];
  }
  return Endomorphism(space_, std::move(out));
}

Endomorphism Endomorphism::then(Endomorphism const &other) const {
  require_same_space(space_, other.space_, "Endomorphism::then");
  std::vector<std::size_t> out(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i)
    out[i] = other.map_[map_[i]];
  return Endomorphism(space_, std::move(out));
}

bool Endomorphism::commutes_with(Endomorphism const &other) const {
  require_same_space(space_, other.space_, "Endomorphism::commutes_with");
  for (std::size_t i = 0; i < map_.size(); ++i)
    if (other.map_[map_[i]] != map_[other.map_[i]])
      return false;
  return true;
}

VectorObservable koopman(VectorObservable const &f, Endomorphism const &t) {
  require_same_space(f.space(), t.space(), "koopman");
  std::size_t const d = f.dim();
  std::vector<double> out(f.values().size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto src = f.row(t(i));
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return VectorObservable(f.space(), d, std::move(out));
}

VectorObservable cond_expect(VectorObservable const &f, Partition const &p) {
  require_same_space(f.space(), p.space(), "cond_expect");
  MeasureSpace const &space = *f.space();
  std::size_t const d = f.dim();
  std::vector<double> sums(p.block_count() * d, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double const w = space.weight(i);
    double *acc = sums.data() + p.block_of(i) * d;
    auto r = f.row(i);
    for (std::size_t j = 0; j < d; ++j)
      acc[j] += w * r[j];
  }
  for (std::size_t b = 0; b < p.block_count(); ++b) {
    double const m = p.block_mass(b);
    for (std::size_t j = 0; j < d; ++j)
      sums[b * d + j] /= m;
  }
  std::vector<double> out(f.values().size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double const *src = sums.data() + p.block_of(i) * d;
    std::copy(src, src + d, out.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return VectorObservable(f.space(), d, std::move(out));
}

DominationReport check_positive_domination(VectorOperator const &apply_t,
                                           VectorOperator const &apply_dominant,
                                           std::vector<VectorObservable> const &samples,
                                           NormSpec ns) {
  DominationReport report;
  report.passed = true;
  for (auto const &f : samples) {
    DominationSample s;
    VectorObservable const tf = apply_t(f);
    VectorObservable const norm_f = point_norm_field(f, ns);
    VectorObservable const dom = apply_dominant(norm_f);
    require_same_space(tf.space(), dom.space(), "check_positive_domination");

    s.max_slack = -std::numeric_limits<double>::infinity();
    s.min_dominant_value = std::numeric_limits<double>::infinity();
    bool pointwise = true;
    for (std::size_t i = 0; i < tf.size(); ++i) {
      double const slack = point_norm(tf.row(i), ns) - dom(i, 0);
      s.max_slack = std::max(s.max_slack, slack);
      s.min_dominant_value = std::min(s.min_dominant_value, dom(i, 0));
      pointwise = pointwise && slack <= tolerance_for(dom(i, 0));
    }
    s.dominant_l1 = lp_norm(dom, 1.0);
    s.input_l1 = lp_norm(norm_f, 1.0);
    s.passed = pointwise && s.min_dominant_value >= -kTolerance &&
               s.dominant_l1 <= s.input_l1 + tolerance_for(s.input_l1);
    report.passed = report.passed && s.passed;
    report.samples.push_back(s);
  }
  return report;
}

ContractionReport check_L1_Linf_contraction(VectorOperator const &apply_t,
                                            std::vector<VectorObservable> const &samples,
                                            NormSpec ns) {
  ContractionReport report;
  report.passed = true;
  for (auto const &f : samples) {
    ContractionSample s;
    VectorObservable const tf = apply_t(f);
    s.l1_in = lp_norm(f, 1.0, ns);
    s.l1_out = lp_norm(tf, 1.0, ns);
    s.linf_in = linf_norm(f, ns);
    s.linf_out = linf_norm(tf, ns);
    s.passed = s.l1_out <= s.l1_in + tolerance_for(s.l1_in) &&
               s.linf_out <= s.linf_in + tolerance_for(s.linf_in);
    report.passed = report.passed && s.passed;
    report.samples.push_back(s);
  }
  return report;
}

} // namespace mergo
