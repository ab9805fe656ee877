#include "mergo/measure_space.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace mergo {

MeasureSpace::MeasureSpace(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty())
    throw Error("measure space needs at least one point");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    double const w = weights_[i];
    if (!std::isfinite(w) || !(w > 0.0))
      throw Error("weight " + std::to_string(i) + " must be finite and > 0");
  }
  for (double w : weights_)
    total_mass_ += w;
}

SpaceRef make_space(std::vector<double> weights) {
  return std::make_shared<const MeasureSpace>(std::move(weights));
}

SpaceRef uniform_space(std::size_t n, double total_mass) {
  if (n == 0)
    throw Error("measure space needs at least one point");
  return make_space(std::vector<double>(n, total_mass / static_cast<double>(n)));
}

bool same_space(SpaceRef const &a, SpaceRef const &b) {
  if (!a || !b)
    return false;
  return a == b || *a == *b;
}

void require_same_space(SpaceRef const &a, SpaceRef const &b, char const *what) {
  if (!same_space(a, b))
    throw Error(std::string(what) + ": operands live on different measure spaces");
}

Partition::Partition(SpaceRef space, std::vector<std::size_t> labels)
    : space_(std::move(space)) {
  if (!space_)
    throw Error("partition needs a measure space");
  if (labels.size() != space_->size())
    throw Error("partition has " + std::to_string(labels.size()) + " labels for " +
                std::to_string(space_->size()) + " points");

  std::unordered_map<std::size_t, std::size_t> relabel;
  block_of_.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(labels[i], relabel.size());
    block_of_[i] = it->second;
  }
  block_mass_.assign(relabel.size(), 0.0);
  for (std::size_t i = 0; i < block_of_.size(); ++i)
    block_mass_[block_of_[i]] += space_->weight(i);
}

Partition Partition::singletons(SpaceRef space) {
  std::vector<std::size_t> labels(space->size());
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  return Partition(std::move(space), std::move(labels));
}

Partition Partition::trivial(SpaceRef space) {
  std::vector<std::size_t> labels(space->size(), 0);
  return Partition(std::move(space), std::move(labels));
}

Partition Partition::from_blocks(SpaceRef space,
                                 std::vector<std::vector<std::size_t>> const &blocks) {
  std::size_t const n = space->size();
  std::size_t const unset = n;
  std::vector<std::size_t> labels(n, unset);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i : blocks[b]) {
      if (i >= n)
        throw Error("block " + std::to_string(b) + " names point " + std::to_string(i) +
                    " outside the space");
      if (labels[i] != unset)
        throw Error("point " + std::to_string(i) + " appears in more than one block");
      labels[i] = b;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (labels[i] == unset)
      throw Error("point " + std::to_string(i) + " is not covered by any block");
  return Partition(std::move(space), std::move(labels));
}

std::vector<std::vector<std::size_t>> Partition::blocks() const {
  std::vector<std::vector<std::size_t>> out(block_count());
  for (std::size_t i = 0; i < block_of_.size(); ++i)
    out[block_of_[i]].push_back(i);
  return out;
}

bool refines(Partition const &fine, Partition const &coarse) {
  require_same_space(fine.space(), coarse.space(), "refines");
  std::size_t const unset = coarse.block_count();
  std::vector<std::size_t> image(fine.block_count(), unset);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    std::size_t &target = image[fine.block_of(i)];
    if (target == unset)
      target = coarse.block_of(i);
    else if (target != coarse.block_of(i))
      return false;
  }
  return true;
}

Partition partition_join(Partition const &a, Partition const &b) {
  require_same_space(a.space(), b.space(), "partition_join");
  std::size_t const nb = b.block_count();
  std::vector<std::size_t> labels(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    labels[i] = a.block_of(i) * nb + b.block_of(i);
  return Partition(a.space(), std::move(labels));
}

namespace {

std::size_t find_root(std::vector<std::size_t> &parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

} // namespace

Partition partition_meet(Partition const &a, Partition const &b) {
  require_same_space(a.space(), b.space(), "partition_meet");
  std::size_t const n = a.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});

  auto unite_blocks = [&](Partition const &p) {
    std::vector<std::size_t> first(p.block_count(), n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t &anchor = first[p.block_of(i)];
      if (anchor == n) {
        anchor = i;
        continue;
      }
      std::size_t const ra = find_root(parent, anchor);
      std::size_t const ri = find_root(parent, i);
      if (ra != ri)
        parent[ri] = ra;
    }
  };
  unite_blocks(a);
  unite_blocks(b);

  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i)
    labels[i] = find_root(parent, i);
  return Partition(a.space(), std::move(labels));
}

char const *to_string(Direction d) {
  return d == Direction::increasing ? "increasing" : "decreasing";
}

Filtration::Filtration(Direction direction, std::vector<Partition> stages)
    : direction_(direction), stages_(std::move(stages)) {
  if (stages_.empty())
    throw Error("filtration needs at least one stage");
  for (std::size_t k = 1; k < stages_.size(); ++k) {
    require_same_space(stages_[k - 1].space(), stages_[k].space(), "filtration");
    bool const ok = direction_ == Direction::increasing
                        ? refines(stages_[k], stages_[k - 1])
                        : refines(stages_[k - 1], stages_[k]);
    if (!ok)
      throw Error("filtration stage " + std::to_string(k) + " breaks the " +
                  to_string(direction_) + " order relative to stage " +
                  std::to_string(k - 1));
  }
}

Partition const &Filtration::stage(std::size_t k) const {
  if (k >= stages_.size())
    throw Error("stage index " + std::to_string(k) + " out of range (filtration has " +
                std::to_string(stages_.size()) + " stages)");
  return stages_[k];
}

Partition const &filtration_limit(Filtration const &f) { return f.limit(); }

} // namespace mergo
