#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "mergo/error.hpp"

namespace mergo {

/// A finite measure space: points 0..N-1 carrying strictly positive masses.
class MeasureSpace {
public:
  explicit MeasureSpace(std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  double total_mass() const { return total_mass_; }

  bool operator==(MeasureSpace const &other) const {
    return weights_ == other.weights_;
  }

private:
  std::vector<double> weights_;
  double total_mass_ = 0.0;
};

using SpaceRef = std::shared_ptr<const MeasureSpace>;

SpaceRef make_space(std::vector<double> weights);
SpaceRef uniform_space(std::size_t n, double total_mass = 1.0);

/// Two references denote the same space if they alias or carry equal weights.
bool same_space(SpaceRef const &a, SpaceRef const &b);
void require_same_space(SpaceRef const &a, SpaceRef const &b, char const *what);

/// The sigma-subalgebra generated by a partition of the points into blocks.
///
/// Labels are canonicalized by first occurrence, so two partitions with the
/// same blocks compare equal regardless of the labels they were built from.
class Partition {
public:
  Partition(SpaceRef space, std::vector<std::size_t> labels);

  static Partition singletons(SpaceRef space);
  static Partition trivial(SpaceRef space);
  static Partition from_blocks(SpaceRef space,
                               std::vector<std::vector<std::size_t>> const &blocks);

  SpaceRef const &space() const { return space_; }
  std::size_t size() const { return block_of_.size(); }
  std::size_t block_count() const { return block_mass_.size(); }
  std::size_t block_of(std::size_t i) const { return block_of_[i]; }
  std::span<const std::size_t> labels() const { return block_of_; }
  double block_mass(std::size_t b) const { return block_mass_[b]; }

  std::vector<std::vector<std::size_t>> blocks() const;

  bool operator==(Partition const &other) const {
    return block_of_ == other.block_of_ && same_space(space_, other.space_);
  }

private:
  SpaceRef space_;
  std::vector<std::size_t> block_of_;
  std::vector<double> block_mass_;
};

/// True iff every block of `fine` lies inside a single block of `coarse`.
bool refines(Partition const &fine, Partition const &coarse);

/// Coarsest common refinement.
Partition partition_join(Partition const &a, Partition const &b);
/// Finest common coarsening: connected components of overlapping blocks.
Partition partition_meet(Partition const &a, Partition const &b);

enum class Direction { increasing, decreasing };

char const *to_string(Direction d);

/// A monotone chain of partitions. On a finite space the chain has
/// stabilized at its last stage, which serves as the limit algebra.
class Filtration {
public:
  Filtration(Direction direction, std::vector<Partition> stages);

  SpaceRef const &space() const { return stages_.front().space(); }
  Direction direction() const { return direction_; }
  std::size_t stage_count() const { return stages_.size(); }
  Partition const &stage(std::size_t k) const;
  std::vector<Partition> const &stages() const { return stages_; }
  Partition const &limit() const { return stages_.back(); }

private:
  Direction direction_;
  std::vector<Partition> stages_;
};

Partition const &filtration_limit(Filtration const &f);

} // namespace mergo
