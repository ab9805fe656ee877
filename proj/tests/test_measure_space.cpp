#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mergo/generators.hpp"
#include "mergo/measure_space.hpp"

using namespace mergo;

namespace {

Partition pairs(SpaceRef s) { return Partition::from_blocks(s, {{0, 1}, {2, 3}}); }
Partition cross_pairs(SpaceRef s) { return Partition::from_blocks(s, {{0, 2}, {1, 3}}); }

Partition random_partition(Rng &rng, SpaceRef const &s) {
  std::size_t const k = 1 + rng.index(s->size());
  std::vector<std::size_t> labels(s->size());
  for (auto &l : labels)
    l = rng.index(k);
  return Partition(s, labels);
}

} // namespace

TEST_CASE("make_space") {
  CHECK(make_space({0.25, 0.25, 0.25, 0.25})->total_mass() == 1.0);
  auto one = make_space({1.0});
  CHECK(one->size() == 1);
  CHECK(one->total_mass() == 1.0);
  CHECK(make_space({0.1, 0.2, 0.3, 0.4})->total_mass() == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(make_space({}), Error);
  CHECK_THROWS_AS(make_space({0.5, 0.0}), Error);
  CHECK_THROWS_AS(make_space({0.5, -1.0}), Error);
}

TEST_CASE("partition labels are canonical") {
  auto s = uniform_space(4);
  Partition const a(s, {7, 7, 3, 3});
  Partition const b(s, {0, 0, 1, 1});
  CHECK(a == b);
  CHECK(a.block_count() == 2);
  CHECK(a.block_mass(0) == 0.5);
  CHECK_THROWS_AS(Partition(s, {0, 1}), Error);
  CHECK_THROWS_AS(Partition::from_blocks(s, {{0, 1}, {1, 2, 3}}), Error);
  CHECK_THROWS_AS(Partition::from_blocks(s, {{0, 1}, {2}}), Error);
}

TEST_CASE("refines") {
  auto s = uniform_space(4);
  CHECK(refines(Partition::singletons(s), pairs(s)));
  CHECK_FALSE(refines(pairs(s), cross_pairs(s)));
  CHECK(refines(pairs(s), pairs(s)));
  CHECK(refines(pairs(s), Partition::trivial(s)));
  CHECK_FALSE(refines(Partition::trivial(s), pairs(s)));
  CHECK_THROWS_AS(refines(pairs(s), Partition::singletons(uniform_space(5))), Error);
}

TEST_CASE("join and meet") {
  auto s = uniform_space(4);
  CHECK(partition_join(pairs(s), cross_pairs(s)) == Partition::singletons(s));
  CHECK(partition_meet(pairs(s), cross_pairs(s)) == Partition::trivial(s));
  CHECK(partition_join(pairs(s), pairs(s)) == pairs(s));
  CHECK(partition_meet(pairs(s), pairs(s)) == pairs(s));
  CHECK_THROWS_AS(partition_join(pairs(s), Partition::trivial(uniform_space(3))), Error);
}

TEST_CASE("refines is a partial order; join and meet bound both operands") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto s = uniform_space(1 + rng.index(12));
    Partition const a = random_partition(rng, s);
    Partition const b = random_partition(rng, s);
    Partition const c = random_partition(rng, s);
    CHECK(refines(a, a));
    if (refines(a, b) && refines(b, a))
      CHECK(a == b);
    if (refines(a, b) && refines(b, c))
      CHECK(refines(a, c));
    Partition const j = partition_join(a, b);
    Partition const m = partition_meet(a, b);
    CHECK(refines(j, a));
    CHECK(refines(j, b));
    CHECK(refines(a, m));
    CHECK(refines(b, m));
    // Join is the coarsest common refinement, meet the finest common coarsening.
    if (refines(c, a) && refines(c, b))
      CHECK(refines(c, j));
    if (refines(a, c) && refines(b, c))
      CHECK(refines(m, c));
  }
}

TEST_CASE("filtration_limit") {
  auto s = uniform_space(4);
  Filtration const inc(Direction::increasing,
                       {Partition::trivial(s), pairs(s), Partition::singletons(s)});
  CHECK(filtration_limit(inc) == Partition::singletons(s));
  Filtration const dec(Direction::decreasing,
                       {Partition::singletons(s), pairs(s), Partition::trivial(s)});
  CHECK(filtration_limit(dec) == Partition::trivial(s));
  Filtration const one(Direction::increasing, {pairs(s)});
  CHECK(filtration_limit(one) == pairs(s));
}

TEST_CASE("filtration rejects monotonicity violations and names the stage") {
  auto s = uniform_space(4);
  try {
    Filtration(Direction::decreasing,
               {Partition::singletons(s), pairs(s), cross_pairs(s)});
    FAIL("expected an error");
  } catch (Error const &e) {
    CHECK(std::string(e.what()).find("stage 2") != std::string::npos);
  }
  CHECK_THROWS_AS(Filtration(Direction::increasing, {Partition::singletons(s), pairs(s)}),
                  Error);
  CHECK_THROWS_AS(Filtration(Direction::increasing, {}), Error);
}

TEST_CASE("random filtrations are monotone in the declared direction") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = uniform_space(2 + rng.index(30));
    Direction const dir = rng.coin() ? Direction::increasing : Direction::decreasing;
    Filtration const f = random_filtration(rng, s, dir, 1 + rng.index(6));
    for (std::size_t k = 1; k < f.stage_count(); ++k) {
      if (dir == Direction::increasing)
        CHECK(refines(f.stage(k), f.stage(k - 1)));
      else
        CHECK(refines(f.stage(k - 1), f.stage(k)));
    }
  }
}
