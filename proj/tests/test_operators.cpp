#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mergo/generators.hpp"
#include "mergo/operators.hpp"
#include "test_support.hpp"

using namespace mergo;
using testing::max_diff;

namespace {

VectorObservable f1357(SpaceRef s) { return VectorObservable::scalar(s, {1, 3, 5, 7}); }

} // namespace

TEST_CASE("endomorphism validation") {
  auto s = uniform_space(4);
  CHECK_NOTHROW(Endomorphism(s, {1, 2, 3, 0}));
  CHECK_THROWS_AS(Endomorphism(s, {1, 1, 3, 0}), Error);
  CHECK_THROWS_AS(Endomorphism(s, {1, 2, 3, 4}), Error);
  CHECK_THROWS_AS(Endomorphism(s, {1, 0}), Error);

  // A transposition of two points with different masses moves mass.
  auto w = make_space({0.1, 0.2, 0.3, 0.4});
  CHECK_THROWS_AS(Endomorphism(w, {1, 0, 2, 3}), Error);
  auto orbit_constant = make_space({0.2, 0.2, 0.3, 0.3});
  CHECK_NOTHROW(Endomorphism(orbit_constant, {1, 0, 3, 2}));

  Endomorphism const t(s, {1, 2, 3, 0});
  CHECK(t.period() == 4);
  CHECK(t.cycles().size() == 1);
  CHECK(Endomorphism::from_cycle_lengths(uniform_space(7), {2, 3, 2}).period() == 6);
  CHECK(t.power(2) == t.then(t));
  CHECK(t.commutes_with(t.power(3)));
}

TEST_CASE("koopman") {
  auto s = uniform_space(4);
  auto f = f1357(s);
  CHECK(koopman(f, Endomorphism::identity(s)).values() == f.values());
  Endomorphism const shift = Endomorphism::rotation(s);
  CHECK(koopman(f, shift).values() == std::vector<double>{3, 5, 7, 1});
  CHECK(koopman(koopman(f, shift), shift).values() == std::vector<double>{5, 7, 1, 3});
  CHECK(koopman(f, shift.power(2)).values() == std::vector<double>{5, 7, 1, 3});
  CHECK_THROWS_AS(koopman(f, Endomorphism::identity(uniform_space(3))), Error);
}

TEST_CASE("cond_expect") {
  auto s = uniform_space(4);
  auto f = f1357(s);
  CHECK(cond_expect(f, Partition::from_blocks(s, {{0, 1}, {2, 3}})).values() ==
        std::vector<double>{2, 2, 6, 6});
  CHECK(cond_expect(f, Partition::singletons(s)).values() == f.values());
  CHECK(cond_expect(f, Partition::trivial(s)).values() == std::vector<double>{4, 4, 4, 4});

  auto w = make_space({0.1, 0.3, 0.2, 0.4});
  auto g = VectorObservable::scalar(w, {1, 3, 5, 7});
  auto e = cond_expect(g, Partition::from_blocks(w, {{0, 1}, {2, 3}}));
  CHECK(e(0, 0) == doctest::Approx((0.1 + 0.9) / 0.4).epsilon(1e-15));
  CHECK(e(2, 0) == doctest::Approx((1.0 + 2.8) / 0.6).epsilon(1e-15));
}

TEST_CASE("conditional expectation algebra against the block-average oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t const n = 1 + rng.index(60);
    std::size_t const d = 1 + rng.index(5);
    SpaceRef const s = rng.coin() ? uniform_space(n) : [&] {
      std::vector<double> w(n);
      for (auto &x : w)
        x = rng.uniform(0.05, 2.0);
      return make_space(w);
    }();
    Filtration const chain = random_filtration(rng, s, Direction::decreasing, 3);
    Partition const &fine = chain.stage(0 + rng.index(2));
    Partition const &coarse = chain.stage(2);
    auto f = random_observable(rng, s, d, "normal", 0.0, 5.0);
    NormSpec const ns = rng.coin() ? NormSpec(2.0) : NormSpec::infinity();

    auto const e = cond_expect(f, fine);
    CHECK(max_diff(e, oracle::block_average(testing::rows_of(f), testing::weights_of(s),
                                            {fine.labels().begin(), fine.labels().end()})) <=
          1e-12);
    CHECK(max_diff(cond_expect(e, fine), e) <= 1e-12);
    CHECK(max_diff(cond_expect(e, coarse), cond_expect(f, coarse)) <= 1e-12);
    auto const mf = mean(f), me = mean(e);
    for (std::size_t j = 0; j < d; ++j)
      CHECK(std::abs(mf[j] - me[j]) <= 1e-12);
    for (double p : {1.0, 1.5, 2.0, 3.0})
      CHECK(lp_norm(e, p, ns) <= lp_norm(f, p, ns) + 1e-12);
    auto const dom = cond_expect(point_norm_field(f, ns), fine);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(point_norm(e.row(i), ns) <= dom(i, 0) + 1e-12);
  }
}

TEST_CASE("koopman is an isometry for measure-preserving permutations") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t const n = 1 + rng.index(50);
    auto const perm = random_permutation(rng, n);
    SpaceRef const s = make_space(orbit_constant_weights(rng, perm));
    Endomorphism const t(s, perm);
    auto f = random_observable(rng, s, 3, "normal", 1.0, 2.0);
    for (double p : {1.0, 2.0, 3.5})
      CHECK(std::abs(lp_norm(koopman(f, t), p) - lp_norm(f, p)) <= 1e-12);
  }
}

TEST_CASE("check_positive_domination") {
  Rng rng(29);
  auto s = uniform_space(12);
  auto const perm = random_permutation(rng, 12);
  Endomorphism const t(s, perm);
  Partition const p = random_filtration(rng, s, Direction::decreasing, 3).stage(1);
  std::vector<VectorObservable> samples;
  for (int k = 0; k < 10; ++k)
    samples.push_back(random_observable(rng, s, 3, "normal", 0.0, 1.0));

  auto koop = [&](VectorObservable const &f) { return koopman(f, t); };
  auto rep = check_positive_domination(koop, koop, samples);
  CHECK(rep.passed);
  for (auto const &x : rep.samples)
    CHECK(x.max_slack == 0.0);

  auto ce = [&](VectorObservable const &f) { return cond_expect(f, p); };
  CHECK(check_positive_domination(ce, ce, samples).passed);

  auto twice = [](VectorObservable const &f) { return 2.0 * f; };
  auto ident = [](VectorObservable const &f) { return f; };
  auto bad = check_positive_domination(twice, ident, samples);
  CHECK_FALSE(bad.passed);
  for (auto const &x : bad.samples)
    CHECK_FALSE(x.passed);
}

TEST_CASE("check_L1_Linf_contraction") {
  Rng rng(31);
  auto const perm = random_permutation(rng, 20);
  SpaceRef const s = make_space(orbit_constant_weights(rng, perm));
  Endomorphism const t(s, perm);
  Partition const p = random_filtration(rng, s, Direction::decreasing, 3).stage(2);
  std::vector<VectorObservable> samples;
  for (int k = 0; k < 10; ++k)
    samples.push_back(random_observable(rng, s, 2, "exponential", 1.0, 0.0));

  auto rep = check_L1_Linf_contraction([&](VectorObservable const &f) { return koopman(f, t); },
                                       samples);
  CHECK(rep.passed);
  for (auto const &x : rep.samples)
    CHECK(std::abs(x.l1_out - x.l1_in) <= 1e-12);
  CHECK(check_L1_Linf_contraction([&](VectorObservable const &f) { return cond_expect(f, p); },
                                  samples)
            .passed);
  CHECK_FALSE(check_L1_Linf_contraction([](VectorObservable const &f) { return 3.0 * f; },
                                        samples)
                  .passed);
}
