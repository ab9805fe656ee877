#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "mergo/generators.hpp"
#include "mergo/inequality_lab.hpp"
#include "test_support.hpp"

using namespace mergo;
using testing::max_diff;

namespace {

struct Demo {
  SpaceRef s = uniform_space(4);
  VectorObservable f = VectorObservable::scalar(s, {1, 3, 5, 7});
  Filtration decreasing{Direction::decreasing,
                        {Partition::singletons(s), Partition::from_blocks(s, {{0, 1}, {2, 3}}),
                         Partition::trivial(s)}};
  Endomorphism cycle = Endomorphism::rotation(s);
  ProcessSpec me = ProcessSpec::single(ProcessKind::martingale_ergodic, f, cycle, decreasing);
};

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

MultiParamSpec two_map_spec(Demo const &d, std::size_t filtrations, bool weighted) {
  std::vector<Filtration> filts(filtrations, d.decreasing);
  std::vector<BesicovitchWeights> ws;
  if (weighted)
    ws = {BesicovitchWeights({{0.6, 0.25, 0.0}}), BesicovitchWeights({{0.5, 0.5, 0.3}})};
  return MultiParamSpec({d.cycle, d.cycle.power(3)}, ws, filts);
}

} // namespace

TEST_CASE("constants") {
  CHECK(dominant_constant(Family::plain, 2.0) == 4.0);
  CHECK(maximal_constant(Family::plain, 2.0) == 4.0);
  CHECK(dominant_constant(Family::plain, 3.0) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(maximal_constant(Family::plain, 3.0) == doctest::Approx(3.375).epsilon(1e-15));
  CHECK(dominant_constant(Family::weighted, 2.0, 0.75) == 3.0);
  CHECK(maximal_constant(Family::weighted, 2.0, 0.75) == 3.0);
  CHECK(dominant_constant(Family::multiparameter, 2.0, 0.5, 2) == 16.0);
  CHECK(maximal_constant(Family::multiparameter, 2.0, 0.5, 2) == 4.0);
  CHECK(dominant_constant(Family::multiparameter, 2.0, 1.0, 2) == 32.0);
  CHECK(maximal_constant(Family::multiparameter, 2.0, 1.0, 2) == 16.0);
  CHECK(dominant_constant(Family::multiparameter, 3.0, 1.0, 1) ==
        doctest::Approx(std::pow(1.5, 5.0)).epsilon(1e-15));
}

TEST_CASE("report tags") {
  Demo d;
  CHECK(dominant_tag(d.me) == "Thm2.4");
  CHECK(maximal_tag(d.me) == "Thm2.5");
  auto const em = d.me.with_kind(ProcessKind::ergodic_martingale);
  CHECK(dominant_tag(em) == "Thm3.4");
  CHECK(maximal_tag(em) == "Thm3.5");
  auto const w = ProcessSpec::single(ProcessKind::martingale_ergodic, d.f, d.cycle, d.decreasing,
                                     BesicovitchWeights({{1.0, 0.5, 0.0}}));
  CHECK(dominant_tag(w) == "Thm4.1-dominant");
  CHECK(maximal_tag(w.with_kind(ProcessKind::ergodic_martingale)) == "Thm4.2-maximal");
  auto const mp = ProcessSpec::multi(ProcessKind::martingale_ergodic, d.f, two_map_spec(d, 3, false),
                                     false);
  CHECK(dominant_tag(mp) == "Thm4.3-dominant");
  CHECK(maximal_tag(mp) == "Thm4.3-maximal");
  CHECK(dominant_tag(mp.with_kind(ProcessKind::ergodic_martingale)) == "Thm4.4-dominant");
}

TEST_CASE("sup_field") {
  Demo d;
  auto const single = sup_field(d.me, SupBox{{1}, {1}});
  CHECK(max_diff(single, point_norm_field(evaluate(d.me, 1, 0), NormSpec{})) == 0.0);

  // Exhaustive enumeration over n1 <= 4 and all three stages, via the oracles.
  auto const mu = testing::weights_of(d.s);
  std::vector<double> want(4, 0.0);
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t s = 0; s < 3; ++s) {
      auto const &stage = d.decreasing.stage(s);
      auto const g = oracle::block_average(
          oracle::orbit_average(testing::rows_of(d.f), d.cycle.map(), n), mu,
          {stage.labels().begin(), stage.labels().end()});
      for (std::size_t i = 0; i < 4; ++i)
        want[i] = std::max(want[i], std::abs(g[i][0]));
    }
  auto const got = sup_field(d.me, SupBox{{4}, {3}});
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(got(i, 0) == doctest::Approx(want[i]).epsilon(1e-14));
  CHECK(got.values() == std::vector<double>{4, 5, 6, 7});

  CHECK_THROWS_AS(sup_field(d.me, SupBox{{0}, {1}}), Error);
  CHECK_THROWS_AS(sup_field(d.me, SupBox{{2}, {4}}), Error);
  CHECK_THROWS_AS(sup_field(d.me, SupBox{{2, 2}, {1}}), Error);
}

TEST_CASE("sup_field matches evaluate on random boxes") {
  Rng rng(83);
  for (int trial = 0; trial < 40; ++trial) {
    Family const fam = trial % 3 == 0 ? Family::multiparameter
                       : trial % 3 == 1 ? Family::weighted
                                        : Family::plain;
    auto const kind = trial % 2 ? ProcessKind::ergodic_martingale : ProcessKind::martingale_ergodic;
    auto const spec = random_process(rng, fam, kind, 2.0);
    SupBox box;
    for (std::size_t j = 0; j < spec.maps().size(); ++j)
      box.n_max.push_back(1 + rng.index(6));
    for (auto const &f : spec.filtrations())
      box.stage_count.push_back(1 + rng.index(f.stage_count()));

    std::vector<double> want(spec.f().size(), 0.0);
    ProcessIndex idx{std::vector<std::size_t>(box.n_max.size(), 1),
                     std::vector<std::size_t>(box.stage_count.size(), 0)};
    // Odometer over the whole box.
    while (true) {
      auto const g = point_norm_field(evaluate(spec, idx), spec.norm());
      for (std::size_t i = 0; i < want.size(); ++i)
        want[i] = std::max(want[i], g(i, 0));
      std::size_t k = 0;
      for (; k < idx.n.size(); ++k) {
        if (++idx.n[k] <= box.n_max[k])
          break;
        idx.n[k] = 1;
      }
      if (k < idx.n.size())
        continue;
      std::size_t m = 0;
      for (; m < idx.s.size(); ++m) {
        if (++idx.s[m] < box.stage_count[m])
          break;
        idx.s[m] = 0;
      }
      if (m == idx.s.size())
        break;
    }
    CHECK(max_diff(sup_field(spec, box), VectorObservable::scalar(spec.space(), want)) == 0.0);
  }
}

TEST_CASE("dominant_check") {
  Demo d;
  auto const r = dominant_check(d.me, 2.0, SupBox{{4}, {3}});
  CHECK(r.theorem_tag == "Thm2.4");
  CHECK(r.constant == 4.0);
  CHECK(r.f_norm == doctest::Approx(std::sqrt(21.0)).epsilon(1e-15));
  CHECK(r.lhs == doctest::Approx(std::sqrt((16.0 + 25 + 36 + 49) / 4)).epsilon(1e-14));
  CHECK(r.rhs == doctest::Approx(4.0 * std::sqrt(21.0)).epsilon(1e-15));
  CHECK(r.satisfied);
  CHECK(r.margin == doctest::Approx(r.rhs - r.lhs));
  REQUIRE(r.orlicz.has_value());
  CHECK(r.orlicz->finite);
  CHECK(r.orlicz->m == 1);
  CHECK(r.hypothesis_l1 > 0.0);
  CHECK_FALSE(r.epsilon.has_value());

  auto const zero = dominant_check(d.me.with_observable(VectorObservable::zeros(d.s, 2)), 2.0);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.satisfied);

  auto const def = dominant_check(d.me, 2.0);
  CHECK(def.truncation.n_max == std::vector<std::size_t>{16});
  CHECK(def.truncation.stage_count == std::vector<std::size_t>{3});
}

TEST_CASE("hypothesis errors") {
  Demo d;
  CHECK_THROWS_AS(dominant_check(d.me, 1.0), Error);
  CHECK_THROWS_AS(dominant_check(d.me, 0.5), Error);
  CHECK_THROWS_AS(maximal_check(d.me, 1.0, 1.0, default_box(d.me)), Error);
  CHECK_THROWS_AS(maximal_check(d.me, 2.0, 0.0, default_box(d.me)), Error);

  Filtration const inc(Direction::increasing,
                       {Partition::trivial(d.s), Partition::singletons(d.s)});
  auto const me_inc = ProcessSpec::single(ProcessKind::martingale_ergodic, d.f, d.cycle, inc);
  CHECK_THROWS_WITH_AS(dominant_check(me_inc, 2.0), doctest::Contains("decreasing"), Error);
  CHECK_THROWS_AS(maximal_check(me_inc, 2.0, 1.0, default_box(me_inc)), Error);
  auto const em_inc = me_inc.with_kind(ProcessKind::ergodic_martingale);
  CHECK(dominant_check(em_inc, 2.0).satisfied);
  CHECK(maximal_check(em_inc, 2.0, 1.0, default_box(em_inc)).satisfied);
  auto const w_inc = ProcessSpec::single(ProcessKind::ergodic_martingale, d.f, d.cycle, inc,
                                         BesicovitchWeights({{1.0, 0.5, 0.0}}));
  CHECK_THROWS_AS(dominant_check(w_inc, 2.0), Error);

  auto const mp = ProcessSpec::multi(ProcessKind::martingale_ergodic, d.f, two_map_spec(d, 3, true),
                                     true);
  CHECK(dominant_check(mp, 2.0).satisfied);
  CHECK_THROWS_AS(dominant_check(mp, 2.5), Error);
  CHECK_THROWS_AS(dominant_check(mp, 3.0), Error);
  auto const mp_em = mp.with_kind(ProcessKind::ergodic_martingale);
  CHECK(dominant_check(mp_em, 2.0).satisfied);
  CHECK_THROWS_WITH_AS(maximal_check(mp_em, 2.0, 1.0, default_box(mp_em)),
                       doctest::Contains("no maximal inequality"), Error);
}

TEST_CASE("maximal_check and epsilon_sweep") {
  Demo d;
  SupBox const box{{4}, {3}};
  auto const r = maximal_check(d.me, 2.0, 5.0, box);
  CHECK(r.theorem_tag == "Thm2.5");
  CHECK(r.lhs == 0.75);  // sup field {4,5,6,7}
  CHECK(r.rhs == doctest::Approx(4.0 * 21.0 / 25.0).epsilon(1e-15));
  CHECK(r.epsilon == 5.0);
  CHECK(r.satisfied);
  CHECK(maximal_check(d.me, 2.0, 7.5, box).lhs == 0.0);

  auto const sweep = epsilon_sweep(d.me, 2.0, log_spaced(0.01, 100.0, 25), box);
  REQUIRE(sweep.size() == 25);
  CHECK(sweep.front().lhs == 1.0);
  CHECK(sweep.back().lhs == 0.0);
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    CHECK(sweep[k].lhs <= sweep[k - 1].lhs);
    CHECK(sweep[k].satisfied);
  }
  CHECK_THROWS_AS(epsilon_sweep(d.me, 2.0, {}, box), Error);
  CHECK_THROWS_AS(epsilon_sweep(d.me, 2.0, {1.0, 1.0}, box), Error);
  CHECK_THROWS_AS(log_spaced(0.0, 1.0, 3), Error);
}

TEST_CASE("a weight of modulus above one breaks the maximal bound with a linear alpha") {
  // tau = id, one trivial stage, f = 1, alpha = 8: the sup field is 8
  // everywhere, so mu{sup >= 8} = 1 while alpha (p/(p-1))^p / 8^p = 0.5.
  auto const s = uniform_space(3);
  auto const spec = ProcessSpec::single(
      ProcessKind::martingale_ergodic, VectorObservable::constant(s, {1.0}),
      Endomorphism::identity(s), Filtration(Direction::decreasing, {Partition::trivial(s)}),
      BesicovitchWeights::constant(8.0));
  auto const box = default_box(spec);
  auto const r = maximal_check(spec, 2.0, 8.0, box);
  CHECK(r.alpha == 8.0);
  CHECK(r.lhs == 1.0);
  CHECK(r.rhs == 0.5);
  CHECK_FALSE(r.satisfied);
  // The same data with alpha^p in place of alpha would give 4 >= 1.
  CHECK(std::pow(r.alpha, 2.0) * 4.0 / 64.0 >= r.lhs);
  CHECK(dominant_check(spec, 2.0, box).satisfied);
}

TEST_CASE("enlarging the box never lowers the lhs") {
  Rng rng(89);
  for (int trial = 0; trial < 40; ++trial) {
    auto const kind = trial % 2 ? ProcessKind::ergodic_martingale : ProcessKind::martingale_ergodic;
    auto const spec = random_process(rng, trial % 4 < 2 ? Family::plain : Family::weighted, kind, 1.5);
    std::size_t const stages = spec.max_stage_count();
    double prev_dom = 0.0, prev_max = 0.0;
    for (std::size_t step = 1; step <= 5; ++step) {
      SupBox const box = uniform_box(spec, 1 + 8 * (step - 1), std::min(step, stages));
      auto const dom = dominant_check(spec, 1.5, box);
      auto const mx = maximal_check(spec, 1.5, 0.5, box);
      CHECK(dom.satisfied);
      CHECK(mx.satisfied);
      CHECK(dom.lhs >= prev_dom);
      CHECK(mx.lhs >= prev_max);
      prev_dom = dom.lhs;
      prev_max = mx.lhs;
    }
  }
}

TEST_CASE("scaling the observable scales both sides") {
  Rng rng(97);
  for (int trial = 0; trial < 40; ++trial) {
    auto const kind = trial % 2 ? ProcessKind::ergodic_martingale : ProcessKind::martingale_ergodic;
    double const p = trial % 3 == 0 ? 2.0 : 1.25 + 0.25 * static_cast<double>(trial % 5);
    auto const spec = random_process(rng, Family::plain, kind, p);
    SupBox const box = uniform_box(spec, 12, 5);
    double const c = std::array{2.0, -0.5, 4.0, -3.0}[trial % 4];
    auto const scaled = spec.with_observable(c * spec.f());

    auto const a = dominant_check(spec, p, box);
    auto const b = dominant_check(scaled, p, box);
    CHECK(relative_gap(b.lhs, std::abs(c) * a.lhs) <= 1e-12);
    CHECK(relative_gap(b.rhs, std::abs(c) * a.rhs) <= 1e-12);

    if (std::abs(c) == 3.0)
      continue;  // level sets are only compared under exact scalings
    double const eps = rng.uniform(0.05, 3.0);
    auto const ma = maximal_check(spec, p, eps, box);
    auto const mb = maximal_check(scaled, p, eps, box);
    auto const shifted = maximal_check(spec, p, eps / std::abs(c), box);
    CHECK(relative_gap(mb.rhs, std::pow(std::abs(c), p) * ma.rhs) <= 1e-12);
    CHECK(mb.lhs == shifted.lhs);
  }
}

TEST_CASE("random instances satisfy every stated bound") {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 120; ++trial) {
    Family const fam = std::array{Family::plain, Family::weighted, Family::multiparameter}[trial % 3];
    auto const kind = (trial / 3) % 2 ? ProcessKind::ergodic_martingale
                                      : ProcessKind::martingale_ergodic;
    double const p = fam == Family::multiparameter ? 2.0 + static_cast<double>(trial % 2)
                                                   : std::array{1.25, 1.5, 2.0, 3.0, 4.0}[trial % 5];
    FuzzOptions opts;
    opts.max_points = 24;
    opts.max_multi_points = 12;
    auto const spec = random_process(rng, fam, kind, p, opts);
    auto const box = fam == Family::multiparameter ? uniform_box(spec, 8, 3) : default_box(spec);
    auto const dom = dominant_check(spec, p, box);
    CHECK(dom.satisfied);
    if (dom.rhs > 0.0)
      worst = std::max(worst, dom.lhs / dom.rhs);
    if (fam == Family::multiparameter && kind == ProcessKind::ergodic_martingale)
      continue;
    for (auto const &r : epsilon_sweep(spec, p, log_spaced(0.05, 5.0, 6), box))
      CHECK(r.satisfied);
  }
  CHECK(worst <= 1.0);
}
