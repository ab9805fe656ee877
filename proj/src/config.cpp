#include "mergo/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "mergo/generators.hpp"
#include "mergo/random.hpp"

namespace mergo {

using nlohmann::json;

namespace {

// Stream ids for the seeded generators, one per component.
constexpr std::uint64_t kSpaceStream = 1;
constexpr std::uint64_t kMapStream = 10;
constexpr std::uint64_t kFiltrationStream = 100;
constexpr std::uint64_t kObservableStream = 1000;

std::string at(std::string const &path, std::string const &key) {
  return path.empty() ? key : path + "." + key;
}
std::string at(std::string const &path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

[[noreturn]] void fail(std::string const &path, std::string const &message) {
  throw ConfigError(path, message);
}

void require_keys(json const &obj, std::string const &path, std::set<std::string> const &allowed) {
  for (auto const &[key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      fail(at(path, key), "unknown key");
  }
}

json const &object(json const &j, std::string const &path) {
  if (!j.is_object())
    fail(path, "expected an object");
  return j;
}

json const &array(json const &j, std::string const &path) {
  if (!j.is_array())
    fail(path, "expected an array");
  return j;
}

double number(json const &j, std::string const &path) {
  if (!j.is_number())
    fail(path, "expected a number");
  double const x = j.get<double>();
  if (!std::isfinite(x))
    fail(path, "expected a finite number");
  return x;
}

std::size_t count(json const &j, std::string const &path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    fail(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::size_t positive_count(json const &j, std::string const &path) {
  std::size_t const n = count(j, path);
  if (n == 0)
    fail(path, "must be >= 1");
  return n;
}

std::string text(json const &j, std::string const &path) {
  if (!j.is_string())
    fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(json const &j, std::string const &path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i)
    out.push_back(number(j[i], at(path, i)));
  return out;
}

std::vector<std::size_t> counts(json const &j, std::string const &path) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i)
    out.push_back(count(j[i], at(path, i)));
  return out;
}

// Runs a module constructor, reporting its Error at `path`.
template <class F>
auto guarded(std::string const &path, F &&make) {
  try {
    return make();
  } catch (ConfigError const &) {
    throw;
  } catch (Error const &e) {
    fail(path, e.what());
  }
}

// Either a single object under `one` or a list under `many`.
std::pair<json, std::string> one_or_many(json const &doc, char const *one, char const *many) {
  bool const has_one = doc.contains(one), has_many = doc.contains(many);
  if (has_one && has_many)
    fail(many, std::string("give either '") + one + "' or '" + many + "', not both");
  if (has_one)
    return {json::array({doc.at(one)}), one};
  if (has_many) {
    if (array(doc.at(many), many).empty())
      fail(many, "must not be empty");
    return {doc.at(many), many};
  }
  fail(many, "missing");
}

std::string element_path(std::string const &base, std::size_t i, bool single) {
  return single ? base : at(base, i);
}

// ---- maps -----------------------------------------------------------------

std::vector<std::size_t> rotation(std::size_t n, std::size_t shift) {
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i)
    m[i] = (i + shift) % n;
  return m;
}

std::vector<std::size_t> parse_map(json const &j, std::string const &path, std::size_t n,
                                   std::vector<std::vector<std::size_t>> const &earlier,
                                   std::uint64_t seed, std::size_t index) {
  if (j.is_string()) {
    std::string const t = j.get<std::string>();
    if (t == "identity")
      return rotation(n, 0);
    if (t == "cycle")
      return rotation(n, 1);
    if (t == "random") {
      Rng rng = Rng::derived(seed, kMapStream + index);
      return random_permutation(rng, n);
    }
    fail(path, "unknown map '" + t + "'");
  }
  object(j, path);
  if (!j.contains("type"))
    fail(at(path, "type"), "missing");
  std::string const type = text(j.at("type"), at(path, "type"));
  if (type == "identity" || type == "cycle" || type == "random") {
    require_keys(j, path, {"type"});
    return parse_map(json(type), path, n, earlier, seed, index);
  }
  if (type == "rotation") {
    require_keys(j, path, {"type", "shift"});
    std::size_t const shift = j.contains("shift") ? count(j.at("shift"), at(path, "shift")) : 1;
    return rotation(n, shift % n);
  }
  if (type == "permutation") {
    require_keys(j, path, {"type", "map"});
    if (!j.contains("map"))
      fail(at(path, "map"), "missing");
    auto const m = counts(j.at("map"), at(path, "map"));
    if (m.size() != n)
      fail(at(path, "map"), "has " + std::to_string(m.size()) + " entries for a space of size " +
                                std::to_string(n));
    for (std::size_t i = 0; i < n; ++i)
      if (m[i] >= n)
        fail(at(at(path, "map"), i), "point out of range");
    return m;
  }
  if (type == "cycles") {
    require_keys(j, path, {"type", "lengths", "cycles"});
    if (j.contains("lengths") == j.contains("cycles"))
      fail(path, "give exactly one of 'lengths' or 'cycles'");
    std::vector<std::size_t> m = rotation(n, 0);
    if (j.contains("lengths")) {
      auto const lengths = counts(j.at("lengths"), at(path, "lengths"));
      std::size_t start = 0;
      for (std::size_t k = 0; k < lengths.size(); ++k) {
        if (lengths[k] == 0)
          fail(at(at(path, "lengths"), k), "cycle length must be >= 1");
        if (start + lengths[k] > n)
          fail(at(path, "lengths"), "cycle lengths exceed the space size");
        for (std::size_t i = 0; i < lengths[k]; ++i)
          m[start + i] = start + (i + 1) % lengths[k];
        start += lengths[k];
      }
      if (start != n)
        fail(at(path, "lengths"), "cycle lengths sum to " + std::to_string(start) +
                                      ", expected " + std::to_string(n));
      return m;
    }
    std::vector<bool> seen(n, false);
    json const &cycles = array(j.at("cycles"), at(path, "cycles"));
    for (std::size_t k = 0; k < cycles.size(); ++k) {
      std::string const cp = at(at(path, "cycles"), k);
      auto const c = counts(cycles[k], cp);
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] >= n)
          fail(at(cp, i), "point out of range");
        if (seen[c[i]])
          fail(at(cp, i), "point " + std::to_string(c[i]) + " appears in two cycles");
        seen[c[i]] = true;
        m[c[i]] = c[(i + 1) % c.size()];
      }
    }
    return m;
  }
  if (type == "power") {
    require_keys(j, path, {"type", "of", "exponent"});
    if (!j.contains("of") || !j.contains("exponent"))
      fail(path, "power needs 'of' and 'exponent'");
    std::size_t const of = count(j.at("of"), at(path, "of"));
    if (of >= earlier.size())
      fail(at(path, "of"), "must name an earlier map");
    std::size_t const e = count(j.at("exponent"), at(path, "exponent"));
    auto const &base = earlier[of];
    std::vector<std::size_t> m(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t len = 1;
      for (std::size_t x = base[i]; x != i && len <= n; x = base[x])
        ++len;
      if (len > n)
        fail(at(path, "of"), "base map is not a permutation");
      std::size_t x = i;
      for (std::size_t k = 0; k < e % len; ++k)
        x = base[x];
      m[i] = x;
    }
    return m;
  }
  fail(at(path, "type"), "unknown map type '" + type + "'");
}

// ---- space ----------------------------------------------------------------

struct SpaceDraft {
  std::size_t size = 0;
  std::optional<std::vector<double>> weights;  // none: uniform
  bool random_weights = false;
  double total = 1.0;
};

SpaceDraft parse_space(json const &doc) {
  if (!doc.contains("space"))
    fail("space", "missing");
  json const &j = doc.at("space");
  SpaceDraft s;
  if (j.is_number()) {
    s.size = positive_count(j, "space");
    return s;
  }
  object(j, "space");
  require_keys(j, "space", {"size", "weights", "total_mass"});
  if (j.contains("total_mass")) {
    s.total = number(j.at("total_mass"), "space.total_mass");
    if (!(s.total > 0.0))
      fail("space.total_mass", "must be > 0");
  }
  if (j.contains("weights")) {
    json const &w = j.at("weights");
    if (w.is_string()) {
      std::string const t = w.get<std::string>();
      if (t == "random")
        s.random_weights = true;
      else if (t != "uniform")
        fail("space.weights", "expected 'uniform', 'random' or a list of weights");
    } else {
      s.weights = numbers(w, "space.weights");
      if (s.weights->empty())
        fail("space.weights", "must not be empty");
      for (std::size_t i = 0; i < s.weights->size(); ++i)
        if (!((*s.weights)[i] > 0.0))
          fail(at("space.weights", i), "weights must be > 0");
    }
  }
  if (j.contains("size"))
    s.size = positive_count(j.at("size"), "space.size");
  if (s.weights) {
    if (s.size != 0 && s.size != s.weights->size())
      fail("space.size", "disagrees with the number of weights");
    s.size = s.weights->size();
  }
  if (s.size == 0)
    fail("space.size", "missing");
  return s;
}

// ---- filtrations ----------------------------------------------------------

Direction parse_direction(json const &j, std::string const &path) {
  std::string const d = text(j, path);
  if (d == "increasing")
    return Direction::increasing;
  if (d == "decreasing")
    return Direction::decreasing;
  fail(path, "expected 'increasing' or 'decreasing'");
}

Partition parse_stage(json const &j, std::string const &path, SpaceRef const &space) {
  if (j.is_string()) {
    std::string const t = j.get<std::string>();
    if (t == "singletons")
      return Partition::singletons(space);
    if (t == "trivial")
      return Partition::trivial(space);
    fail(path, "expected 'singletons', 'trivial', a label list or {\"blocks\": ...}");
  }
  if (j.is_object()) {
    require_keys(j, path, {"blocks"});
    if (!j.contains("blocks"))
      fail(at(path, "blocks"), "missing");
    json const &b = array(j.at("blocks"), at(path, "blocks"));
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t k = 0; k < b.size(); ++k)
      blocks.push_back(counts(b[k], at(at(path, "blocks"), k)));
    return guarded(path, [&] { return Partition::from_blocks(space, blocks); });
  }
  auto const labels = counts(j, path);
  if (labels.size() != space->size())
    fail(path, "has " + std::to_string(labels.size()) + " labels for a space of size " +
                   std::to_string(space->size()));
  return guarded(path, [&] { return Partition(space, labels); });
}

Filtration parse_filtration(json const &j, std::string const &path, SpaceRef const &space,
                            std::uint64_t seed, std::size_t index) {
  object(j, path);
  require_keys(j, path, {"direction", "stages", "random_merge"});
  if (!j.contains("direction"))
    fail(at(path, "direction"), "missing");
  Direction const dir = parse_direction(j.at("direction"), at(path, "direction"));
  if (j.contains("stages") == j.contains("random_merge"))
    fail(path, "give exactly one of 'stages' or 'random_merge'");
  if (j.contains("random_merge")) {
    std::string const rp = at(path, "random_merge");
    json const &r = object(j.at("random_merge"), rp);
    require_keys(r, rp, {"stages", "merges_per_stage"});
    if (!r.contains("stages"))
      fail(at(rp, "stages"), "missing");
    std::size_t const stages = positive_count(r.at("stages"), at(rp, "stages"));
    std::size_t const merges =
        r.contains("merges_per_stage") ? count(r.at("merges_per_stage"), at(rp, "merges_per_stage"))
                                       : 0;
    Rng rng = Rng::derived(seed, kFiltrationStream + index);
    return guarded(rp, [&] { return random_filtration(rng, space, dir, stages, merges); });
  }
  json const &st = array(j.at("stages"), at(path, "stages"));
  if (st.empty())
    fail(at(path, "stages"), "must not be empty");
  std::vector<Partition> stages;
  for (std::size_t k = 0; k < st.size(); ++k)
    stages.push_back(parse_stage(st[k], at(at(path, "stages"), k), space));
  return guarded(at(path, "stages"), [&] { return Filtration(dir, std::move(stages)); });
}

// ---- observable -----------------------------------------------------------

VectorObservable parse_observable(json const &doc, SpaceRef const &space, std::uint64_t seed) {
  if (!doc.contains("observable"))
    fail("observable", "missing");
  json j = doc.at("observable");
  if (j.is_array())
    j = json{{"values", j}};
  object(j, "observable");
  require_keys(j, "observable", {"values", "generator"});
  if (j.contains("values") == j.contains("generator"))
    fail("observable", "give exactly one of 'values' or 'generator'");
  if (j.contains("values")) {
    json const &v = array(j.at("values"), "observable.values");
    if (v.size() != space->size())
      fail("observable.values", "has " + std::to_string(v.size()) +
                                    " entries for a space of size " +
                                    std::to_string(space->size()));
    if (!v.empty() && v[0].is_array()) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < v.size(); ++i)
        rows.push_back(numbers(v[i], at("observable.values", i)));
      for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != rows[0].size())
          fail(at("observable.values", i), "row length differs from row 0");
      if (rows[0].empty())
        fail(at("observable.values", 0), "rows must not be empty");
      return guarded("observable.values",
                     [&] { return VectorObservable::from_rows(space, rows); });
    }
    auto const vals = numbers(v, "observable.values");
    return guarded("observable.values", [&] { return VectorObservable::scalar(space, vals); });
  }
  std::string const gp = "observable.generator";
  json const &g = object(j.at("generator"), gp);
  require_keys(g, gp, {"distribution", "dim", "a", "b"});
  std::string const dist =
      g.contains("distribution") ? text(g.at("distribution"), at(gp, "distribution")) : "normal";
  std::size_t const dim = g.contains("dim") ? positive_count(g.at("dim"), at(gp, "dim")) : 1;
  double const a = g.contains("a") ? number(g.at("a"), at(gp, "a")) : 0.0;
  double const b = g.contains("b") ? number(g.at("b"), at(gp, "b")) : 1.0;
  Rng rng = Rng::derived(seed, kObservableStream);
  return guarded(gp, [&] { return random_observable(rng, space, dim, dist, a, b); });
}

// ---- weights --------------------------------------------------------------

BesicovitchWeights parse_weight_seq(json const &j, std::string const &path) {
  if (j.is_string()) {
    if (j.get<std::string>() != "unit")
      fail(path, "expected 'unit', {\"constant\": c} or {\"terms\": [...]}");
    return BesicovitchWeights::unit();
  }
  json const &o = object(j, path);
  require_keys(o, path, {"terms", "constant"});
  if (o.contains("terms") == o.contains("constant"))
    fail(path, "give exactly one of 'terms' or 'constant'");
  if (o.contains("constant"))
    return BesicovitchWeights::constant(number(o.at("constant"), at(path, "constant")));
  std::string const tp = at(path, "terms");
  json const &terms = array(o.at("terms"), tp);
  if (terms.empty())
    fail(tp, "must not be empty");
  std::vector<CosineTerm> out;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    std::string const p = at(tp, k);
    json const &t = object(terms[k], p);
    require_keys(t, p, {"amplitude", "frequency", "phase"});
    CosineTerm c;
    if (t.contains("amplitude"))
      c.amplitude = number(t.at("amplitude"), at(p, "amplitude"));
    if (t.contains("frequency"))
      c.frequency = number(t.at("frequency"), at(p, "frequency"));
    if (t.contains("phase"))
      c.phase = number(t.at("phase"), at(p, "phase"));
    out.push_back(c);
  }
  return guarded(tp, [&] { return BesicovitchWeights(out); });
}

std::vector<BesicovitchWeights> parse_weights(json const &doc, std::size_t maps) {
  if (!doc.contains("weights") || doc.at("weights").is_null())
    return {};
  json const &w = doc.at("weights");
  if (!w.is_array())
    return std::vector<BesicovitchWeights>(maps, parse_weight_seq(w, "weights"));
  if (w.size() != maps)
    fail("weights", "has " + std::to_string(w.size()) + " sequences for " +
                        std::to_string(maps) + " maps");
  std::vector<BesicovitchWeights> out;
  for (std::size_t j = 0; j < w.size(); ++j)
    out.push_back(parse_weight_seq(w[j], at("weights", j)));
  return out;
}

// ---- checks and grid ------------------------------------------------------

std::vector<double> parse_epsilons(json const &j, std::string const &path) {
  std::vector<double> eps;
  if (j.is_number()) {
    eps.push_back(number(j, path));
  } else if (j.is_object()) {
    require_keys(j, path, {"from", "to", "count"});
    if (!j.contains("from") || !j.contains("to") || !j.contains("count"))
      fail(path, "log-spaced grid needs 'from', 'to' and 'count'");
    double const lo = number(j.at("from"), at(path, "from"));
    double const hi = number(j.at("to"), at(path, "to"));
    std::size_t const n = count(j.at("count"), at(path, "count"));
    eps = guarded(path, [&] { return log_spaced(lo, hi, n); });
  } else {
    eps = numbers(j, path);
  }
  if (eps.empty())
    fail(path, "must not be empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0))
      fail(eps.size() == 1 && j.is_number() ? path : at(path, k), "epsilon must be > 0");
    if (k > 0 && !(eps[k] > eps[k - 1]))
      fail(at(path, k), "epsilon grid must be strictly ascending");
  }
  return eps;
}

std::vector<std::size_t> broadcast(json const &j, std::string const &path, std::size_t n) {
  if (j.is_number())
    return std::vector<std::size_t>(n, count(j, path));
  auto const v = counts(j, path);
  if (v.size() != n)
    fail(path, "expected " + std::to_string(n) + " entries");
  return v;
}

CheckConfig parse_check(json const &j, std::string const &path, ProcessSpec const &spec) {
  object(j, path);
  require_keys(j, path, {"type", "p", "epsilon", "box", "orlicz_order"});
  CheckConfig c;
  if (!j.contains("type"))
    fail(at(path, "type"), "missing");
  std::string const type = text(j.at("type"), at(path, "type"));
  if (type == "dominant")
    c.type = CheckType::dominant;
  else if (type == "maximal")
    c.type = CheckType::maximal;
  else
    fail(at(path, "type"), "expected 'dominant' or 'maximal'");

  if (!j.contains("p"))
    fail(at(path, "p"), "missing");
  c.p = number(j.at("p"), at(path, "p"));
  if (!(c.p > 1.0))
    fail(at(path, "p"), "must be > 1 (got " + j.at("p").dump() + ")");
  guarded(path, [&] {
    require_hypotheses(spec, c.p, c.type == CheckType::maximal);
    return 0;
  });

  if (c.type == CheckType::maximal) {
    if (!j.contains("epsilon"))
      fail(at(path, "epsilon"), "missing");
    c.epsilons = parse_epsilons(j.at("epsilon"), at(path, "epsilon"));
  } else if (j.contains("epsilon")) {
    fail(at(path, "epsilon"), "only maximal checks take epsilon");
  }

  if (j.contains("orlicz_order")) {
    std::size_t const m = positive_count(j.at("orlicz_order"), at(path, "orlicz_order"));
    if (m > 16)
      fail(at(path, "orlicz_order"), "must be <= 16");
    c.orlicz_order = static_cast<unsigned>(m);
  }

  if (j.contains("box")) {
    std::string const bp = at(path, "box");
    json const &b = object(j.at("box"), bp);
    require_keys(b, bp, {"n_max", "stages"});
    SupBox box = default_box(spec);
    if (b.contains("n_max"))
      box.n_max = broadcast(b.at("n_max"), at(bp, "n_max"), spec.maps().size());
    if (b.contains("stages")) {
      if (b.at("stages").is_number()) {
        std::size_t const s = positive_count(b.at("stages"), at(bp, "stages"));
        box = SupBox{box.n_max, uniform_box(spec, 1, s).stage_count};
      } else {
        box.stage_count = broadcast(b.at("stages"), at(bp, "stages"), spec.filtrations().size());
      }
    }
    guarded(bp, [&] {
      require_box(spec, box);
      return 0;
    });
    c.box = box;
  }
  return c;
}

GridConfig parse_grid(json const &doc, ProcessSpec const &spec) {
  GridConfig g;
  if (!doc.contains("grid"))
    return g;
  json const &j = object(doc.at("grid"), "grid");
  require_keys(j, "grid", {"n1", "n2", "p"});
  auto strictly_increasing = [](std::vector<std::size_t> const &v, std::string const &path) {
    if (v.empty())
      fail(path, "must not be empty");
    for (std::size_t k = 1; k < v.size(); ++k)
      if (v[k] <= v[k - 1])
        fail(at(path, k), "grid must be strictly increasing");
  };
  if (j.contains("n1")) {
    g.n1 = counts(j.at("n1"), "grid.n1");
    strictly_increasing(*g.n1, "grid.n1");
    if (g.n1->front() == 0)
      fail(at("grid.n1", 0), "averaging lengths must be >= 1");
  }
  if (j.contains("n2")) {
    g.n2 = counts(j.at("n2"), "grid.n2");
    strictly_increasing(*g.n2, "grid.n2");
    if (g.n2->back() >= spec.max_stage_count())
      fail(at("grid.n2", g.n2->size() - 1),
           "stage index out of range (longest filtration has " +
               std::to_string(spec.max_stage_count()) + " stages)");
  }
  if (j.contains("p")) {
    g.p = number(j.at("p"), "grid.p");
    if (!(g.p >= 1.0))
      fail("grid.p", "must be >= 1");
  }
  return g;
}

NormSpec parse_norm(json const &doc) {
  if (!doc.contains("norm_q"))
    return {};
  json const &j = doc.at("norm_q");
  if (j.is_string()) {
    std::string const t = j.get<std::string>();
    if (t == "inf" || t == "infinity")
      return NormSpec::infinity();
    fail("norm_q", "expected a number >= 1 or 'inf'");
  }
  double const q = number(j, "norm_q");
  if (!(q >= 1.0))
    fail("norm_q", "must be >= 1");
  return NormSpec(q);
}

ProcessKind parse_kind(json const &doc) {
  if (!doc.contains("process"))
    return ProcessKind::martingale_ergodic;
  std::string const k = text(doc.at("process"), "process");
  if (k == "martingale_ergodic")
    return ProcessKind::martingale_ergodic;
  if (k == "ergodic_martingale")
    return ProcessKind::ergodic_martingale;
  fail("process", "expected 'martingale_ergodic' or 'ergodic_martingale'");
}

} // namespace

ExperimentConfig parse_config(json const &input, std::optional<std::uint64_t> seed_override) {
  json doc = input;
  if (!doc.is_object())
    fail("$", "config must be a JSON object");
  // A manifest carries the config it was produced from.
  if (doc.contains("config") && doc.contains("version")) {
    std::optional<std::uint64_t> seed;
    if (doc.contains("seed")) {
      if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer())
        fail("seed", "expected an unsigned 64-bit integer");
      seed = doc.at("seed").get<std::uint64_t>();
    }
    json inner = doc.at("config");
    if (!inner.is_object())
      fail("config", "expected an object");
    if (seed)
      inner["seed"] = *seed;
    doc = std::move(inner);
  }
  require_keys(doc, "", {"seed", "space", "map", "maps", "filtration", "filtrations",
                         "observable", "weights", "process", "multiparameter", "norm_q",
                         "checks", "grid", "output_dir"});

  std::uint64_t seed = 0;
  if (doc.contains("seed")) {
    json const &s = doc.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<std::int64_t>() < 0))
      fail("seed", "expected an unsigned 64-bit integer");
    seed = s.get<std::uint64_t>();
  }
  if (seed_override)
    seed = *seed_override;
  doc["seed"] = seed;

  SpaceDraft const draft = parse_space(doc);
  std::size_t const n = draft.size;

  auto const [map_list, map_key] = one_or_many(doc, "map", "maps");
  bool const single_map = map_key == "map";
  std::vector<std::vector<std::size_t>> perms;
  for (std::size_t j = 0; j < map_list.size(); ++j)
    perms.push_back(parse_map(map_list[j], element_path(map_key, j, single_map), n, perms, seed, j));

  std::vector<double> weights;
  if (draft.weights) {
    weights = *draft.weights;
  } else if (draft.random_weights) {
    Rng rng = Rng::derived(seed, kSpaceStream);
    weights = guarded("space.weights", [&] { return orbit_constant_weights(rng, perms.front()); });
    for (double &w : weights)
      w *= draft.total;
  } else {
    weights.assign(n, draft.total / static_cast<double>(n));
  }
  SpaceRef const space = guarded("space", [&] { return make_space(weights); });

  std::vector<Endomorphism> maps;
  for (std::size_t j = 0; j < perms.size(); ++j)
    maps.push_back(guarded(element_path(map_key, j, single_map),
                           [&] { return Endomorphism(space, perms[j]); }));

  auto const [filt_list, filt_key] = one_or_many(doc, "filtration", "filtrations");
  bool const single_filt = filt_key == "filtration";
  std::vector<Filtration> filtrations;
  for (std::size_t k = 0; k < filt_list.size(); ++k)
    filtrations.push_back(
        parse_filtration(filt_list[k], element_path(filt_key, k, single_filt), space, seed, k));

  VectorObservable f = parse_observable(doc, space, seed);
  std::vector<BesicovitchWeights> wseq = parse_weights(doc, maps.size());
  NormSpec const norm = parse_norm(doc);
  ProcessKind const kind = parse_kind(doc);
  bool multiparameter = false;
  if (doc.contains("multiparameter")) {
    if (!doc.at("multiparameter").is_boolean())
      fail("multiparameter", "expected true or false");
    multiparameter = doc.at("multiparameter").get<bool>();
  }

  ProcessSpec spec = guarded("$", [&] {
    return ProcessSpec(kind, std::move(f), std::move(maps), std::move(filtrations),
                       std::move(wseq), norm, multiparameter);
  });
  guarded("maps", [&] { return spec.period(); });

  std::vector<CheckConfig> checks;
  if (doc.contains("checks")) {
    json const &c = array(doc.at("checks"), "checks");
    for (std::size_t i = 0; i < c.size(); ++i)
      checks.push_back(parse_check(c[i], at("checks", i), spec));
  }
  GridConfig grid = parse_grid(doc, spec);

  std::optional<std::string> out;
  if (doc.contains("output_dir"))
    out = text(doc.at("output_dir"), "output_dir");

  return ExperimentConfig{std::move(doc), seed, std::move(spec), std::move(checks),
                          std::move(grid), std::move(out)};
}

ExperimentConfig load_config(std::filesystem::path const &path,
                             std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (json::parse_error const &e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, seed_override);
}

json generate_fragment(std::string const &kind, std::uint64_t seed, std::size_t size) {
  if (size == 0)
    throw ConfigError("size", "must be >= 1");
  Rng rng(seed);
  if (kind == "space") {
    std::vector<double> w(size);
    for (double &x : w)
      x = rng.uniform(0.5, 1.5);
    double sum = 0.0;
    for (double x : w)
      sum += x;
    for (double &x : w)
      x /= sum;
    return json{{"space", {{"size", size}, {"weights", w}}}};
  }
  if (kind == "map")
    return json{{"space", {{"size", size}}},
                {"maps", json::array({{{"type", "permutation"},
                                       {"map", random_permutation(rng, size)}}})}};
  if (kind == "filtration") {
    Direction const dir = rng.coin() ? Direction::decreasing : Direction::increasing;
    std::size_t const stages = 2 + rng.index(3);
    Filtration const f = random_filtration(rng, uniform_space(size), dir, stages);
    json st = json::array();
    for (std::size_t k = 0; k < f.stage_count(); ++k) {
      auto const l = f.stage(k).labels();
      st.push_back(std::vector<std::size_t>(l.begin(), l.end()));
    }
    return json{{"space", {{"size", size}}},
                {"filtrations", json::array({{{"direction", to_string(dir)}, {"stages", st}}})}};
  }
  if (kind == "observable") {
    auto const f = random_observable(rng, uniform_space(size), 1 + rng.index(3), "normal", 0.0, 1.0);
    json rows = json::array();
    for (std::size_t i = 0; i < f.size(); ++i)
      rows.push_back(std::vector<double>(f.row(i).begin(), f.row(i).end()));
    return json{{"space", {{"size", size}}}, {"observable", {{"values", rows}}}};
  }
  throw ConfigError("kind", "expected one of space, map, filtration, observable (got '" + kind +
                                "')");
}

} // namespace mergo
