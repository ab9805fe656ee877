#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mergo/config.hpp"
#include "mergo/inequality_lab.hpp"
#include "mergo/runner.hpp"
#include "mergo/selfcheck.hpp"

namespace py = pybind11;
using namespace mergo;

namespace {

std::vector<std::vector<double>> rows(VectorObservable const &f) {
  std::vector<std::vector<double>> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    out[i].assign(f.row(i).begin(), f.row(i).end());
  return out;
}

VectorObservable observable(SpaceRef const &space, py::object const &values) {
  if (py::len(values) > 0 && py::isinstance<py::sequence>(values[py::int_(0)]) &&
      !py::isinstance<py::str>(values[py::int_(0)]))
    return VectorObservable::from_rows(space, values.cast<std::vector<std::vector<double>>>());
  return VectorObservable::scalar(space, values.cast<std::vector<double>>());
}

py::dict report_dict(InequalityReport const &r) {
  return py::module_::import("json").attr("loads")(to_json(r).dump());
}

NormSpec norm_from(py::object const &q) {
  if (q.is_none())
    return {};
  if (py::isinstance<py::str>(q)) {
    if (q.cast<std::string>() != "inf")
      throw Error("norm q must be a number >= 1 or 'inf'");
    return NormSpec::infinity();
  }
  return NormSpec(q.cast<double>());
}

} // namespace

PYBIND11_MODULE(_mergo, m) {
  m.doc() = "Finite-space martingale-ergodic processes and their inequalities";
  m.attr("__version__") = library_version();

  py::register_exception<Error>(m, "MergoError", PyExc_ValueError);

  py::class_<MeasureSpace, std::shared_ptr<MeasureSpace>>(m, "MeasureSpace")
      .def_property_readonly("size", &MeasureSpace::size)
      .def_property_readonly("total_mass", &MeasureSpace::total_mass)
      .def_property_readonly("weights", [](MeasureSpace const &s) {
        return std::vector<double>(s.weights().begin(), s.weights().end());
      });
  m.def("make_space", [](std::vector<double> const &w) {
    return std::const_pointer_cast<MeasureSpace>(make_space(w));
  });
  m.def("uniform_space", [](std::size_t n) {
    return std::const_pointer_cast<MeasureSpace>(uniform_space(n));
  });

  py::class_<Partition>(m, "Partition")
      .def(py::init([](std::shared_ptr<MeasureSpace> s, std::vector<std::size_t> labels) {
        return Partition(s, std::move(labels));
      }))
      .def_static("from_blocks",
                  [](std::shared_ptr<MeasureSpace> s,
                     std::vector<std::vector<std::size_t>> const &b) {
                    return Partition::from_blocks(s, b);
                  })
      .def_static("singletons", [](std::shared_ptr<MeasureSpace> s) { return Partition::singletons(s); })
      .def_static("trivial", [](std::shared_ptr<MeasureSpace> s) { return Partition::trivial(s); })
      .def_property_readonly("labels", [](Partition const &p) {
        return std::vector<std::size_t>(p.labels().begin(), p.labels().end());
      })
      .def_property_readonly("block_count", &Partition::block_count)
      .def("__eq__", [](Partition const &a, Partition const &b) { return a == b; });
  m.def("refines", &refines);
  m.def("partition_join", &partition_join);
  m.def("partition_meet", &partition_meet);

  py::enum_<Direction>(m, "Direction")
      .value("increasing", Direction::increasing)
      .value("decreasing", Direction::decreasing);
  py::class_<Filtration>(m, "Filtration")
      .def(py::init<Direction, std::vector<Partition>>())
      .def_property_readonly("stage_count", &Filtration::stage_count)
      .def("stage", &Filtration::stage)
      .def("limit", [](Filtration const &f) { return filtration_limit(f); });

  py::class_<Endomorphism>(m, "Endomorphism")
      .def(py::init([](std::shared_ptr<MeasureSpace> s, std::vector<std::size_t> map) {
        return Endomorphism(s, std::move(map));
      }))
      .def_static("identity", [](std::shared_ptr<MeasureSpace> s) { return Endomorphism::identity(s); })
      .def_static("rotation", [](std::shared_ptr<MeasureSpace> s, std::size_t k) {
        return Endomorphism::rotation(s, k);
      }, py::arg("space"), py::arg("shift") = 1)
      .def_property_readonly("map", &Endomorphism::map)
      .def_property_readonly("period", &Endomorphism::period)
      .def("power", &Endomorphism::power);

  py::class_<CosineTerm>(m, "CosineTerm")
      .def(py::init([](double a, double f, double ph) { return CosineTerm{a, f, ph}; }),
           py::arg("amplitude"), py::arg("frequency"), py::arg("phase") = 0.0);
  py::class_<BesicovitchWeights>(m, "BesicovitchWeights")
      .def(py::init<std::vector<CosineTerm>>())
      .def_static("unit", &BesicovitchWeights::unit)
      .def_static("constant", &BesicovitchWeights::constant)
      .def("__call__", &BesicovitchWeights::operator())
      .def("alpha", &BesicovitchWeights::alpha)
      .def("envelope", &BesicovitchWeights::envelope);

  py::class_<VectorObservable>(m, "VectorObservable")
      .def(py::init([](std::shared_ptr<MeasureSpace> s, py::object const &values) {
        return observable(s, values);
      }))
      .def_property_readonly("size", &VectorObservable::size)
      .def_property_readonly("dim", &VectorObservable::dim)
      .def("rows", &rows)
      .def("tolist", [](VectorObservable const &f) {
        py::list out;
        for (auto const &r : rows(f)) {
          if (r.size() == 1)
            out.append(r[0]);
          else
            out.append(py::cast(r));
        }
        return out;
      });

  m.def("lp_norm", [](VectorObservable const &f, double p, py::object q) {
    return lp_norm(f, p, norm_from(q));
  }, py::arg("f"), py::arg("p"), py::arg("q") = py::none());
  m.def("linf_norm", [](VectorObservable const &f, py::object q) { return linf_norm(f, norm_from(q)); },
        py::arg("f"), py::arg("q") = py::none());
  m.def("mean", &mean);
  m.def("koopman", &koopman);
  m.def("cond_expect", &cond_expect);
  m.def("ergodic_average", &ergodic_average);
  m.def("ergodic_limit", &ergodic_limit);
  m.def("weighted_average", &weighted_average);
  m.def("composite_cond_expect", &composite_cond_expect);

  py::enum_<ProcessKind>(m, "ProcessKind")
      .value("martingale_ergodic", ProcessKind::martingale_ergodic)
      .value("ergodic_martingale", ProcessKind::ergodic_martingale);
  py::class_<ProcessSpec>(m, "ProcessSpec")
      .def(py::init([](ProcessKind kind, VectorObservable f, std::vector<Endomorphism> maps,
                       std::vector<Filtration> filts, std::vector<BesicovitchWeights> weights,
                       py::object q, bool multi) {
             return ProcessSpec(kind, std::move(f), std::move(maps), std::move(filts),
                                std::move(weights), norm_from(q), multi);
           }),
           py::arg("kind"), py::arg("f"), py::arg("maps"), py::arg("filtrations"),
           py::arg("weights") = std::vector<BesicovitchWeights>{}, py::arg("q") = py::none(),
           py::arg("multiparameter") = false)
      .def_property_readonly("period", &ProcessSpec::period)
      .def_property_readonly("family", [](ProcessSpec const &s) { return to_string(s.family()); });

  m.def("evaluate", [](ProcessSpec const &s, std::size_t n1, std::size_t n2) {
    return evaluate(s, n1, n2);
  });
  m.def("limit_target", &limit_target);
  m.def("convergence_trace", [](ProcessSpec const &s, std::vector<std::size_t> const &n1,
                                std::vector<std::size_t> const &n2, double p) {
    py::list out;
    for (auto const &r : convergence_trace(s, n1, n2, p).rows)
      out.append(py::make_tuple(r.n1, r.n2, r.lp_error, r.sup_error));
    return out;
  }, py::arg("spec"), py::arg("n1_grid"), py::arg("n2_grid"), py::arg("p") = 2.0);
  m.def("dominant_check", [](ProcessSpec const &s, double p) {
    return report_dict(dominant_check(s, p));
  });
  m.def("maximal_check", [](ProcessSpec const &s, double p, double eps) {
    return report_dict(maximal_check(s, p, eps, default_box(s)));
  });
  m.def("epsilon_sweep", [](ProcessSpec const &s, double p, std::vector<double> const &eps) {
    py::list out;
    for (auto const &r : epsilon_sweep(s, p, eps, default_box(s)))
      out.append(report_dict(r));
    return out;
  });

  m.def("run_config", [](std::string const &config_json, std::optional<std::uint64_t> seed) {
    auto const cfg = parse_config(nlohmann::json::parse(config_json), seed);
    auto const out = run_experiment(cfg);
    py::dict d;
    d["trace_csv"] = out.trace_csv;
    d["reports_json"] = out.reports_json;
    d["manifest_json"] = out.manifest_json;
    d["all_satisfied"] = out.all_satisfied;
    return d;
  }, py::arg("config_json"), py::arg("seed") = py::none());
  m.def("selfcheck", [](std::size_t budget) {
    std::ostringstream os;
    auto const r = selfcheck(budget);
    print_selfcheck(r, os);
    return py::make_tuple(r.passed(), os.str());
  }, py::arg("budget") = 100);
}
