#include "mergo/runner.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <system_error>

#ifndef MERGO_VERSION
#define MERGO_VERSION "0.0.0"
#endif

namespace mergo {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

char const *library_version() { return MERGO_VERSION; }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ordered_json to_json(SupBox const &box) {
  return ordered_json{{"n_max", box.n_max}, {"stage_count", box.stage_count}};
}

ordered_json to_json(InequalityReport const &r) {
  ordered_json j{{"theorem_tag", r.theorem_tag},
         {"lhs", r.lhs},
         {"rhs", r.rhs},
         {"constant", r.constant},
         {"p", r.p},
         {"epsilon", r.epsilon ? ordered_json(*r.epsilon) : ordered_json(nullptr)},
         {"satisfied", r.satisfied},
         {"margin", r.margin},
         {"truncation", to_json(r.truncation)},
         {"alpha", r.alpha},
         {"f_norm", r.f_norm},
         {"hypothesis_l1", r.hypothesis_l1}};
  if (r.orlicz)
    j["orlicz"] = ordered_json{{"m", r.orlicz->m},
                       {"f_value", r.orlicz->f_value},
                       {"sup_value", r.orlicz->sup_value},
                       {"finite", r.orlicz->finite}};
  else
    j["orlicz"] = nullptr;
  return j;
}

std::string trace_csv(ConvergenceTrace const &trace) {
  std::string out = "n1,n2,lp_error,sup_error\n";
  for (auto const &row : trace.rows) {
    out += std::to_string(row.n1);
    out += ',';
    out += std::to_string(row.n2);
    out += ',';
    out += format_double(row.lp_error);
    out += ',';
    out += format_double(row.sup_error);
    out += '\n';
  }
  return out;
}

namespace {

bool has_closed_form(ProcessSpec const &spec) {
  if (!spec.weighted())
    return true;
  for (auto const &w : spec.weights())
    if (!w.is_constant())
      return false;
  return true;
}

// Weighted processes have no closed-form limit. With rational frequencies the
// average over one joint period P already equals the limit, since the
// weighted orbit sequence is P-periodic; otherwise the last grid point stands in.
ConvergenceTrace weighted_trace(ProcessSpec const &spec, std::vector<std::size_t> const &n1,
                                std::vector<std::size_t> const &n2, double p) {
  std::size_t const last = spec.max_stage_count() - 1;
  std::uint64_t joint = spec.period();
  bool rational = true;
  for (auto const &w : spec.weights()) {
    auto const b = w.period();
    if (!b) {
      rational = false;
      break;
    }
    joint = std::lcm(joint, *b);
  }
  if (rational) {
    auto trace = convergence_trace(spec, n1, n2, p,
                                   evaluate(spec, static_cast<std::size_t>(joint), last));
    trace.target_description = "weighted average at n1 = " + std::to_string(joint) +
                               " (joint period), n2 = " + std::to_string(last);
    return trace;
  }
  auto trace = convergence_trace(spec, n1, n2, p, evaluate(spec, n1.back(), n2.back()));
  trace.target_description = "value at the last grid point";
  return trace;
}

void write_file(fs::path const &path, std::string const &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
}

} // namespace

RunOutputs run_experiment(ExperimentConfig const &config) {
  ProcessSpec const &spec = config.spec;
  RunOutputs r;

  std::vector<std::size_t> const n1 = config.grid.n1 ? *config.grid.n1 : default_n1_grid(spec);
  std::vector<std::size_t> const n2 = config.grid.n2 ? *config.grid.n2 : default_n2_grid(spec);
  r.trace = has_closed_form(spec) ? convergence_trace(spec, n1, n2, config.grid.p)
                                  : weighted_trace(spec, n1, n2, config.grid.p);
  if (r.trace.target_description.empty())
    r.trace.target_description = "closed-form limit";

  for (auto const &check : config.checks) {
    SupBox const box = check.box ? *check.box : default_box(spec);
    if (check.type == CheckType::dominant) {
      r.reports.push_back(dominant_check(spec, check.p, box, check.orlicz_order));
    } else {
      for (auto &rep : epsilon_sweep(spec, check.p, check.epsilons, box))
        r.reports.push_back(std::move(rep));
    }
  }
  for (auto const &rep : r.reports)
    r.all_satisfied = r.all_satisfied && rep.satisfied;

  ordered_json reports = ordered_json::array();
  for (auto const &rep : r.reports)
    reports.push_back(to_json(rep));
  r.trace_csv = trace_csv(r.trace);
  r.reports_json = reports.dump(2) + "\n";

  json manifest{{"config", config.source},
                {"seed", config.seed},
                {"version", library_version()},
                {"trace_target", r.trace.target_description},
                {"trace_p", r.trace.p},
                {"all_satisfied", r.all_satisfied}};
  r.manifest_json = manifest.dump(2) + "\n";
  return r;
}

void write_outputs(RunOutputs const &outputs, fs::path const &dir) {
  fs::create_directories(dir);
  std::vector<std::pair<fs::path, std::string const *>> const files{
      {dir / "trace.csv", &outputs.trace_csv},
      {dir / "reports.json", &outputs.reports_json},
      {dir / "manifest.json", &outputs.manifest_json}};
  std::vector<fs::path> temps;
  try {
    for (auto const &[path, content] : files) {
      fs::path tmp = path;
      tmp += ".tmp";
      temps.push_back(tmp);
      write_file(tmp, *content);
    }
    for (std::size_t k = 0; k < files.size(); ++k)
      fs::rename(temps[k], files[k].first);
  } catch (...) {
    std::error_code ec;
    for (auto const &t : temps)
      fs::remove(t, ec);
    throw;
  }
}

int run_command(fs::path const &config_path, std::optional<std::string> const &out_dir,
                std::optional<std::uint64_t> seed, std::ostream &out, std::ostream &err) {
  std::optional<ExperimentConfig> config;
  try {
    config.emplace(load_config(config_path, seed));
  } catch (Error const &e) {
    err << "mergo: invalid config: " << e.what() << "\n";
    return exit_code::validation;
  }

  RunOutputs outputs;
  try {
    outputs = run_experiment(*config);
  } catch (Error const &e) {
    err << "mergo: run failed: " << e.what() << "\n";
    return exit_code::failure;
  }

  fs::path const dir = out_dir ? fs::path(*out_dir)
                               : fs::path(config->output_dir.value_or("out"));
  try {
    write_outputs(outputs, dir);
  } catch (std::exception const &e) {
    err << "mergo: " << e.what() << "\n";
    return exit_code::validation;
  }

  std::size_t failed = 0;
  for (auto const &rep : outputs.reports)
    if (!rep.satisfied) {
      ++failed;
      err << "mergo: " << rep.theorem_tag << " violated: lhs " << format_double(rep.lhs)
          << " > rhs " << format_double(rep.rhs);
      if (rep.epsilon)
        err << " at epsilon " << format_double(*rep.epsilon);
      err << "\n";
    }
  out << "wrote " << (dir / "trace.csv").string() << ", reports.json, manifest.json ("
      << outputs.reports.size() << " reports, " << failed << " violated)\n";
  return failed ? exit_code::failure : exit_code::success;
}

int gen_command(std::string const &kind, std::uint64_t seed, std::size_t size, std::ostream &out,
                std::ostream &err) {
  try {
    out << generate_fragment(kind, seed, size).dump(2) << "\n";
  } catch (Error const &e) {
    err << "mergo: " << e.what() << "\n";
    return exit_code::validation;
  }
  return exit_code::success;
}

} // namespace mergo
