#include "ensmhd/channel.hpp"
#include "ensmhd/config.hpp"
#include "ensmhd/errors.hpp"
#include "ensmhd/mms.hpp"
#include "ensmhd/output.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace fs = std::filesystem;
using namespace ensmhd;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_numerical = 1;
constexpr int exit_config = 2;

struct Invocation {
  std::string config_path;
  std::string out_dir = "out";
  int threads = 1;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string element_name(ElementPair pair) { return pair == ElementPair::scott_vogelius ? "SV" : "TH"; }

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  char buf[32];
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", v[k]);
    s += (k ? "," : "") + std::string(buf);
  }
  return s;
}

std::string label(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

Manifest make_manifest(const RunConfig& c, const Invocation& inv) {
  const double theta = c.resolved_theta();
  const ViscousMargin margin = viscous_margin(c.phys.nu, c.phys.nu_m, theta);
  Manifest m;
  m.add("experiment", to_string(c.experiment));
  m.add("config", inv.config_path);
  m.add("nu", c.phys.nu);
  m.add("nu_m", c.phys.nu_m);
  m.add("s", c.phys.s);
  m.add("theta", theta);
  m.add("theta_mode", std::string(c.theta < 0.0 ? "auto" : "explicit"));
  m.add("alpha", margin.alpha);
  m.add("alpha_at_boundary", std::string(margin.at_boundary ? "true" : "false"));
  m.add("T", c.end_time);
  m.add("element", element_name(c.pair));
  switch (c.experiment) {
    case Experiment::mms_temporal:
      m.add("J", c.members);
      m.add("epsilon", c.epsilon);
      m.add("n", c.grid);
      m.add("steps", join(c.step_levels));
      break;
    case Experiment::mms_spatial:
      m.add("J", c.members);
      m.add("epsilon", c.epsilon);
      m.add("levels", join(c.grids));
      m.add("steps", c.steps);
      m.add("dt", c.dt);
      break;
    case Experiment::channel_step:
      m.add("J", c.members);
      m.add("epsilons", join(c.epsilons));
      m.add("target_h", c.target_h);
      m.add("dt", c.dt);
      break;
    case Experiment::bench:
      m.add("epsilon", c.epsilon);
      m.add("n", c.grid);
      m.add("dt", c.dt);
      m.add("members", join(c.bench_members));
      break;
  }
  m.add("vtk", std::string(c.write_vtk ? "true" : "false"));
  m.add("csv", std::string(c.write_csv ? "true" : "false"));
  m.add("step_log", std::string(c.write_step_log ? "true" : "false"));
  m.add("threads", inv.threads);
  return m;
}

/// Keeps the averaged fields of the most recent level seen.
struct FinalFields {
  std::optional<FEField> v, w;
};

int run_mms(const RunConfig& c, const Invocation& inv, const fs::path& out) {
  MmsSetup setup;
  setup.phys = c.phys;
  setup.theta = c.theta;
  setup.members = c.members;
  setup.epsilon = c.epsilon;
  setup.pair = c.pair;
  setup.threads = inv.threads;

  std::vector<std::unique_ptr<std::ofstream>> logs;
  std::vector<std::unique_ptr<StepLog>> step_logs;
  FinalFields last;
  auto observers = [&](int level) -> StepObserver {
    StepLog* log = nullptr;
    if (c.write_step_log) {
      logs.push_back(std::make_unique<std::ofstream>(open_output(out / ("steps_level" + std::to_string(level) + ".csv"))));
      step_logs.push_back(std::make_unique<StepLog>(*logs.back()));
      log = step_logs.back().get();
    }
    return [log, &last](const EnsembleState& s, const StepReport& r) {
      if (log) log->record(s, r);
      last.v = ensemble_average(s, Variable::v);
      last.w = ensemble_average(s, Variable::w);
    };
  };

  const RateTable table = c.experiment == Experiment::mms_temporal
                              ? temporal_convergence_study(setup, c.grid, c.end_time, c.step_levels, observers)
                              : spatial_convergence_study(setup, c.grids, c.end_time, c.steps, observers);
  table.write_csv(std::cout);
  if (c.write_csv) {
    auto f = open_output(out / "rates.csv");
    table.write_csv(f);
  }
  if (c.write_vtk && last.v) {
    auto f = open_output(out / "final_average.vtk");
    write_vtk(f, *last.v->space->mesh_ptr(), {{"v_average", &*last.v}, {"w_average", &*last.w}});
  }
  if (!table.complete()) {
    std::cerr << "ens-mhd: numerical failure: " << table.failure << '\n';
    return exit_numerical;
  }
  return exit_ok;
}

int run_channel_demo(const RunConfig& c, const Invocation& inv, const fs::path& out) {
  ChannelConfig cc;
  cc.phys = c.phys;
  cc.theta = c.theta;
  cc.dt = c.dt;
  cc.end_time = c.end_time;
  cc.target_h = c.target_h;
  cc.epsilons = c.epsilons;
  cc.threads = inv.threads;

  const auto disc = make_discretization(channel_mesh(cc.target_h), ElementPair::scott_vogelius);
  std::cout << "channel: " << disc->velocity->dof_count() << " velocity dofs, " << disc->pressure->dof_count()
            << " pressure dofs per subproblem\n";

  auto one_run = [&](double eps, int members) {
    std::unique_ptr<std::ofstream> log_file;
    std::unique_ptr<StepLog> log;
    if (c.write_step_log) {
      log_file = std::make_unique<std::ofstream>(open_output(out / ("steps_eps_" + label(eps) + ".csv")));
      log = std::make_unique<StepLog>(*log_file);
    }
    ChannelRun r = run_channel(disc, cc, eps, members, [&](const EnsembleState& s, const StepReport& rep) {
      if (log) log->record(s, rep);
    });
    if (c.write_vtk) {
      auto f = open_output(out / ("channel_eps_" + label(eps) + ".vtk"));
      write_vtk(f, *disc->mesh, {{"u_average", &r.u}, {"B_average", &r.B}});
    }
    std::cout << "  eps=" << label(eps) << " J=" << members << " done, max div u " << format_number(r.max_div_u)
              << ", max div B " << format_number(r.max_div_B) << '\n';
    return r;
  };

  const ChannelRun reference = one_run(0.0, 1);
  std::vector<ChannelDeviation> rows;
  for (double eps : cc.epsilons) rows.push_back(compare_to_reference(one_run(eps, c.members), reference));

  if (c.write_csv) {
    auto f = open_output(out / "channel.csv");
    f << "epsilon,members,deviation_u,deviation_B,max_div_u,max_div_B\n";
    f << format_number(0.0) << ",1," << format_number(0.0) << ',' << format_number(0.0) << ','
      << format_number(reference.max_div_u) << ',' << format_number(reference.max_div_B) << '\n';
    for (const auto& d : rows)
      f << format_number(d.epsilon) << ',' << c.members << ',' << format_number(d.deviation_u) << ','
        << format_number(d.deviation_B) << ',' << format_number(d.max_div_u) << ',' << format_number(d.max_div_B)
        << '\n';
  }
  for (const auto& d : rows)
    std::cout << "eps=" << label(d.epsilon) << " |<u>-u0| = " << format_number(d.deviation_u)
              << "  |<B>-B0| = " << format_number(d.deviation_B) << '\n';
  return exit_ok;
}

int run_bench(const RunConfig& c, const Invocation& inv, const fs::path& out) {
  const auto disc = make_discretization(mms_mesh(c.grid, c.pair), c.pair);
  std::ofstream csv;
  if (c.write_csv) {
    csv = open_output(out / "bench.csv");
    csv << "members,steps,factorizations_shared_per_step,factorizations_naive_per_step,shared_seconds,"
           "naive_seconds,max_state_difference\n";
  }
  bool counts_ok = true;
  for (int members : c.bench_members) {
    const SchemeParams params = make_scheme_params(c.phys, c.theta, c.dt, c.end_time, members);
    RunSummary result[2];
    double seconds[2] = {0.0, 0.0};
    int factorizations[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
      StepperOptions options;
      options.mode = k == 0 ? SolveMode::shared : SolveMode::per_member;
      options.threads = inv.threads;
      EnsembleStepper stepper(disc, c.phys, params, mms_members(members, c.epsilon, c.phys), options);
      const auto start = std::chrono::steady_clock::now();
      result[k] = run(stepper);
      seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      factorizations[k] = stepper.total_factorizations();
    }
    const int steps = params.steps();
    double diff = 0.0;
    for (int j = 0; j < members; ++j) {
      diff = std::max(diff, (result[0].final_state.v[j] - result[1].final_state.v[j]).cwiseAbs().maxCoeff());
      diff = std::max(diff, (result[0].final_state.w[j] - result[1].final_state.w[j]).cwiseAbs().maxCoeff());
    }
    const bool ok = factorizations[0] == 2 * steps && factorizations[1] == 2 * members * steps;
    counts_ok = counts_ok && ok;
    std::cout << "J=" << members << ": factorizations/step shared " << factorizations[0] / steps << ", naive "
              << factorizations[1] / steps << (ok ? "" : "  (UNEXPECTED)") << "; seconds shared "
              << format_number(seconds[0]) << ", naive " << format_number(seconds[1]) << '\n';
    if (csv.is_open())
      csv << members << ',' << steps << ',' << factorizations[0] / steps << ',' << factorizations[1] / steps << ','
          << format_number(seconds[0]) << ',' << format_number(seconds[1]) << ',' << format_number(diff) << '\n';
  }
  if (!counts_ok) {
    std::cerr << "ens-mhd: factorization counts differ from 2 (shared) and 2J (naive) per step\n";
    return exit_numerical;
  }
  return exit_ok;
}

int execute(Experiment experiment, const Invocation& inv) {
  RunConfig config;
  try {
    if (inv.threads < 1) throw ConfigError("--threads must be at least 1");
    config = read_run_config(ConfigFile::load(inv.config_path), experiment);
  } catch (const ConfigError& e) {
    std::cerr << "ens-mhd: config error: " << e.what() << '\n';
    return exit_config;
  } catch (const InvalidArgument& e) {
    std::cerr << "ens-mhd: config error: " << e.what() << '\n';
    return exit_config;
  }

  const fs::path out(inv.out_dir);
  try {
    fs::create_directories(out);
    const Manifest manifest = make_manifest(config, inv);
    {
      auto f = open_output(out / "manifest.txt");
      manifest.write(f);
    }
    manifest.write(std::cout);
    switch (experiment) {
      case Experiment::mms_temporal:
      case Experiment::mms_spatial: return run_mms(config, inv, out);
      case Experiment::channel_step: return run_channel_demo(config, inv, out);
      case Experiment::bench: return run_bench(config, inv, out);
    }
  } catch (const DivergenceError& e) {
    std::cerr << "ens-mhd: divergence at step " << e.step() << ": " << e.what() << '\n';
    return exit_numerical;
  } catch (const FactorizationError& e) {
    std::cerr << "ens-mhd: factorization failed: " << e.what() << '\n';
    return exit_numerical;
  } catch (const ConfigError& e) {
    std::cerr << "ens-mhd: config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "ens-mhd: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble MHD solver: BDF2 theta scheme in Elsasser variables"};
  app.require_subcommand(1);

  Invocation inv;
  std::optional<Experiment> chosen;
  for (Experiment e : {Experiment::mms_temporal, Experiment::mms_spatial, Experiment::channel_step, Experiment::bench}) {
    static const char* help[] = {"temporal convergence study on the unit square",
                                 "spatial convergence study on the unit square",
                                 "ensemble flow over a step in a channel",
                                 "shared versus per-member factorization benchmark"};
    auto* sub = app.add_subcommand(to_string(e), help[static_cast<int>(e)]);
    sub->add_option("--config", inv.config_path, "configuration file")->required();
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", inv.threads, "worker threads (2 solves v and w concurrently)")->capture_default_str();
    sub->callback([&chosen, e] { chosen = e; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }
  return execute(*chosen, inv);
}
