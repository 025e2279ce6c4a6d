// kaclab: command-line harness for the named experiments.
//
//   kaclab <experiment> --seed S [options]
//   kaclab list
//
// Exit codes: 0 success, 2 validation error, 3 failed numeric check,
// 130 interrupted (partial CSV still written), 1 I/O or other errors.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <map>

#include <omp.h>

#include "CLI11.hpp"
#include "kaclab/error.hpp"
#include "kaclab/experiments.hpp"

namespace {

extern "C" void on_sigint(int) { kac::cli::request_interrupt(); }

struct RawOptions {
  std::uint64_t seed = 0;
  std::string ns, times, deltas;
  std::size_t replicas = 0, samples = 0, chains = 0;
  std::string kernel = "uniform", density, out = ".", name;
  double beta = 0.1, dt = 0.01;
  int threads = 0;
  bool serial = false;
};

std::string schema_text(const kac::cli::ExperimentInfo& info) {
  std::string s = "CSV columns: ";
  for (std::size_t k = 0; k < info.columns.size(); ++k) s += (k ? "," : "") + info.columns[k];
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kac master equation laboratory"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  RawOptions raw;
  std::map<std::string, CLI::App*> subs;
  for (const auto& info : kac::cli::experiments()) {
    CLI::App* sub = app.add_subcommand(info.name, info.summary);
    sub->footer(schema_text(info));
    sub->add_option("--seed", raw.seed, "master seed (64-bit)")->required();
    sub->add_option("--N", raw.ns, "particle counts: list 10,50 or range 3..8");
    sub->add_option("--replicas", raw.replicas, "independent replicas");
    sub->add_option("--times", raw.times, "time grid: list 0.5,1,2 or start:stop:step");
    sub->add_option("--kernel", raw.kernel,
                    "rho: uniform | cos2 | one-plus-cos | bump:<c>:<w> | table:<csv>; 3D: uniform | linear:<b> | power:<a>");
    sub->add_option("--f", raw.density, "density: gaussian[:var] | fdelta:<d> | bimodal[:a] | hermite:<n>:<c>");
    sub->add_option("--delta", raw.deltas, "delta values for fdelta-production");
    sub->add_option("--beta", raw.beta, "Einav exponent beta in (0, 1/6)");
    sub->add_option("--samples", raw.samples, "samples (per chain for MCMC experiments)");
    sub->add_option("--chains", raw.chains, "independent MCMC chains");
    sub->add_option("--dt", raw.dt, "PDE time step");
    sub->add_option("--out", raw.out, "output directory (KACLAB_OUTPUT_DIR overrides)");
    sub->add_option("--name", raw.name, "output base name (default: experiment name)");
    sub->add_option("--threads", raw.threads, "OpenMP threads (0 = runtime default)");
    sub->add_flag("--serial", raw.serial, "use the serial reference kernels");
    subs[info.name] = sub;
  }
  CLI::App* list = app.add_subcommand("list", "list experiments and their CSV columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (const auto& info : kac::cli::experiments()) {
      std::cout << info.name << "\n  " << info.summary << "\n  " << schema_text(info) << '\n';
    }
    return 0;
  }

  kac::cli::ExperimentConfig cfg;
  try {
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) cfg.experiment = name;
    }
    cfg.seed = raw.seed;
    if (!raw.ns.empty()) cfg.ns = kac::cli::parse_size_list(raw.ns);
    if (!raw.times.empty()) cfg.times = kac::cli::parse_double_list(raw.times);
    if (!raw.deltas.empty()) cfg.deltas = kac::cli::parse_double_list(raw.deltas);
    cfg.replicas = raw.replicas;
    cfg.samples = raw.samples;
    cfg.chains = raw.chains;
    cfg.kernel = raw.kernel;
    cfg.density = raw.density;
    cfg.beta = raw.beta;
    cfg.dt = raw.dt;
    cfg.name = raw.name;
    cfg.output_dir = raw.out;
    if (const char* env = std::getenv("KACLAB_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    cfg.exec = raw.serial ? kac::Exec::serial : kac::Exec::parallel;
    if (raw.threads > 0) omp_set_num_threads(raw.threads);

    std::signal(SIGINT, on_sigint);
    const kac::cli::ExperimentRecord rec = kac::cli::run_experiment(cfg);
    kac::cli::emit(rec, cfg.output_dir);
    std::cout << "wrote " << (cfg.output_dir / (rec.name + ".csv")).string() << " (" << rec.table.rows.size()
              << " rows)\n";
    for (const auto& [k, v] : rec.manifest) {
      if (k.find("fitted") != std::string::npos || k.find("target") != std::string::npos || k == "slope") {
        std::cout << "  " << k << " = " << v << '\n';
      }
    }
    if (rec.interrupted) {
      std::cerr << "interrupted: partial results written\n";
      return 130;
    }
    for (const auto& f : rec.failures) std::cerr << "check failed: " << f << '\n';
    return rec.failures.empty() ? 0 : 3;
  } catch (const kac::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const kac::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const kac::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
