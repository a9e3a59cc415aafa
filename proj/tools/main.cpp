#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kgs/commands.hpp"
#include "kgs/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral Hartree ground states of Pauli-Fierz models"};
  app.set_version_flag("--version", kgs::version());
  app.footer(std::string("Environment:\n  ") + kgs::kThreadsEnv +
             "  worker threads when --threads is absent (overrides the config file)\n"
             "Exit status: 0 ok, 1 not converged, 2 invalid configuration or input");
  app.require_subcommand(1, 1);

  kgs::CommandRequest request;
  std::string output_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  const std::string help_for[] = {
      "ground state, energy trace and field norms",
      "small-coupling sweep of E - mu_V against g",
      "ultraviolet cutoff sweep",
      "infrared growth of ||f_gs||^2 with the box length",
      "coherent and non-coherent second-order terms",
      "coherent-state identities and a truncated Pauli-Fierz comparison",
      "empirical convolution and coercivity ratios",
      "decomposition, infrared and existence diagnostics",
  };
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> output_opts, seed_opts, thread_opts;
  const auto& names = kgs::command_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help_for[i]);
    sub->add_option("--config", request.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    output_opts.push_back(sub->add_option("--output", output_dir, "output directory (overrides the config)"));
    seed_opts.push_back(sub->add_option("--seed", seed, "random seed (overrides the config)"));
    thread_opts.push_back(
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber));
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kgs::exit_invalid_config;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    request.command = names[i];
    if (output_opts[i]->count()) request.output_dir = output_dir;
    if (seed_opts[i]->count()) request.seed = seed;
    if (thread_opts[i]->count()) request.threads = threads;
  }
  return kgs::run_command(request, std::cout, std::cerr);
}
