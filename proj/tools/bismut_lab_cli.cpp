#include "bismut_lab/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"bismut_lab: pluriclosed flow and generalized geometry experiments"};
  app.require_subcommand(1, 1);

  std::string config_path;
  bismut_lab::CommandOptions opts;
  std::uint64_t seed = 0;
  double tol = 0.0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"identities", "curvature identity suite on random pluriclosed jets"},
      {"flow", "integrate the flow on a symmetric background"},
      {"background", "curvature report for a Hopf, torus-bundle or Lie background"},
      {"obstruct", "hypersurface invariants and slope obstruction verdicts"},
      {"oracle", "closed-form curvature against finite differences"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value config file with [section] headers")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "seed override for random suites");
    sub->add_option("--tol", tol, "tolerance override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : bismut_lab::kExitConfig;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--tol")) opts.tol = tol;

  try {
    const bismut_lab::Config cfg =
        config_path.empty() ? bismut_lab::Config{} : bismut_lab::Config::load(config_path);
    const int rc = bismut_lab::run_command(sub->get_name(), cfg, opts);
    std::cout << sub->get_name() << ": " << (rc == 0 ? "pass" : "tolerance failure") << '\n';
    return rc;
  } catch (const bismut_lab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bismut_lab::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bismut_lab::kExitConfig;
  }
}
