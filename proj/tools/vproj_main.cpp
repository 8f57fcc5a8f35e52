#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vproj/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vproj: separable nonlinear least-squares solvers (variable projection family)"};
  app.require_subcommand(1);
  app.set_config("--config");

  vproj::CliConfig cfg;
  std::string data_path;
  std::size_t train_split = 0;
  std::vector<double> init;
  std::string replay_path;
  std::string property;
  double planted = 0.0;

  CLI::App* fit = app.add_subcommand("fit", "run one optimizer on one model/dataset");
  fit->add_option("--model", cfg.model, "complex-exp|rbf-ar|rbf-net");
  fit->add_option("--optimizer", cfg.optimizers, "vp|vplr|joint|alternating|bcd");
  fit->add_option("--jacobian", cfg.jacobian, "gp|kaufman|ruano");
  auto* fit_data = fit->add_option("--data", data_path, "input CSV (bundled surrogate otherwise)");
  auto* fit_split = fit->add_option("--train-split", train_split, "rows used for training");
  fit->add_option("--epsilon", cfg.epsilon, "stopping tolerance");
  fit->add_option("--max-iters", cfg.max_iters, "iteration budget");
  fit->add_option("--seed", cfg.seed, "seed for data/init draws");
  fit->add_option("--out", cfg.out_path, "artifact path (default vproj_fit.json)");
  fit->add_option("--format", cfg.format, "json|csv");
  auto* fit_init = fit->add_option("--init", init, "explicit nonlinear start (comma separated)")
                       ->delimiter(',');
  fit->add_option("--noise-sigma", cfg.noise_sigma, "synthetic noise level (complex-exp)");
  fit->add_option("--centers", cfg.rbf_centers, "RBF centers (rbf-net)");
  auto* fit_replay =
      fit->add_option("--replay", replay_path, "re-run an artifact's config and compare traces");

  CLI::App* experiment =
      app.add_subcommand("experiment", "run a bundled experiment across optimizers");
  experiment->add_option("name", cfg.experiment, "exp-complex|exp-ozone|exp-concrete");
  experiment->add_option("--optimizer", cfg.optimizers,
                         "optimizers to include (default: all five)");
  experiment->add_option("--jacobian", cfg.jacobian, "gp|kaufman|ruano");
  auto* exp_data = experiment->add_option("--data", data_path, "real dataset CSV");
  auto* exp_split = experiment->add_option("--train-split", train_split, "training rows");
  experiment->add_option("--epsilon", cfg.epsilon, "stopping tolerance");
  auto* exp_iters = experiment->add_option("--max-iters", cfg.max_iters,
                                           "iteration budget (default 50)");
  experiment->add_option("--seed", cfg.seed, "experiment seed");
  experiment->add_option("--out", cfg.out_path, "output prefix");
  experiment->add_option("--format", cfg.format, "json|csv (csv adds a table file)");
  experiment->add_option("--noise-sigma", cfg.noise_sigma, "synthetic noise (exp-complex)");
  experiment->add_option("--centers", cfg.rbf_centers, "RBF centers (exp-concrete)");
  auto* exp_replay = experiment->add_option("--replay", replay_path,
                                            "re-run an artifact's config and compare traces");

  CLI::App* verify = app.add_subcommand("verify", "run the seeded invariant suites");
  auto* verify_property = verify->add_option(
      "--property", property,
      "moore-penrose|projector|jacobian-fd|gradient-identity|secant|t-symmetry|normal-solve");
  verify->add_flag("--corrupt-jacobian-sign", cfg.corrupt_jacobian_sign,
                   "test hook: flip a Jacobian sign so the suite must fail");

  CLI::App* rates = app.add_subcommand("rates", "empirical convergence-order estimates");
  rates->add_option("--model", cfg.model, "model (complex-exp)");
  rates->add_option("--residual", cfg.residual_regime, "small|large");
  rates->add_option("--jacobian", cfg.jacobian, "gp|kaufman|ruano (large regime)");
  rates->add_option("--max-iters", cfg.max_iters, "budget for the large regime");
  rates->add_option("--seed", cfg.seed, "seed");
  rates->add_option("--out", cfg.out_path, "write the JSON report here too");
  auto* rates_planted =
      rates->add_option("--planted", planted, "bypass solvers; fit a planted geometric sequence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vproj::exit_code::kUsage;
  }

  if (fit->parsed()) {
    cfg.subcommand = "fit";
    if (fit_data->count()) cfg.data_path = data_path;
    if (fit_split->count()) cfg.train_split = train_split;
    if (fit_init->count()) cfg.init = init;
    if (fit_replay->count()) cfg.replay_path = replay_path;
  } else if (experiment->parsed()) {
    cfg.subcommand = "experiment";
    if (exp_data->count()) cfg.data_path = data_path;
    if (exp_split->count()) cfg.train_split = train_split;
    if (!exp_iters->count()) cfg.max_iters = 50;
    if (exp_replay->count()) cfg.replay_path = replay_path;
  } else if (verify->parsed()) {
    cfg.subcommand = "verify";
    if (verify_property->count()) cfg.property = property;
  } else if (rates->parsed()) {
    cfg.subcommand = "rates";
    if (rates_planted->count()) cfg.planted_order = planted;
  }

  return vproj::dispatch(cfg);
}
