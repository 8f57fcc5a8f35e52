#ifndef VPROJ_EXPERIMENT_HPP
#define VPROJ_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "vproj/optimizer.hpp"

namespace vproj {

// Descriptor for one bundled experiment run: every requested optimizer is
// started from the same initialization on the same data.
struct ExperimentSpec {
  std::string name;  // exp-complex | exp-ozone | exp-concrete
  std::vector<OptimizerVariant> optimizers = {
      OptimizerVariant::VP, OptimizerVariant::VPLR, OptimizerVariant::Joint,
      OptimizerVariant::Alternating, OptimizerVariant::BCD};
  JacobianVariant jacobian = JacobianVariant::GolubPereyra;
  std::size_t budget = 50;
  double epsilon = 1e-12;
  std::uint64_t seed = 7;
  std::optional<std::string> data_path;    // real CSV; bundled surrogate otherwise
  std::optional<std::size_t> train_split;  // default 450 (ozone) / 80% (concrete)
  double noise_sigma = 0.1;                // exp-complex
  std::size_t rbf_centers = 8;             // exp-concrete
};

struct OptimizerOutcome {
  OptimizerVariant variant = OptimizerVariant::VP;
  FitResult fit;
  double train_mse = 0.0;
  std::optional<double> test_mse;
};

struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  std::string dataset_provenance;  // synthetic(...) | file:<path> | surrogate(...)
  std::string init_description;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<OptimizerOutcome> outcomes;
};

// Runs the named experiment. Unknown names and empty optimizer sets are
// rejected; a missing data file falls back to the bundled surrogate with the
// provenance marked.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// The documented large-deviation start for the complex exponential problem:
// each true coordinate perturbed by a seeded uniform +-50 percent.
DenseVector complex_exponential_large_deviation_init(std::uint64_t seed);

}  // namespace vproj

#endif  // VPROJ_EXPERIMENT_HPP
