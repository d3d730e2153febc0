#pragma once

#include <stdexcept>
#include <string>

namespace hag {

/// Raised when a target or parameter set has no solution in the model
/// (as opposed to malformed input). Maps to exit code 1 in the CLI.
class InfeasibleError : public std::domain_error {
  public:
    explicit InfeasibleError(const std::string& what) : std::domain_error(what) {}
};

/// The generator's parameter vector.
struct HagParams {
    double mu = 0.0;       // mean offspring of the latent tree
    int depth = 0;         // D
    double theta = 0.0;    // color-switch intensity
    double q1 = 0.0;       // mass of height 1 in the height law
    double mu_o = 0.0;     // log-normal location of leaf marks
    double sigma_o = 0.0;  // log-normal scale of leaf marks
    double omega = 0.0;    // wildness rate
    double beta = 0.0;     // mark/wildness coupling
};

}  // namespace hag
