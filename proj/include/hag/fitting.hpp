#pragma once

#include <span>
#include <string>
#include <vector>

#include "hag/params.hpp"

namespace hag {

/// Observable statistics of the graph to be modelled.
struct TargetStats {
    double vertices = 0.0;  // |V|
    double labels = 0.0;    // K
    double d_A = 0.0;
    double d_C = 0.0;
    double kappa = 0.0;     // ALCC of the agreement graph
    double eta2 = 0.0;      // degree variance
};

struct CubeRootTargets {
    double mu = 0.0;
    double d_A_prime = 0.0;
    double pi1_prime = 0.0;
};

/// mu = 1 + d_A; d_A' = d_A (1 - c - log(1 - c)); pi1' = 1 / (1 - (1 - c) / log(1 - c)), c = kappa^(1/3).
CubeRootTargets cube_root_derive(double d_A, double kappa);

/// floor(log budget / log mu), at least 3. Throws InfeasibleError when budget <= mu^3.
int choose_depth(double vertex_budget, double mu);

/// Bisection on the expected label count.
double fit_theta(double mu, int depth, double target_K);

struct FitCurvePoint {
    double q1 = 0.0;
    double nu = 0.0;
    double pi1_prime = 0.0;
};

struct Q1NuFit {
    double q1 = 0.0;
    double nu = 0.0;
    double pi1_prime = 0.0;
    std::vector<FitCurvePoint> curve;  // grid points visited, q1 = 1 first
};

/// Mark mean nu with 2 Gamma.A = d_A' at a fixed height law.
double solve_nu(double mu, int depth, double theta, double eta2, double q1, double d_A_prime);

/// Scan q1 = 1, 0.995, ... until pi1'(q1) drops below the target, then
/// interpolate linearly and re-solve nu at the interpolated q1.
Q1NuFit fit_q1_nu(double mu, int depth, double theta, double eta2, double d_A_prime, double pi1_prime_target);

/// omega = 1 - sqrt(1 - d_C / (2 Gamma.(1 - A))).
double fit_omega(double d_C, std::span<const double> gamma, std::span<const double> A);

struct MleStats {
    std::size_t n = 0;
    double y_bar = 0.0;      // mean log degree
    double sigma_hat = 0.0;  // MLE standard deviation of log degrees
    double phi = 0.0;        // log of the mean degree
    double tau = 0.0;        // constrained estimate of sigma^2
    double eta2 = 0.0;       // preferred variance e^{2 phi} (e^tau - 1)
    double eta2_simplistic = 0.0;  // e^{2 y_bar + sigma_hat^2} (e^{sigma_hat^2} - 1)
};

MleStats constrained_mle(std::span<const double> log_degrees);

/// K log(scale n) / log(n).
double scaled_label_count(double K_original, double n_original, double scale);

struct FitOptions {
    double scale = 1.0;
    double beta = 0.0;
    bool rescale_labels = false;
    int max_depth_increments = 3;
};

struct FittedParams {
    HagParams params;
    double nu = 0.0;
    double eta2 = 0.0;
    double d_A_prime = 0.0;
    double pi1_prime = 0.0;         // achieved
    double pi1_prime_target = 0.0;
    double labels_used = 0.0;       // K after optional rescaling
    int depth_increments = 0;
    std::vector<FitCurvePoint> curve;
};

/// Full pipeline. Errors carry the failing stage name in their message.
FittedParams fit_pipeline(const TargetStats& targets, const FitOptions& opts = {});

}  // namespace hag
