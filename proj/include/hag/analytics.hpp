#pragma once

#include <span>
#include <vector>

#include "hag/heights.hpp"

namespace hag {

/// Per-generation moments of the latent tree size xi_t, t = 0..D.
struct BranchingMoments {
    double mu = 0.0;
    double zeta1sq = 0.0;  // offspring variance
    std::vector<double> mu_pow;  // mu^t
    std::vector<double> zeta2;   // Var[xi_t]
    std::vector<double> delta;   // approximation of E[1 / xi_t]

    int depth() const noexcept { return static_cast<int>(mu_pow.size()) - 1; }
};

/// delta_0 = 1; delta_t = mu^-t + (zeta1sq / (mu - 1)) mu^(-t-1) for t >= 1,
/// which reduces to mu^-t + mu^(-t-1) for 1+Poisson offspring.
BranchingMoments branching_moments(double mu, double zeta1sq, int depth);

/// Coupled-walk masses h(s, t) for 0 <= t <= s <= D.
class HMatrix {
  public:
    HMatrix(int depth, double a, double b) : depth_(depth), a_(a), b_(b), h_(static_cast<std::size_t>(depth) + 1) {}

    int depth() const noexcept { return depth_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double operator()(int s, int t) const { return h_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)]; }
    double& at(int s, int t) { return h_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)]; }
    void resize_row(int s) { h_[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(s) + 1, 0.0); }

  private:
    int depth_;
    double a_, b_;
    std::vector<std::vector<double>> h_;
};

/// h(s, t) = (nu mu^(t-s) + (1 - delta_(s-t)) (a + b (mu^t - 1)) mu^-s) / 2 with
/// a = eta2 / nu, b = nu zeta1sq / (mu (mu - 1)); h(s, s) = nu / 2.
HMatrix h_matrix(double nu, double eta2, const BranchingMoments& m);
HMatrix h_matrix(double nu, double eta2, double mu, double zeta1sq, int depth);

struct DecouplingProfile {
    std::vector<double> gamma;       // Gamma_t, t = 0..D-1
    std::vector<int> negative;       // heights t with Gamma_t < 0 (reported, not clamped)
};

/// Gamma_t = sum_{s > t} q_s (h(s, t+1) - h(s, t)).
DecouplingProfile decoupling_profile(const HMatrix& h, const HeightDistribution& q);

struct ColorCoeffs {
    std::vector<double> A;  // t = 0..D-1
    std::vector<double> C;
};

/// A_t = prod_{d = D-t}^{D} (1 - rho_d)^2, C_t = (1 - A_t) omega (2 - omega).
/// rates is indexed 0..D as returned by color_switch_rates.
ColorCoeffs color_coeffs(std::span<const double> rates, double omega, int depth);

struct EdgeCounts {
    double agreement = 0.0;     // M_A
    double conflict = 0.0;      // M_C
    double loops = 0.0;         // M_L
    double inadmissible = 0.0;
};

/// Expected multi-edge counts from the decoupling profile.
EdgeCounts expected_edge_counts(std::span<const double> gamma, const ColorCoeffs& cc, const BranchingMoments& m,
                                double nu, double eta2, const HeightDistribution& q);

/// Exact counts for a deterministic tree with constant marks.
EdgeCounts deterministic_edge_counts(double nu, double mu, const HeightDistribution& q, const ColorCoeffs& cc);

struct DegreeClustering {
    double d_A_prime = 0.0;
    double d_C_prime = 0.0;
    double pi1_prime = 0.0;
    double d_S = 0.0;
    double d_A = 0.0;
    double pi1 = 0.0;
    double kappa = 0.0;
};

DegreeClustering degree_and_clustering(std::span<const double> gamma, const ColorCoeffs& cc, double mu);

/// Mean collision count for weighted sampling with replacement, to O(n^-2).
double collision_mean(std::span<const double> nu, std::span<const double> eta2, double alpha);

/// Everything above evaluated at one parameter point.
struct AnalyticInputs {
    double mu = 0.0;
    int depth = 0;
    double theta = 0.0;
    double nu = 0.0;
    double eta2 = 0.0;
    double omega = 0.0;
    double zeta1sq = -1.0;  // negative means mu - 1 (1+Poisson)
};

struct AnalyticProfile {
    BranchingMoments moments;
    HMatrix h{0, 0.0, 0.0};
    DecouplingProfile decoupling;
    std::vector<double> rates;
    ColorCoeffs coeffs;
    EdgeCounts counts;
    DegreeClustering degrees;
};

AnalyticProfile analytic_profile(const AnalyticInputs& in, const HeightDistribution& q);

/// Gamma . v for equal-length vectors, accumulated in extended precision.
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace hag
