#include "hag/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hag/analytics.hpp"
#include "hag/latent_tree.hpp"
#include "hag/marks.hpp"

namespace hag {

namespace {

constexpr double kQ1Step = 0.005;
constexpr int kMaxDoublings = 64;

/// Fixed (mu, D, theta, eta2) context for evaluating Gamma at varying (q1, nu).
struct SearchContext {
    double mu;
    int depth;
    double eta2;
    BranchingMoments moments;
    ColorCoeffs coeffs;

    SearchContext(double mu_, int depth_, double theta, double eta2_)
        : mu(mu_), depth(depth_), eta2(eta2_), moments(branching_moments(mu_, mu_ - 1.0, depth_)),
          coeffs(color_coeffs(color_switch_rates(mu_, depth_, theta), 0.0, depth_)) {}

    std::vector<double> gamma(double q1, double nu) const {
        return decoupling_profile(h_matrix(nu, eta2, moments), HeightDistribution::canonical(q1, depth)).gamma;
    }
    double degree(double q1, double nu) const { return 2.0 * dot(gamma(q1, nu), coeffs.A); }
    double pi1_prime(double q1, double nu) const {
        const auto g = gamma(q1, nu);
        return g[0] * coeffs.A[0] / dot(g, coeffs.A);
    }
};

double solve_nu_in(const SearchContext& ctx, double q1, double d_A_prime) {
    double lo = d_A_prime;
    double hi = 2.0 * d_A_prime;
    double f_prev = ctx.degree(q1, lo);
    for (int i = 0;; ++i) {
        const double f = ctx.degree(q1, hi);
        if (f < f_prev) throw InfeasibleError("mean agreement degree is not increasing in nu");
        if (f >= d_A_prime) break;
        if (i == kMaxDoublings) throw InfeasibleError("no nu reaches the target agreement degree");
        lo = hi;
        f_prev = f;
        hi *= 2.0;
    }
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        (ctx.degree(q1, mid) < d_A_prime ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string labelled(const char* stage, const char* what) {
    const std::string msg = what;
    const std::string prefix = std::string(stage) + ": ";
    return msg.rfind(prefix, 0) == 0 ? msg : prefix + msg;
}

/// Runs one pipeline stage, prefixing errors with the stage name.
template <class Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(labelled(stage, e.what()));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(labelled(stage, e.what()));
    }
}

}  // namespace

CubeRootTargets cube_root_derive(double d_A, double kappa) {
    if (!(d_A > 0.0)) throw std::invalid_argument("cube_root_derive: d_A must be positive");
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("cube_root_derive: kappa must lie in (0, 1)");
    const double c = std::cbrt(kappa);
    const double l = std::log1p(-c);
    return {1.0 + d_A, d_A * (1.0 - c - l), 1.0 / (1.0 - (1.0 - c) / l)};
}

int choose_depth(double vertex_budget, double mu) {
    if (!(mu > 1.0)) throw std::invalid_argument("choose_depth: mu must exceed 1");
    if (!(vertex_budget > mu * mu * mu)) {
        throw InfeasibleError("vertex budget must exceed mu^3; increase |V|");
    }
    const int d = static_cast<int>(std::floor(std::log(vertex_budget) / std::log(mu) + 1e-9));
    return std::max(3, d);
}

double fit_theta(double mu, int depth, double target_K) {
    if (!(target_K > 1.0)) throw std::invalid_argument("fit_theta: target label count must exceed 1");
    if (depth < 2) throw std::invalid_argument("fit_theta: depth must be at least 2");
    auto K = [&](double th) { return expected_label_count(mu, depth, th); };
    double lo = (target_K - 1.0) / ((depth - 1) * (mu - 1.0));
    double hi = 10.0 * lo;
    for (int i = 0; K(lo) > target_K; ++i) {
        if (i == kMaxDoublings) throw InfeasibleError("fit_theta: cannot bracket target label count from below");
        lo *= 0.5;
    }
    double k_prev = K(lo);
    for (int i = 0;; ++i) {
        const double k = K(hi);
        if (k < k_prev) throw InfeasibleError("fit_theta: label count is not increasing in theta");
        if (k >= target_K) break;
        if (i == kMaxDoublings) throw InfeasibleError("fit_theta: target label count unreachable at this depth");
        k_prev = k;
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (K(mid) < target_K ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double solve_nu(double mu, int depth, double theta, double eta2, double q1, double d_A_prime) {
    return solve_nu_in(SearchContext(mu, depth, theta, eta2), q1, d_A_prime);
}

Q1NuFit fit_q1_nu(double mu, int depth, double theta, double eta2, double d_A_prime, double pi1_prime_target) {
    if (!(d_A_prime > 0.0)) throw std::invalid_argument("fit_q1_nu: d_A' must be positive");
    if (!(pi1_prime_target > 0.0 && pi1_prime_target < 1.0)) {
        throw std::invalid_argument("fit_q1_nu: pi1' target must lie in (0, 1)");
    }
    const SearchContext ctx(mu, depth, theta, eta2);
    Q1NuFit fit;
    FitCurvePoint prev{1.0, solve_nu_in(ctx, 1.0, d_A_prime), 0.0};
    prev.pi1_prime = ctx.pi1_prime(1.0, prev.nu);
    fit.curve.push_back(prev);
    if (prev.pi1_prime < pi1_prime_target) throw InfeasibleError("fit_q1_nu: pi1' below target already at q1 = 1");

    for (int k = 1;; ++k) {
        const double q1 = 1.0 - k * kQ1Step;
        if (q1 < -1e-12) throw InfeasibleError("fit_q1_nu: no solution at this depth");
        FitCurvePoint pt{std::max(0.0, q1), 0.0, 0.0};
        pt.nu = solve_nu_in(ctx, pt.q1, d_A_prime);
        pt.pi1_prime = ctx.pi1_prime(pt.q1, pt.nu);
        fit.curve.push_back(pt);
        if (pt.pi1_prime > prev.pi1_prime + 1e-12) {
            throw InfeasibleError("fit_q1_nu: pi1' increased as q1 decreased near q1 = " + std::to_string(pt.q1));
        }
        if (pt.pi1_prime <= pi1_prime_target) {
            const double f = (prev.pi1_prime - pi1_prime_target) / (prev.pi1_prime - pt.pi1_prime);
            fit.q1 = prev.q1 + f * (pt.q1 - prev.q1);
            fit.nu = solve_nu_in(ctx, fit.q1, d_A_prime);
            fit.pi1_prime = ctx.pi1_prime(fit.q1, fit.nu);
            return fit;
        }
        prev = pt;
    }
}

double fit_omega(double d_C, std::span<const double> gamma, std::span<const double> A) {
    if (!(d_C >= 0.0)) throw std::invalid_argument("fit_omega: d_C must be non-negative");
    if (gamma.size() != A.size()) throw std::invalid_argument("fit_omega: length mismatch");
    long double mismatch = 0.0L;
    for (std::size_t t = 0; t < gamma.size(); ++t) mismatch += static_cast<long double>(gamma[t]) * (1.0L - A[t]);
    const double capacity = static_cast<double>(2.0L * mismatch);
    if (d_C == 0.0) return 0.0;
    if (!(d_C < capacity)) {
        throw InfeasibleError("fit_omega: conflict degree exceeds mismatched-color capacity; increase D");
    }
    return 1.0 - std::sqrt(1.0 - d_C / capacity);
}

MleStats constrained_mle(std::span<const double> y) {
    if (y.empty()) throw std::invalid_argument("constrained_mle: empty sample");
    MleStats m;
    m.n = y.size();
    const double n = static_cast<double>(y.size());
    long double sum = 0.0L;
    double ymax = y[0];
    for (double v : y) {
        if (!std::isfinite(v)) throw std::invalid_argument("constrained_mle: non-finite entry");
        sum += v;
        ymax = std::max(ymax, v);
    }
    m.y_bar = static_cast<double>(sum / n);
    long double ss = 0.0L, es = 0.0L;
    for (double v : y) {
        ss += static_cast<long double>(v - m.y_bar) * (v - m.y_bar);
        es += std::exp(static_cast<long double>(v - ymax));
    }
    const double s2 = static_cast<double>(ss / n);
    m.sigma_hat = std::sqrt(s2);
    m.phi = ymax + static_cast<double>(std::log(es / n));
    const double c = m.phi - m.y_bar;
    m.tau = 2.0 * (std::sqrt(s2 + c * c + 1.0) - 1.0);
    m.eta2 = std::exp(2.0 * m.phi) * std::expm1(m.tau);
    m.eta2_simplistic = std::exp(2.0 * m.y_bar + s2) * std::expm1(s2);
    return m;
}

double scaled_label_count(double K_original, double n_original, double scale) {
    if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("scaled_label_count: scale must lie in (0, 1]");
    if (!(n_original > 1.0)) throw std::invalid_argument("scaled_label_count: n must exceed 1");
    if (!(scale * n_original > 1.0)) throw std::invalid_argument("scaled_label_count: scale * n must exceed 1");
    return K_original * std::log(scale * n_original) / std::log(n_original);
}

FittedParams fit_pipeline(const TargetStats& t, const FitOptions& opts) {
    if (!(opts.scale > 0.0 && opts.scale <= 1.0)) throw std::invalid_argument("fit: scale must lie in (0, 1]");
    if (!(t.eta2 >= 0.0)) throw std::invalid_argument("fit: degree variance must be non-negative");
    FittedParams out;
    const auto cr = in_stage("cube_root_derive", [&] { return cube_root_derive(t.d_A, t.kappa); });
    const double budget = opts.scale * t.vertices;
    const int base_depth = in_stage("choose_depth", [&] { return choose_depth(budget, cr.mu); });
    out.labels_used = opts.rescale_labels
                          ? in_stage("scaled_label_count",
                                     [&] { return scaled_label_count(t.labels, t.vertices, opts.scale); })
                          : t.labels;

    for (int inc = 0;; ++inc) {
        const int D = base_depth + inc;
        try {
            const double theta = in_stage("fit_theta", [&] { return fit_theta(cr.mu, D, out.labels_used); });
            const auto qn = in_stage("fit_q1_nu", [&] {
                return fit_q1_nu(cr.mu, D, theta, t.eta2, cr.d_A_prime, cr.pi1_prime);
            });
            const auto law = in_stage("lognormal_from_moments", [&] { return lognormal_from_moments(qn.nu, t.eta2); });
            const AnalyticInputs in{cr.mu, D, theta, qn.nu, t.eta2, 0.0, -1.0};
            const auto profile = analytic_profile(in, HeightDistribution::canonical(qn.q1, D));
            const double omega =
                in_stage("fit_omega", [&] { return fit_omega(t.d_C, profile.decoupling.gamma, profile.coeffs.A); });

            out.params = {cr.mu, D, theta, qn.q1, law.mu_o, law.sigma_o, omega, opts.beta};
            out.nu = qn.nu;
            out.eta2 = t.eta2;
            out.d_A_prime = profile.degrees.d_A_prime;
            out.pi1_prime = qn.pi1_prime;
            out.pi1_prime_target = cr.pi1_prime;
            out.depth_increments = inc;
            out.curve = qn.curve;
            return out;
        } catch (const InfeasibleError& e) {
            const std::string msg = e.what();
            const bool retry = msg.rfind("fit_omega", 0) == 0 || msg.rfind("fit_q1_nu", 0) == 0;
            if (!retry || inc >= opts.max_depth_increments) {
                throw InfeasibleError(msg + " (depth " + std::to_string(D) + ", after " + std::to_string(inc) +
                                      " depth increments)");
            }
        }
    }
}

}  // namespace hag
