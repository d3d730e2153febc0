#include "hag/analytics.hpp"

#include <cmath>
#include <stdexcept>

#include "hag/latent_tree.hpp"

namespace hag {

namespace {

long double powl_int(long double x, int k) {
    long double r = 1.0L;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(s);
}

BranchingMoments branching_moments(double mu, double zeta1sq, int depth) {
    if (!(mu > 1.0)) throw std::invalid_argument("branching_moments: mu must exceed 1");
    if (!(zeta1sq >= 0.0)) throw std::invalid_argument("branching_moments: offspring variance must be non-negative");
    if (depth < 0) throw std::invalid_argument("branching_moments: depth must be non-negative");
    BranchingMoments m;
    m.mu = mu;
    m.zeta1sq = zeta1sq;
    const auto n = static_cast<std::size_t>(depth) + 1;
    m.mu_pow.resize(n);
    m.zeta2.resize(n);
    m.delta.resize(n);
    for (int t = 0; t <= depth; ++t) {
        const long double mt = powl_int(mu, t);
        const auto i = static_cast<std::size_t>(t);
        m.mu_pow[i] = static_cast<double>(mt);
        m.zeta2[i] = t == 0 ? 0.0 : static_cast<double>(zeta1sq * (mt - 1.0L) * (mt / mu) / (mu - 1.0));
        m.delta[i] = t == 0 ? 1.0 : static_cast<double>(1.0L / mt + zeta1sq / (mu - 1.0) / (mt * mu));
    }
    return m;
}

HMatrix h_matrix(double nu, double eta2, const BranchingMoments& m) {
    if (!(nu > 0.0)) throw std::invalid_argument("h_matrix: nu must be positive");
    if (!(eta2 >= 0.0)) throw std::invalid_argument("h_matrix: eta2 must be non-negative");
    const int D = m.depth();
    const double mu = m.mu;
    HMatrix h(D, eta2 / nu, nu * m.zeta1sq / (mu * (mu - 1.0)));
    for (int s = 0; s <= D; ++s) {
        h.resize_row(s);
        const long double mu_s = m.mu_pow[static_cast<std::size_t>(s)];
        for (int t = 0; t < s; ++t) {
            const long double mu_t = m.mu_pow[static_cast<std::size_t>(t)];
            const long double spread = (1.0L - m.delta[static_cast<std::size_t>(s - t)]) *
                                       (h.a() + h.b() * (mu_t - 1.0L)) / mu_s;
            h.at(s, t) = static_cast<double>(0.5L * (nu * mu_t / mu_s + spread));
        }
        h.at(s, s) = 0.5 * nu;
    }
    return h;
}

HMatrix h_matrix(double nu, double eta2, double mu, double zeta1sq, int depth) {
    return h_matrix(nu, eta2, branching_moments(mu, zeta1sq, depth));
}

DecouplingProfile decoupling_profile(const HMatrix& h, const HeightDistribution& q) {
    const int D = h.depth();
    if (q.depth() != D) throw std::invalid_argument("decoupling_profile: height law depth differs from h");
    DecouplingProfile p;
    p.gamma.assign(static_cast<std::size_t>(D), 0.0);
    for (int t = 0; t < D; ++t) {
        long double g = 0.0L;
        for (int s = t + 1; s <= D; ++s) g += static_cast<long double>(q(s)) * (h(s, t + 1) - h(s, t));
        p.gamma[static_cast<std::size_t>(t)] = static_cast<double>(g);
        if (g < 0.0L) p.negative.push_back(t);
    }
    return p;
}

ColorCoeffs color_coeffs(std::span<const double> rates, double omega, int depth) {
    if (depth < 1 || rates.size() != static_cast<std::size_t>(depth) + 1) {
        throw std::invalid_argument("color_coeffs: rates must have entries for depths 0..D");
    }
    if (!(omega >= 0.0 && omega < 1.0)) throw std::invalid_argument("color_coeffs: omega must lie in [0, 1)");
    const double w = omega * (2.0 - omega);
    ColorCoeffs cc;
    cc.A.resize(static_cast<std::size_t>(depth));
    cc.C.resize(static_cast<std::size_t>(depth));
    long double prod = 1.0L;
    for (int t = 0; t < depth; ++t) {
        const long double keep = 1.0L - rates[static_cast<std::size_t>(depth - t)];
        prod *= keep * keep;
        cc.A[static_cast<std::size_t>(t)] = static_cast<double>(prod);
        cc.C[static_cast<std::size_t>(t)] = static_cast<double>((1.0L - prod) * w);
    }
    return cc;
}

EdgeCounts expected_edge_counts(std::span<const double> gamma, const ColorCoeffs& cc, const BranchingMoments& m,
                                double nu, double eta2, const HeightDistribution& q) {
    const int D = m.depth();
    if (gamma.size() != static_cast<std::size_t>(D) || cc.A.size() != gamma.size() || q.depth() != D) {
        throw std::invalid_argument("expected_edge_counts: inconsistent depths");
    }
    const long double scale = m.mu_pow[static_cast<std::size_t>(D)];
    long double agree = 0.0L, conflict = 0.0L, inadmissible = 0.0L, loops = 0.0L;
    for (std::size_t t = 0; t < gamma.size(); ++t) {
        const long double g = gamma[t];
        agree += g * cc.A[t];
        conflict += g * cc.C[t];
        inadmissible += g * (1.0L - cc.A[t] - cc.C[t]);
    }
    for (int s = 1; s <= D; ++s) {
        const auto i = static_cast<std::size_t>(s);
        loops += static_cast<long double>(q(s)) * (scale / m.mu_pow[i]) * 0.5L *
                 (nu + (1.0L - m.delta[i]) * eta2 / nu);
    }
    return {static_cast<double>(scale * agree), static_cast<double>(scale * conflict), static_cast<double>(loops),
            static_cast<double>(scale * inadmissible)};
}

EdgeCounts deterministic_edge_counts(double nu, double mu, const HeightDistribution& q, const ColorCoeffs& cc) {
    const int D = q.depth();
    if (cc.A.size() != static_cast<std::size_t>(D)) throw std::invalid_argument("deterministic_edge_counts: depth");
    const long double muD = powl_int(mu, D);
    const long double pre = 0.5L * nu * muD * (mu - 1.0L);
    long double agree = 0.0L, conflict = 0.0L, inadmissible = 0.0L, loops = 0.0L;
    for (int s = 1; s <= D; ++s) {
        long double sa = 0.0L, sc = 0.0L, si = 0.0L;
        for (int t = 0; t < s; ++t) {
            const auto i = static_cast<std::size_t>(t);
            const long double mt = powl_int(mu, t);
            sa += cc.A[i] * mt;
            sc += cc.C[i] * mt;
            si += (1.0L - cc.A[i] - cc.C[i]) * mt;
        }
        const long double w = q(s) / powl_int(mu, s);
        agree += w * sa;
        conflict += w * sc;
        inadmissible += w * si;
        loops += w;
    }
    return {static_cast<double>(pre * agree), static_cast<double>(pre * conflict),
            static_cast<double>(0.5L * nu * muD * loops), static_cast<double>(pre * inadmissible)};
}

DegreeClustering degree_and_clustering(std::span<const double> gamma, const ColorCoeffs& cc, double mu) {
    if (gamma.empty() || cc.A.size() != gamma.size()) throw std::invalid_argument("degree_and_clustering: depth");
    if (!(mu > 1.0)) throw std::invalid_argument("degree_and_clustering: mu must exceed 1");
    DegreeClustering r;
    const double ga = dot(gamma, cc.A);
    r.d_A_prime = 2.0 * ga;
    r.d_C_prime = 2.0 * dot(gamma, cc.C);
    r.pi1_prime = gamma[0] * cc.A[0] / ga;
    const double adj = -std::expm1(-r.pi1_prime * r.d_A_prime / (mu - 1.0));
    r.d_S = (mu - 1.0) * adj;
    r.d_A = (1.0 - r.pi1_prime) * r.d_A_prime + r.d_S;
    r.pi1 = r.d_S / r.d_A;
    r.kappa = r.pi1 * r.pi1 * adj;
    return r;
}

double collision_mean(std::span<const double> nu, std::span<const double> eta2, double alpha) {
    if (nu.size() < 2) throw std::invalid_argument("collision_mean: need at least two weights");
    if (eta2.size() != nu.size()) throw std::invalid_argument("collision_mean: mean/variance length mismatch");
    long double lambda = 0.0L, big_lambda = 0.0L, zeta2 = 0.0L, cross = 0.0L;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        if (!(nu[i] > 0.0)) throw std::invalid_argument("collision_mean: means must be positive");
        if (!(eta2[i] >= 0.0)) throw std::invalid_argument("collision_mean: variances must be non-negative");
        lambda += nu[i];
        big_lambda += static_cast<long double>(nu[i]) * nu[i];
        zeta2 += eta2[i];
        cross += static_cast<long double>(nu[i]) * eta2[i];
    }
    const long double inner = (zeta2 + big_lambda) / lambda - 2.0L * cross / (lambda * lambda) +
                              zeta2 * big_lambda / (lambda * lambda * lambda);
    return static_cast<double>(0.5L * alpha * inner);
}

AnalyticProfile analytic_profile(const AnalyticInputs& in, const HeightDistribution& q) {
    AnalyticProfile p;
    const double z = in.zeta1sq < 0.0 ? in.mu - 1.0 : in.zeta1sq;
    p.moments = branching_moments(in.mu, z, in.depth);
    p.h = h_matrix(in.nu, in.eta2, p.moments);
    p.decoupling = decoupling_profile(p.h, q);
    p.rates = color_switch_rates(in.mu, in.depth, in.theta);
    p.coeffs = color_coeffs(p.rates, in.omega, in.depth);
    p.counts = expected_edge_counts(p.decoupling.gamma, p.coeffs, p.moments, in.nu, in.eta2, q);
    p.degrees = degree_and_clustering(p.decoupling.gamma, p.coeffs, in.mu);
    return p;
}

}  // namespace hag
