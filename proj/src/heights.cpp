#include "hag/heights.hpp"

#include <cmath>
#include <stdexcept>

namespace hag {

HeightDistribution::HeightDistribution(std::vector<double> probs) {
    if (probs.empty()) throw std::invalid_argument("height distribution: need at least one height");
    long double sum = 0.0L;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("height distribution: probabilities must be non-negative");
        sum += p;
    }
    if (std::fabs(static_cast<double>(sum) - 1.0) > 1e-9) {
        throw std::invalid_argument("height distribution: probabilities must sum to 1");
    }
    q_.assign(probs.size() + 1, 0.0);
    cdf_.assign(probs.size() + 1, 0.0);
    for (std::size_t s = 1; s <= probs.size(); ++s) {
        q_[s] = probs[s - 1];
        cdf_[s] = cdf_[s - 1] + q_[s];
    }
}

HeightDistribution HeightDistribution::canonical(double q1, int depth) {
    if (depth < 1) throw std::invalid_argument("height distribution: depth must be at least 1");
    if (!(q1 >= 0.0 && q1 <= 1.0)) throw std::invalid_argument("height distribution: q1 must lie in [0, 1]");
    if (depth == 1) {
        if (q1 != 1.0) throw std::invalid_argument("height distribution: depth 1 forces q1 = 1");
        return HeightDistribution({1.0});
    }
    std::vector<double> q(static_cast<std::size_t>(depth), (1.0 - q1) / (depth - 1));
    q[0] = q1;
    return HeightDistribution(std::move(q));
}

}  // namespace hag
