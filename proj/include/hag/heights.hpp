#pragma once

#include <vector>

#include "hag/rng.hpp"

namespace hag {

/// Law of the starting height (q_1, ..., q_D) of an edge attempt.
class HeightDistribution {
  public:
    /// probs[s - 1] = q_s for s = 1..D.
    explicit HeightDistribution(std::vector<double> probs);

    /// q_1 at height 1, the rest spread evenly over heights 2..D.
    static HeightDistribution canonical(double q1, int depth);

    int depth() const noexcept { return static_cast<int>(q_.size()) - 1; }
    /// q_s for s = 1..D; 0 outside that range.
    double operator()(int s) const noexcept {
        return (s >= 1 && s <= depth()) ? q_[static_cast<std::size_t>(s)] : 0.0;
    }

    template <class Engine>
    int sample(Engine& eng) const {
        const double u = uniform01(eng);
        for (int s = 1; s < depth(); ++s) {
            if (u < cdf_[static_cast<std::size_t>(s)]) return s;
        }
        return depth();
    }

  private:
    std::vector<double> q_;    // index 0 unused
    std::vector<double> cdf_;  // cdf_[s] = q_1 + ... + q_s
};

}  // namespace hag
