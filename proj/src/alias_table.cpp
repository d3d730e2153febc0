#include "hag/alias_table.hpp"

#include <numeric>
#include <stdexcept>

namespace hag {

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) return;
    long double total = 0.0L;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("alias table: negative or NaN weight");
        total += w;
    }
    if (!(total > 0.0L)) throw std::invalid_argument("alias table: weights sum to zero");

    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = static_cast<double>(weights[i] * static_cast<long double>(n) / total);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const auto s = small.back();
        small.pop_back();
        const auto l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for (auto i : large) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
    for (auto i : small) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
}

}  // namespace hag
