#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hag/rng.hpp"

namespace hag {

/// Walker/Vose alias table for O(1) sampling from a fixed discrete law.
class AliasTable {
  public:
    AliasTable() = default;
    explicit AliasTable(std::span<const double> weights);

    std::size_t size() const noexcept { return prob_.size(); }
    bool empty() const noexcept { return prob_.empty(); }

    template <class Engine>
    std::uint32_t sample(Engine& eng) const {
        const auto i = static_cast<std::uint32_t>(uniform_index(eng, prob_.size()));
        return uniform01(eng) < prob_[i] ? i : alias_[i];
    }

  private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace hag
