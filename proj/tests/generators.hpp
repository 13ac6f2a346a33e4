#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "apportion/bipartite.hpp"
#include "apportion/core_model.hpp"

namespace apportion::testing {

inline std::int64_t uniform(std::mt19937_64& g, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(g);
}

inline Rational random_weight(std::mt19937_64& g, std::int64_t max_den) {
    const std::int64_t d = uniform(g, 1, max_den);
    return Rational(uniform(g, 0, d), d);
}

/// Random bipartite instance: |A|, |B| in [1, max_side], each pair an edge
/// with probability 1/2, weights k/d with d <= max_den.
inline WeightedBipartiteInstance random_instance(std::mt19937_64& g, std::size_t max_side, std::size_t steps,
                                                 std::int64_t max_den) {
    const auto na = static_cast<std::size_t>(uniform(g, 1, static_cast<std::int64_t>(max_side)));
    const auto nb = static_cast<std::size_t>(uniform(g, 1, static_cast<std::int64_t>(max_side)));
    std::vector<std::string> a;
    std::vector<std::string> b;
    for (std::size_t i = 0; i < na; ++i) a.push_back("a" + std::to_string(i));
    for (std::size_t i = 0; i < nb; ++i) b.push_back("b" + std::to_string(i));
    std::vector<BipartiteGraph::Edge> edges;
    std::vector<std::vector<Rational>> weights;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            if (g() & 1u) continue;
            edges.push_back({i, j});
            std::vector<Rational> w;
            for (std::size_t t = 0; t < steps; ++t) w.push_back(random_weight(g, max_den));
            weights.push_back(std::move(w));
        }
    return WeightedBipartiteInstance(BipartiteGraph(std::move(a), std::move(b), std::move(edges)), steps,
                                     std::move(weights));
}

inline PopulationProfile random_profile(std::mt19937_64& g, std::size_t max_states, std::int64_t max_population) {
    std::vector<std::int64_t> p(static_cast<std::size_t>(uniform(g, 2, static_cast<std::int64_t>(max_states))));
    for (auto& x : p) x = uniform(g, 1, max_population);
    return PopulationProfile(std::move(p));
}

/// Every profile with 2..max_states states and total at most max_total.
inline std::vector<PopulationProfile> small_profiles(std::size_t max_states, std::int64_t max_total) {
    std::vector<PopulationProfile> out;
    std::vector<std::int64_t> p;
    auto rec = [&](auto&& self, std::int64_t left) -> void {
        if (p.size() >= 2) out.emplace_back(p);
        if (p.size() == max_states) return;
        for (std::int64_t x = 1; x <= left; ++x) {
            p.push_back(x);
            self(self, left - x);
            p.pop_back();
        }
    };
    rec(rec, max_total);
    return out;
}

}  // namespace apportion::testing
