#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "apportion/bipartite.hpp"
#include "apportion/rational.hpp"
#include "apportion/rng.hpp"

namespace apportion {

/// Immutable integer form of one layer of an instance: every weight is
/// written as numerator / denominator() over the least common denominator,
/// so pipage updates stay exact with plain 64-bit integers.
class PipageGraph {
public:
    /// Uses the weights of time step `t` (1-based). Validates the instance.
    explicit PipageGraph(const WeightedBipartiteInstance& instance, std::size_t t = 1);

    std::size_t node_count() const { return offsets_.size() - 1; }
    std::size_t edge_count() const { return initial_.size(); }
    std::int64_t denominator() const { return denominator_; }

    std::size_t endpoint_a(std::size_t e) const { return ends_[2 * e]; }
    std::size_t endpoint_b(std::size_t e) const { return ends_[2 * e + 1]; }
    std::int64_t initial_numerator(std::size_t e) const { return initial_[e]; }

private:
    friend class PipageState;

    std::int64_t denominator_ = 1;
    std::vector<std::uint32_t> ends_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> adjacency_;  // incident edge ids per node, ascending
    std::vector<std::int64_t> initial_;
};

/// A cycle or maximal path of fractional edges. Entry k is labeled odd for
/// even k (the first edge is odd) and even otherwise.
struct PipageStructure {
    bool cycle = false;
    std::vector<std::size_t> edges;
};

/// The two step sizes of a pipage step: `raise` moves odd edges up and even
/// edges down, `lower` does the opposite.
struct StepAmounts {
    Rational raise;
    Rational lower;

    /// Probability of the raise branch, lower / (raise + lower), which keeps
    /// every weight's expectation unchanged.
    Rational raise_probability() const { return lower / (raise + lower); }
};

enum class Branch { raise_odd, lower_odd };

/// Mutable pipage rounding state over a shared PipageGraph.
///
/// Structure selection is deterministic: the walk starts from the
/// lowest-indexed fractional edge and always extends along the
/// lowest-indexed fractional edge available, first forward and then
/// backward. The only randomness is one 64-bit coin per step, compared
/// exactly against the raise probability.
class PipageState {
public:
    PipageState(std::shared_ptr<const PipageGraph> graph, std::uint64_t seed);

    /// Restart from the graph's initial weights with a new seed.
    void reset(std::uint64_t seed);

    const PipageGraph& graph() const { return *graph_; }

    Rational weight(std::size_t e) const { return Rational(w_[e], graph_->denominator_); }
    std::int64_t numerator(std::size_t e) const { return w_[e]; }
    bool is_fractional(std::size_t e) const { return w_[e] != 0 && w_[e] != graph_->denominator_; }
    bool rounded_up(std::size_t e) const { return w_[e] == graph_->denominator_; }

    /// Lowest fractional edge id, or edge_count() when all are integral.
    std::size_t lowest_fractional();
    bool all_integral() { return lowest_fractional() == graph_->edge_count(); }

    std::optional<PipageStructure> find_cycle_or_maximal_path();
    StepAmounts amounts(const PipageStructure& structure) const;
    void apply(const PipageStructure& structure, Branch branch);
    /// Flip the coin and apply; returns the branch taken.
    Branch step(const PipageStructure& structure);

    /// Run steps until every weight is 0 or 1. Returns the step count.
    std::size_t run();
    /// Run until every edge with id below `prefix` is integral.
    std::size_t run_until_prefix_integral(std::size_t prefix);

    const CounterRng& rng() const { return rng_; }

    /// Replace the weights and generator position, e.g. when resuming a
    /// saved run. Numerators must lie in [0, denominator].
    void restore(std::vector<std::int64_t> numerators, CounterRng rng);

private:
    bool find_structure();  // fills structure_, cycle_
    void step_structure();

    std::shared_ptr<const PipageGraph> graph_;
    std::vector<std::int64_t> w_;
    CounterRng rng_;
    std::size_t cursor_ = 0;

    std::vector<std::uint32_t> walk_nodes_;
    std::vector<std::uint32_t> walk_edges_;
    std::vector<std::int32_t> position_;
    std::vector<std::uint32_t> structure_;
    bool cycle_ = false;
};

/// Generator key used for a rounding run seeded with `seed`.
std::uint64_t pipage_stream(std::uint64_t seed);

/// Randomized pipage rounding of a single-step instance.
RoundingOutcome dependent_round(const WeightedBipartiteInstance& instance, std::uint64_t seed);

/// Reusable rounding of one instance for many seeds.
class DependentRounder {
public:
    explicit DependentRounder(const WeightedBipartiteInstance& instance);

    /// Rounds with `seed`; afterwards up(e) is X_e.
    void round(std::uint64_t seed);
    bool up(std::size_t e) const { return state_.rounded_up(e); }
    std::size_t edge_count() const { return state_.graph().edge_count(); }

private:
    PipageState state_;
};

}  // namespace apportion
