#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "apportion/bipartite.hpp"
#include "apportion/dependent_rounding.hpp"
#include "apportion/rational.hpp"

namespace apportion {

/// The layered graph on which cumulative rounding runs dependent rounding.
///
/// For every original node v and step t it holds v^t (the copy of v),
/// a "onebar" and a "twobar" node, and the transition node v^{t:t+1}; plus
/// v^{0:1}. Copy edges {a^t, b^t} carry w_e^t; four auxiliary edges per
/// (v, t) carry the fractional parts of d_v^t and of the running sums of
/// d_v. Edge ids are grouped by layer so that layers 1..h occupy the id
/// range [0, layer_prefix_edges(h)).
class LayeredGraph {
public:
    explicit LayeredGraph(const WeightedBipartiteInstance& instance);

    const WeightedBipartiteInstance& original() const { return *original_; }
    /// The constructed single-step instance.
    const WeightedBipartiteInstance& constructed() const { return *constructed_; }

    std::size_t steps() const { return steps_; }
    std::size_t original_nodes() const { return original_nodes_; }

    std::size_t copy_edge(std::size_t e, std::size_t t) const { return layer_base(t) + e; }
    /// {v^{t-1:t}, onebar v^t}
    std::size_t enter_edge(std::size_t v, std::size_t t) const { return aux_base(t) + 4 * v; }
    /// {onebar v^t, v^{t:t+1}}
    std::size_t leave_edge(std::size_t v, std::size_t t) const { return aux_base(t) + 4 * v + 1; }
    /// {v^t, twobar v^t}
    std::size_t down_edge(std::size_t v, std::size_t t) const { return aux_base(t) + 4 * v + 2; }
    /// {twobar v^t, onebar v^t}
    std::size_t up_edge(std::size_t v, std::size_t t) const { return aux_base(t) + 4 * v + 3; }

    std::size_t layer_prefix_edges(std::size_t layers) const { return layers * layer_size(); }

    std::size_t copy_node(std::size_t v, std::size_t t) const { return node_ids_[node_slot(v, t, 0)]; }
    std::size_t onebar_node(std::size_t v, std::size_t t) const { return node_ids_[node_slot(v, t, 1)]; }
    std::size_t twobar_node(std::size_t v, std::size_t t) const { return node_ids_[node_slot(v, t, 2)]; }
    /// v^{t:t+1} for 0 <= t <= T.
    std::size_t transition_node(std::size_t v, std::size_t t) const;

    /// d_v^t and the running sum over steps 1..t (0 for t = 0).
    const Rational& degree(std::size_t v, std::size_t t) const { return degree_[v * steps_ + (t - 1)]; }
    const Rational& cumulative_degree(std::size_t v, std::size_t t) const { return cumulative_[v * (steps_ + 1) + t]; }

    /// Integral fractional degree a constructed node must have: the value
    /// from the degree table, or nullopt for v^{T:T+1} whose degree
    /// 1 - frac(sum of d_v) need not be integral.
    std::optional<std::int64_t> target_degree(std::size_t node) const { return targets_[node]; }

private:
    std::size_t layer_size() const { return edges_per_layer_ + 4 * original_nodes_; }
    std::size_t layer_base(std::size_t t) const { return (t - 1) * layer_size(); }
    std::size_t aux_base(std::size_t t) const { return layer_base(t) + edges_per_layer_; }
    std::size_t node_slot(std::size_t v, std::size_t t, std::size_t role) const { return (v * steps_ + (t - 1)) * 3 + role; }

    std::shared_ptr<const WeightedBipartiteInstance> original_;
    std::shared_ptr<const WeightedBipartiteInstance> constructed_;
    std::size_t steps_;
    std::size_t original_nodes_;
    std::size_t edges_per_layer_;
    std::vector<std::size_t> node_ids_;        // copy / onebar / twobar per (v, t)
    std::vector<std::size_t> transition_ids_;  // per (v, t) with t = 0..T
    std::vector<Rational> degree_;
    std::vector<Rational> cumulative_;
    std::vector<std::optional<std::int64_t>> targets_;
};

class CumulativeOutcome;

/// Result of checking an outcome against every cumulative-rounding guarantee.
struct AuditReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Copy-edge bits X_e^t of a cumulative rounding run. The auxiliary bits of
/// the layered graph are kept for audit_outcome only.
class CumulativeOutcome {
public:
    const RoundingOutcome& rounding() const { return rounding_; }
    RoundingOutcome& rounding() { return rounding_; }
    const LayeredGraph& layered() const { return *layered_; }

private:
    friend class CumulativeRounder;
    friend class CumulativeRun;
    friend AuditReport audit_outcome(const WeightedBipartiteInstance&, const CumulativeOutcome&);

    CumulativeOutcome(std::shared_ptr<const LayeredGraph> layered, const PipageState& state);

    std::shared_ptr<const LayeredGraph> layered_;
    RoundingOutcome rounding_;
    std::vector<std::uint8_t> layered_bits_;
};

class CumulativeRun;

/// Cumulative rounding of one instance, reusable across seeds.
class CumulativeRounder {
public:
    explicit CumulativeRounder(const WeightedBipartiteInstance& instance);

    const LayeredGraph& layered() const { return *layered_; }

    /// Full run; afterwards bit(e, t) reads X_e^t.
    void run(std::uint64_t seed);
    bool bit(std::size_t e, std::size_t t) const { return state_.rounded_up(layered_->copy_edge(e, t)); }
    CumulativeOutcome outcome() const { return CumulativeOutcome(layered_, state_); }

    CumulativeOutcome round(std::uint64_t seed) {
        run(seed);
        return outcome();
    }

    /// Start an interruptible run (early-stop mode).
    CumulativeRun start(std::uint64_t seed) const;
    /// Continue a run saved with CumulativeRun::save().
    CumulativeRun resume(const nlohmann::json& saved) const;

private:
    std::shared_ptr<const LayeredGraph> layered_;
    std::shared_ptr<const PipageGraph> pipage_;
    PipageState state_;
};

/// Interruptible cumulative rounding: settle only the first layers, inspect
/// their bits, save, and later continue exactly where it stopped. Settling
/// in stages gives the same outcome as one full run with the same seed.
class CumulativeRun {
public:
    /// Round until every edge of layers 1..layers is integral.
    std::size_t settle(std::size_t layers);
    bool settled(std::size_t layers);
    /// X_e^t; throws std::logic_error while layer t is still fractional.
    bool bit(std::size_t e, std::size_t t);

    CumulativeOutcome finish();

    /// Residual weights (as "num/den" strings) plus generator position.
    nlohmann::json save() const;

private:
    friend class CumulativeRounder;
    CumulativeRun(std::shared_ptr<const LayeredGraph> layered, std::shared_ptr<const PipageGraph> pipage, std::uint64_t seed);

    std::shared_ptr<const LayeredGraph> layered_;
    PipageState state_;
};

CumulativeOutcome cumulative_round(const WeightedBipartiteInstance& instance, std::uint64_t seed);

/// Checks degree preservation and cumulative degree preservation of X for
/// every (v, t), consistency of every auxiliary bit with the event it
/// stands for, and the integral degree of every constructed node.
AuditReport audit_outcome(const WeightedBipartiteInstance& instance, const CumulativeOutcome& outcome);

/// Degree and cumulative degree preservation of plain bits.
AuditReport audit_degrees(const WeightedBipartiteInstance& instance, const RoundingOutcome& outcome);

/// The constructed graph in the instance JSON format, for inspection.
nlohmann::ordered_json layered_graph_json(const LayeredGraph& layered);

}  // namespace apportion
