#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apportion/rational.hpp"

namespace apportion {

/// Raised by WeightedBipartiteInstance::validate().
class InvalidInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bipartite graph with named nodes. Internally node ids are dense: A-side
/// nodes occupy [0, |A|) and B-side nodes [|A|, |A|+|B|).
class BipartiteGraph {
public:
    struct Edge {
        std::size_t a;  // index into the A side
        std::size_t b;  // index into the B side
    };

    BipartiteGraph() = default;
    BipartiteGraph(std::vector<std::string> a_nodes, std::vector<std::string> b_nodes, std::vector<Edge> edges);

    std::size_t a_count() const { return a_nodes_.size(); }
    std::size_t b_count() const { return b_nodes_.size(); }
    std::size_t node_count() const { return a_nodes_.size() + b_nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::vector<std::string>& a_nodes() const { return a_nodes_; }
    const std::vector<std::string>& b_nodes() const { return b_nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::size_t a_node(std::size_t a) const { return a; }
    std::size_t b_node(std::size_t b) const { return a_nodes_.size() + b; }
    std::size_t edge_a_node(std::size_t e) const { return edges_[e].a; }
    std::size_t edge_b_node(std::size_t e) const { return a_nodes_.size() + edges_[e].b; }
    bool is_a_node(std::size_t node) const { return node < a_nodes_.size(); }

    const std::string& node_name(std::size_t node) const;
    /// Dense node id for a name; throws std::out_of_range for unknown names.
    std::size_t node_id(std::string_view name) const;

    /// Edge ids incident to a node, ascending.
    const std::vector<std::size_t>& incident(std::size_t node) const { return incident_[node]; }

private:
    std::vector<std::string> a_nodes_;
    std::vector<std::string> b_nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> incident_;
};

/// Bipartite graph plus edge weights w_e^t for time steps t = 1..T.
///
/// The weights are stored per edge so that malformed input (an edge short of
/// weights) stays representable until validate() reports it.
class WeightedBipartiteInstance {
public:
    WeightedBipartiteInstance(BipartiteGraph graph, std::size_t steps, std::vector<std::vector<Rational>> edge_weights);

    /// Single time step convenience constructor.
    static WeightedBipartiteInstance single(BipartiteGraph graph, std::vector<Rational> weights);

    const BipartiteGraph& graph() const { return graph_; }
    std::size_t steps() const { return steps_; }

    /// w_e^t with 1-based t.
    const Rational& weight(std::size_t edge, std::size_t t) const;
    const std::vector<Rational>& edge_weights(std::size_t edge) const { return weights_[edge]; }

    /// Throws InvalidInstance on duplicate edges, endpoints outside the
    /// declared sides, missing weights or weights outside [0, 1].
    void validate() const;

    /// d_v^t: exact sum of weights of edges incident to `node` at step t.
    Rational fractional_degree(std::size_t node, std::size_t t) const;
    Rational fractional_degree(std::string_view node, std::size_t t) const;

    /// Least common denominator of all weights.
    std::int64_t common_denominator() const;

private:
    BipartiteGraph graph_;
    std::size_t steps_;
    std::vector<std::vector<Rational>> weights_;
};

/// Bits X_e^t with derived degrees D_v^t.
class RoundingOutcome {
public:
    RoundingOutcome(const BipartiteGraph& graph, std::size_t steps);

    std::size_t steps() const { return steps_; }
    std::size_t edge_count() const { return edge_count_; }

    bool bit(std::size_t edge, std::size_t t) const { return bits_[(t - 1) * edge_count_ + edge] != 0; }
    void set_bit(std::size_t edge, std::size_t t, bool value) { bits_[(t - 1) * edge_count_ + edge] = value ? 1 : 0; }

    /// D_v^t for a graph node.
    std::int64_t degree(const BipartiteGraph& graph, std::size_t node, std::size_t t) const;

private:
    std::size_t steps_;
    std::size_t edge_count_;
    std::vector<std::uint8_t> bits_;
};

}  // namespace apportion
