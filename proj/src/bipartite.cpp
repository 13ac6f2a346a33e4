#include "apportion/bipartite.hpp"

#include <set>
#include <utility>

namespace apportion {

BipartiteGraph::BipartiteGraph(std::vector<std::string> a_nodes, std::vector<std::string> b_nodes, std::vector<Edge> edges)
    : a_nodes_(std::move(a_nodes)), b_nodes_(std::move(b_nodes)), edges_(std::move(edges)) {
    incident_.resize(node_count());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edges_[e].a >= a_nodes_.size() || edges_[e].b >= b_nodes_.size())
            throw InvalidInstance("edge " + std::to_string(e) + " has an endpoint outside the declared sides");
        incident_[edge_a_node(e)].push_back(e);
        incident_[edge_b_node(e)].push_back(e);
    }
}

const std::string& BipartiteGraph::node_name(std::size_t node) const {
    return is_a_node(node) ? a_nodes_.at(node) : b_nodes_.at(node - a_nodes_.size());
}

std::size_t BipartiteGraph::node_id(std::string_view name) const {
    for (std::size_t i = 0; i < a_nodes_.size(); ++i)
        if (a_nodes_[i] == name) return i;
    for (std::size_t i = 0; i < b_nodes_.size(); ++i)
        if (b_nodes_[i] == name) return a_nodes_.size() + i;
    throw std::out_of_range("unknown node '" + std::string(name) + "'");
}

WeightedBipartiteInstance::WeightedBipartiteInstance(BipartiteGraph graph, std::size_t steps,
                                                     std::vector<std::vector<Rational>> edge_weights)
    : graph_(std::move(graph)), steps_(steps), weights_(std::move(edge_weights)) {
    weights_.resize(graph_.edge_count());
}

WeightedBipartiteInstance WeightedBipartiteInstance::single(BipartiteGraph graph, std::vector<Rational> weights) {
    std::vector<std::vector<Rational>> per_edge;
    per_edge.reserve(weights.size());
    for (const Rational& w : weights) per_edge.push_back({w});
    return WeightedBipartiteInstance(std::move(graph), 1, std::move(per_edge));
}

const Rational& WeightedBipartiteInstance::weight(std::size_t edge, std::size_t t) const {
    if (t < 1 || t > steps_) throw std::out_of_range("time step " + std::to_string(t) + " outside 1.." + std::to_string(steps_));
    const auto& w = weights_.at(edge);
    if (t > w.size()) throw InvalidInstance("missing weight for edge " + std::to_string(edge) + " at t=" + std::to_string(t));
    return w[t - 1];
}

void WeightedBipartiteInstance::validate() const {
    if (steps_ < 1) throw InvalidInstance("an instance needs at least one time step");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t e = 0; e < graph_.edge_count(); ++e) {
        const auto& edge = graph_.edges()[e];
        const std::string label = "edge {" + graph_.a_nodes()[edge.a] + ", " + graph_.b_nodes()[edge.b] + "}";
        if (!seen.emplace(edge.a, edge.b).second) throw InvalidInstance("duplicate " + label);
        if (weights_[e].size() < steps_)
            throw InvalidInstance("missing weight for " + label + " at t=" + std::to_string(weights_[e].size() + 1));
        if (weights_[e].size() > steps_) throw InvalidInstance(label + " has more weights than time steps");
        for (std::size_t t = 0; t < steps_; ++t) {
            const Rational& w = weights_[e][t];
            if (w < Rational(0) || w > Rational(1))
                throw InvalidInstance("weight out of range for " + label + " at t=" + std::to_string(t + 1) + ": " +
                                      w.to_string());
        }
    }
}

Rational WeightedBipartiteInstance::fractional_degree(std::size_t node, std::size_t t) const {
    if (node >= graph_.node_count()) throw std::out_of_range("unknown node id " + std::to_string(node));
    if (t < 1 || t > steps_) throw std::out_of_range("time step " + std::to_string(t) + " outside 1.." + std::to_string(steps_));
    Rational d;
    for (std::size_t e : graph_.incident(node)) d += weight(e, t);
    return d;
}

Rational WeightedBipartiteInstance::fractional_degree(std::string_view node, std::size_t t) const {
    return fractional_degree(graph_.node_id(node), t);
}

std::int64_t WeightedBipartiteInstance::common_denominator() const {
    std::int64_t l = 1;
    for (const auto& ws : weights_)
        for (const Rational& w : ws) l = checked_lcm(l, w.den());
    return l;
}

RoundingOutcome::RoundingOutcome(const BipartiteGraph& graph, std::size_t steps)
    : steps_(steps), edge_count_(graph.edge_count()), bits_(steps * graph.edge_count(), 0) {}

std::int64_t RoundingOutcome::degree(const BipartiteGraph& graph, std::size_t node, std::size_t t) const {
    std::int64_t d = 0;
    for (std::size_t e : graph.incident(node)) d += bit(e, t) ? 1 : 0;
    return d;
}

}  // namespace apportion
