#include "apportion/cumulative_rounding.hpp"

#include <stdexcept>

#include "apportion/io.hpp"

namespace apportion {
namespace {

enum class Side { x, y };

Side flip(Side s) { return s == Side::x ? Side::y : Side::x; }

std::string step_label(std::size_t t) { return std::to_string(t); }

}  // namespace

LayeredGraph::LayeredGraph(const WeightedBipartiteInstance& instance)
    : original_(std::make_shared<const WeightedBipartiteInstance>(instance)),
      steps_(instance.steps()),
      original_nodes_(instance.graph().node_count()),
      edges_per_layer_(instance.graph().edge_count()) {
    instance.validate();
    const BipartiteGraph& g = instance.graph();
    const std::size_t n = original_nodes_;
    const std::size_t T = steps_;

    degree_.reserve(n * T);
    cumulative_.reserve(n * (T + 1));
    for (std::size_t v = 0; v < n; ++v) {
        Rational running;
        cumulative_.push_back(running);
        for (std::size_t t = 1; t <= T; ++t) {
            degree_.push_back(instance.fractional_degree(v, t));
            running += degree_.back();
            cumulative_.push_back(running);
        }
    }

    // Node sides: for an A-node the copy and onebar nodes sit on side X, the
    // twobar and transition nodes on side Y; B-nodes are mirrored.
    std::vector<std::string> x_names;
    std::vector<std::string> y_names;
    std::vector<Side> side_of;
    std::vector<std::size_t> side_index;
    auto add_node = [&](std::string name, Side side) {
        auto& names = side == Side::x ? x_names : y_names;
        side_of.push_back(side);
        side_index.push_back(names.size());
        names.push_back(std::move(name));
        return side_of.size() - 1;
    };

    node_ids_.resize(n * T * 3);
    transition_ids_.resize(n * (T + 1));
    for (std::size_t v = 0; v < n; ++v) {
        const std::string& name = g.node_name(v);
        const Side base = g.is_a_node(v) ? Side::x : Side::y;
        transition_ids_[v * (T + 1)] = add_node(name + "@0:1", flip(base));
        for (std::size_t t = 1; t <= T; ++t) {
            node_ids_[node_slot(v, t, 0)] = add_node(name + "@" + step_label(t), base);
            node_ids_[node_slot(v, t, 1)] = add_node(name + "#1@" + step_label(t), base);
            node_ids_[node_slot(v, t, 2)] = add_node(name + "#2@" + step_label(t), flip(base));
            transition_ids_[v * (T + 1) + t] = add_node(name + "@" + step_label(t) + ":" + step_label(t + 1), flip(base));
        }
    }

    std::vector<BipartiteGraph::Edge> edges;
    std::vector<Rational> weights;
    edges.reserve(T * layer_size());
    weights.reserve(T * layer_size());
    auto connect = [&](std::size_t u, std::size_t w, const Rational& weight) {
        if (side_of[u] == side_of[w]) throw std::logic_error("layered graph edge inside one side");
        const std::size_t x = side_of[u] == Side::x ? u : w;
        const std::size_t y = side_of[u] == Side::x ? w : u;
        edges.push_back({side_index[x], side_index[y]});
        weights.push_back(weight);
    };
    const Rational one(1);
    for (std::size_t t = 1; t <= T; ++t) {
        for (std::size_t e = 0; e < g.edge_count(); ++e)
            connect(node_ids_[node_slot(g.edge_a_node(e), t, 0)], node_ids_[node_slot(g.edge_b_node(e), t, 0)],
                    instance.weight(e, t));
        for (std::size_t v = 0; v < n; ++v) {
            const Rational before = cumulative_degree(v, t - 1).fractional_part();
            const Rational through = cumulative_degree(v, t).fractional_part();
            const Rational here = degree(v, t).fractional_part();
            connect(transition_ids_[v * (T + 1) + t - 1], onebar_node(v, t), before);
            connect(onebar_node(v, t), transition_ids_[v * (T + 1) + t], one - through);
            connect(copy_node(v, t), twobar_node(v, t), one - here);
            connect(twobar_node(v, t), onebar_node(v, t), here);
        }
    }

    // Remap node ids from creation order to the constructed graph's dense ids.
    const std::size_t x_count = x_names.size();
    auto dense = [&](std::size_t created) {
        return side_of[created] == Side::x ? side_index[created] : x_count + side_index[created];
    };
    for (auto& id : node_ids_) id = dense(id);
    for (auto& id : transition_ids_) id = dense(id);

    BipartiteGraph layered(std::move(x_names), std::move(y_names), std::move(edges));
    constructed_ = std::make_shared<const WeightedBipartiteInstance>(
        WeightedBipartiteInstance::single(std::move(layered), std::move(weights)));
    constructed_->validate();

    // Degree table: every constructed node except v^{T:T+1} has an integral
    // fractional degree given in closed form; verify it exactly.
    targets_.assign(constructed_->graph().node_count(), std::nullopt);
    for (std::size_t v = 0; v < n; ++v) {
        targets_[transition_node(v, 0)] = 0;
        for (std::size_t t = 1; t <= T; ++t) {
            targets_[copy_node(v, t)] = degree(v, t).floor() + 1;
            targets_[onebar_node(v, t)] =
                cumulative_degree(v, t).floor() - cumulative_degree(v, t - 1).floor() - degree(v, t).floor() + 1;
            targets_[twobar_node(v, t)] = 1;
            if (t < T) targets_[transition_node(v, t)] = 1;
        }
        const Rational last = one - cumulative_degree(v, T).fractional_part();
        if (last.is_integer()) targets_[transition_node(v, T)] = last.num();
    }
    for (std::size_t node = 0; node < targets_.size(); ++node) {
        const Rational d = constructed_->fractional_degree(node, 1);
        if (targets_[node] ? d != Rational(*targets_[node]) : d.is_integer())
            throw std::logic_error("layered graph degree table violated at " + constructed_->graph().node_name(node));
    }
}

std::size_t LayeredGraph::transition_node(std::size_t v, std::size_t t) const {
    if (t > steps_) throw std::out_of_range("transition node past the last step");
    return transition_ids_[v * (steps_ + 1) + t];
}

CumulativeOutcome::CumulativeOutcome(std::shared_ptr<const LayeredGraph> layered, const PipageState& state)
    : layered_(std::move(layered)), rounding_(layered_->original().graph(), layered_->steps()) {
    const std::size_t m = layered_->constructed().graph().edge_count();
    layered_bits_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (state.is_fractional(k)) throw std::logic_error("cumulative outcome taken from an unfinished run");
        layered_bits_[k] = state.rounded_up(k) ? 1 : 0;
    }
    for (std::size_t t = 1; t <= layered_->steps(); ++t)
        for (std::size_t e = 0; e < layered_->original().graph().edge_count(); ++e)
            rounding_.set_bit(e, t, layered_bits_[layered_->copy_edge(e, t)] != 0);
}

CumulativeRounder::CumulativeRounder(const WeightedBipartiteInstance& instance)
    : layered_(std::make_shared<const LayeredGraph>(instance)),
      pipage_(std::make_shared<const PipageGraph>(layered_->constructed())),
      state_(pipage_, 0) {}

void CumulativeRounder::run(std::uint64_t seed) {
    state_.reset(seed);
    state_.run();
}

CumulativeRun CumulativeRounder::start(std::uint64_t seed) const { return CumulativeRun(layered_, pipage_, seed); }

CumulativeRun CumulativeRounder::resume(const nlohmann::json& saved) const {
    CumulativeRun run(layered_, pipage_, 0);
    const auto& weights = saved.at("weights");
    if (!weights.is_array() || weights.size() != pipage_->edge_count())
        throw std::invalid_argument("saved run does not match this instance");
    if (saved.at("denominator").get<std::int64_t>() != pipage_->denominator())
        throw std::invalid_argument("saved run uses a different denominator");
    std::vector<std::int64_t> numerators;
    numerators.reserve(weights.size());
    for (const auto& w : weights) {
        const Rational r = Rational::parse(w.get<std::string>());
        numerators.push_back(r.num() * (pipage_->denominator() / r.den()));
    }
    CounterRng rng(std::stoull(saved.at("rng_key").get<std::string>()),
                   std::stoull(saved.at("rng_counter").get<std::string>()));
    run.state_.restore(std::move(numerators), rng);
    return run;
}

CumulativeRun::CumulativeRun(std::shared_ptr<const LayeredGraph> layered, std::shared_ptr<const PipageGraph> pipage,
                             std::uint64_t seed)
    : layered_(std::move(layered)), state_(std::move(pipage), seed) {}

std::size_t CumulativeRun::settle(std::size_t layers) {
    if (layers > layered_->steps()) throw std::out_of_range("cannot settle more layers than time steps");
    return state_.run_until_prefix_integral(layered_->layer_prefix_edges(layers));
}

bool CumulativeRun::settled(std::size_t layers) {
    return state_.lowest_fractional() >= layered_->layer_prefix_edges(layers);
}

bool CumulativeRun::bit(std::size_t e, std::size_t t) {
    if (!settled(t)) throw std::logic_error("layer " + std::to_string(t) + " is not settled yet");
    return state_.rounded_up(layered_->copy_edge(e, t));
}

CumulativeOutcome CumulativeRun::finish() {
    state_.run();
    return CumulativeOutcome(layered_, state_);
}

nlohmann::json CumulativeRun::save() const {
    nlohmann::json weights = nlohmann::json::array();
    const std::size_t m = state_.graph().edge_count();
    for (std::size_t k = 0; k < m; ++k) weights.push_back(state_.weight(k).to_string());
    return {{"denominator", state_.graph().denominator()},
            {"rng_key", std::to_string(state_.rng().key())},
            {"rng_counter", std::to_string(state_.rng().counter())},
            {"weights", std::move(weights)}};
}

CumulativeOutcome cumulative_round(const WeightedBipartiteInstance& instance, std::uint64_t seed) {
    CumulativeRounder rounder(instance);
    return rounder.round(seed);
}

AuditReport audit_degrees(const WeightedBipartiteInstance& instance, const RoundingOutcome& outcome) {
    AuditReport report;
    const BipartiteGraph& g = instance.graph();
    if (outcome.steps() != instance.steps() || outcome.edge_count() != g.edge_count()) {
        report.violations.push_back("outcome dimensions do not match the instance");
        return report;
    }
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        Rational expected;
        std::int64_t realized = 0;
        for (std::size_t t = 1; t <= instance.steps(); ++t) {
            const Rational d = instance.fractional_degree(v, t);
            const std::int64_t D = outcome.degree(g, v, t);
            expected += d;
            realized += D;
            const std::string at = g.node_name(v) + " at t=" + std::to_string(t);
            if (D != d.floor() && D != d.ceil())
                report.violations.push_back("degree preservation: " + at + " has degree " + std::to_string(D) +
                                            " for fractional degree " + d.to_string());
            if (realized != expected.floor() && realized != expected.ceil())
                report.violations.push_back("cumulative degree preservation: " + at + " has cumulative degree " +
                                            std::to_string(realized) + " for " + expected.to_string());
        }
    }
    return report;
}

AuditReport audit_outcome(const WeightedBipartiteInstance& instance, const CumulativeOutcome& outcome) {
    AuditReport report = audit_degrees(instance, outcome.rounding());
    if (!report.ok() && report.violations.front() == "outcome dimensions do not match the instance") return report;

    const LayeredGraph& lg = *outcome.layered_;
    const BipartiteGraph& g = instance.graph();
    const BipartiteGraph& cg = lg.constructed().graph();
    const auto& bits = outcome.layered_bits_;
    const RoundingOutcome& x = outcome.rounding();

    if (lg.original_nodes() != g.node_count() || lg.steps() != instance.steps()) {
        report.violations.push_back("outcome was produced for a different instance");
        return report;
    }
    for (std::size_t t = 1; t <= instance.steps(); ++t)
        for (std::size_t e = 0; e < g.edge_count(); ++e)
            if (x.bit(e, t) != (bits[lg.copy_edge(e, t)] != 0))
                report.violations.push_back("copy bit of edge " + std::to_string(e) + " at t=" + std::to_string(t) +
                                            " disagrees with the layered graph");

    // Each auxiliary edge is rounded up exactly when the event it encodes holds.
    auto expect = [&](std::size_t edge, bool event, const std::string& what) {
        if ((bits[edge] != 0) != event) report.violations.push_back(what);
    };
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        std::int64_t realized_before = 0;
        for (std::size_t t = 1; t <= instance.steps(); ++t) {
            const std::int64_t D = x.degree(g, v, t);
            const std::int64_t realized = realized_before + D;
            const std::string at = g.node_name(v) + " at t=" + std::to_string(t);
            expect(lg.down_edge(v, t), D == lg.degree(v, t).floor(), "down edge inconsistent for " + at);
            expect(lg.up_edge(v, t), D == lg.degree(v, t).floor() + 1, "up edge inconsistent for " + at);
            expect(lg.enter_edge(v, t), realized_before == lg.cumulative_degree(v, t - 1).floor() + 1,
                   "entering transition edge inconsistent for " + at);
            expect(lg.leave_edge(v, t), realized == lg.cumulative_degree(v, t).floor(),
                   "leaving transition edge inconsistent for " + at);
            realized_before = realized;
        }
    }

    for (std::size_t node = 0; node < cg.node_count(); ++node) {
        const auto target = lg.target_degree(node);
        if (!target) continue;
        std::int64_t degree = 0;
        for (std::size_t k : cg.incident(node)) degree += bits[k];
        if (degree != *target)
            report.violations.push_back("layered node " + cg.node_name(node) + " has degree " + std::to_string(degree) +
                                        " instead of " + std::to_string(*target));
    }
    return report;
}

nlohmann::ordered_json layered_graph_json(const LayeredGraph& layered) { return instance_to_json(layered.constructed()); }

}  // namespace apportion
