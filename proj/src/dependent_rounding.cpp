#include "apportion/dependent_rounding.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace apportion {

PipageGraph::PipageGraph(const WeightedBipartiteInstance& instance, std::size_t t) {
    instance.validate();
    const BipartiteGraph& g = instance.graph();
    if (t < 1 || t > instance.steps()) throw std::out_of_range("time step outside the instance");
    if (g.node_count() >= std::numeric_limits<std::int32_t>::max() ||
        g.edge_count() >= std::numeric_limits<std::int32_t>::max())
        throw std::length_error("graph too large for pipage rounding");

    for (std::size_t e = 0; e < g.edge_count(); ++e) denominator_ = checked_lcm(denominator_, instance.weight(e, t).den());

    ends_.resize(2 * g.edge_count());
    initial_.resize(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        ends_[2 * e] = static_cast<std::uint32_t>(g.edge_a_node(e));
        ends_[2 * e + 1] = static_cast<std::uint32_t>(g.edge_b_node(e));
        const Rational& w = instance.weight(e, t);
        initial_[e] = w.num() * (denominator_ / w.den());
    }
    offsets_.assign(g.node_count() + 1, 0);
    for (std::size_t v = 0; v < g.node_count(); ++v)
        offsets_[v + 1] = offsets_[v] + static_cast<std::uint32_t>(g.incident(v).size());
    adjacency_.reserve(offsets_.back());
    for (std::size_t v = 0; v < g.node_count(); ++v)
        for (std::size_t e : g.incident(v)) adjacency_.push_back(static_cast<std::uint32_t>(e));
}

std::uint64_t pipage_stream(std::uint64_t seed) { return derive_seed(seed, "pipage"); }

PipageState::PipageState(std::shared_ptr<const PipageGraph> graph, std::uint64_t seed)
    : graph_(std::move(graph)), w_(graph_->initial_), rng_(pipage_stream(seed)) {
    position_.assign(graph_->node_count(), -1);
}

void PipageState::reset(std::uint64_t seed) {
    std::copy(graph_->initial_.begin(), graph_->initial_.end(), w_.begin());
    rng_ = CounterRng(pipage_stream(seed));
    cursor_ = 0;
}

void PipageState::restore(std::vector<std::int64_t> numerators, CounterRng rng) {
    if (numerators.size() != w_.size()) throw std::invalid_argument("restored state has the wrong edge count");
    for (std::int64_t x : numerators)
        if (x < 0 || x > graph_->denominator_) throw std::invalid_argument("restored weight outside [0, 1]");
    w_ = std::move(numerators);
    rng_ = rng;
    cursor_ = 0;
}

std::size_t PipageState::lowest_fractional() {
    while (cursor_ < w_.size() && !is_fractional(cursor_)) ++cursor_;
    return cursor_;
}

bool PipageState::find_structure() {
    const std::size_t start = lowest_fractional();
    if (start == w_.size()) return false;
    const PipageGraph& g = *graph_;

    walk_nodes_.clear();
    walk_edges_.clear();
    walk_nodes_.push_back(g.ends_[2 * start]);
    walk_nodes_.push_back(g.ends_[2 * start + 1]);
    walk_edges_.push_back(static_cast<std::uint32_t>(start));
    position_[walk_nodes_[0]] = 0;
    position_[walk_nodes_[1]] = 1;

    auto clear_positions = [&] {
        for (std::uint32_t v : walk_nodes_) position_[v] = -1;
    };

    for (int pass = 0; pass < 2; ++pass) {
        for (;;) {
            const std::uint32_t cur = walk_nodes_.back();
            const std::uint32_t last = walk_edges_.back();
            std::uint32_t next = std::numeric_limits<std::uint32_t>::max();
            for (std::uint32_t k = g.offsets_[cur]; k < g.offsets_[cur + 1]; ++k) {
                const std::uint32_t e = g.adjacency_[k];
                if (e != last && is_fractional(e)) {
                    next = e;
                    break;
                }
            }
            if (next == std::numeric_limits<std::uint32_t>::max()) break;
            const std::uint32_t other = g.ends_[2 * next] == cur ? g.ends_[2 * next + 1] : g.ends_[2 * next];
            if (position_[other] >= 0) {
                const auto from = static_cast<std::size_t>(position_[other]);
                structure_.assign(walk_edges_.begin() + static_cast<std::ptrdiff_t>(from), walk_edges_.end());
                structure_.push_back(next);
                cycle_ = true;
                clear_positions();
                return true;
            }
            position_[other] = static_cast<std::int32_t>(walk_nodes_.size());
            walk_nodes_.push_back(other);
            walk_edges_.push_back(next);
        }
        if (pass == 0) {
            std::reverse(walk_nodes_.begin(), walk_nodes_.end());
            std::reverse(walk_edges_.begin(), walk_edges_.end());
            for (std::size_t k = 0; k < walk_nodes_.size(); ++k) position_[walk_nodes_[k]] = static_cast<std::int32_t>(k);
        }
    }
    structure_.assign(walk_edges_.begin(), walk_edges_.end());
    cycle_ = false;
    clear_positions();
    return true;
}

std::optional<PipageStructure> PipageState::find_cycle_or_maximal_path() {
    if (!find_structure()) return std::nullopt;
    PipageStructure s;
    s.cycle = cycle_;
    s.edges.assign(structure_.begin(), structure_.end());
    return s;
}

namespace {

template <typename Edges>
void step_sizes(const Edges& edges, const std::vector<std::int64_t>& w, std::int64_t one, std::int64_t& raise,
                std::int64_t& lower) {
    raise = one;
    lower = one;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::int64_t x = w[edges[k]];
        if (k % 2 == 0) {
            raise = std::min(raise, one - x);
            lower = std::min(lower, x);
        } else {
            raise = std::min(raise, x);
            lower = std::min(lower, one - x);
        }
    }
}

template <typename Edges>
void shift(const Edges& edges, std::vector<std::int64_t>& w, std::int64_t odd_delta) {
    for (std::size_t k = 0; k < edges.size(); ++k) w[edges[k]] += (k % 2 == 0) ? odd_delta : -odd_delta;
}

template <typename Edges>
Branch flip_and_shift(const Edges& edges, std::vector<std::int64_t>& w, std::int64_t one, CounterRng& rng) {
    std::int64_t raise = 0;
    std::int64_t lower = 0;
    step_sizes(edges, w, one, raise, lower);
    if (raise + lower == 0) throw std::logic_error("pipage step on a structure without fractional edges");
    // Raise with probability lower / (raise + lower): compare u / 2^64 with it exactly.
    const uint128 u = rng();
    const bool up = u * static_cast<uint128>(raise + lower) < (static_cast<uint128>(lower) << 64);
    shift(edges, w, up ? raise : -lower);
    return up ? Branch::raise_odd : Branch::lower_odd;
}

}  // namespace

StepAmounts PipageState::amounts(const PipageStructure& structure) const {
    std::int64_t raise = 0;
    std::int64_t lower = 0;
    step_sizes(structure.edges, w_, graph_->denominator_, raise, lower);
    return {Rational(raise, graph_->denominator_), Rational(lower, graph_->denominator_)};
}

void PipageState::apply(const PipageStructure& structure, Branch branch) {
    std::int64_t raise = 0;
    std::int64_t lower = 0;
    step_sizes(structure.edges, w_, graph_->denominator_, raise, lower);
    if (raise + lower == 0) throw std::logic_error("pipage step on a structure without fractional edges");
    shift(structure.edges, w_, branch == Branch::raise_odd ? raise : -lower);
}

Branch PipageState::step(const PipageStructure& structure) {
    return flip_and_shift(structure.edges, w_, graph_->denominator_, rng_);
}

void PipageState::step_structure() { flip_and_shift(structure_, w_, graph_->denominator_, rng_); }

std::size_t PipageState::run() {
    std::size_t steps = 0;
    while (find_structure()) {
        step_structure();
        ++steps;
    }
    return steps;
}

std::size_t PipageState::run_until_prefix_integral(std::size_t prefix) {
    std::size_t steps = 0;
    while (lowest_fractional() < prefix && find_structure()) {
        step_structure();
        ++steps;
    }
    return steps;
}

RoundingOutcome dependent_round(const WeightedBipartiteInstance& instance, std::uint64_t seed) {
    if (instance.steps() != 1) throw std::invalid_argument("dependent_round expects a single time step");
    PipageState state(std::make_shared<const PipageGraph>(instance), seed);
    state.run();
    RoundingOutcome outcome(instance.graph(), 1);
    for (std::size_t e = 0; e < instance.graph().edge_count(); ++e) outcome.set_bit(e, 1, state.rounded_up(e));
    return outcome;
}

DependentRounder::DependentRounder(const WeightedBipartiteInstance& instance)
    : state_(std::make_shared<const PipageGraph>(instance), 0) {
    if (instance.steps() != 1) throw std::invalid_argument("DependentRounder expects a single time step");
}

void DependentRounder::round(std::uint64_t seed) {
    state_.reset(seed);
    state_.run();
}

}  // namespace apportion
