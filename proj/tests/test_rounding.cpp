#include <gtest/gtest.h>

#include <map>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "apportion/cumulative_rounding.hpp"
#include "apportion/dependent_rounding.hpp"
#include "apportion/io.hpp"
#include "apportion/verify_lab.hpp"
#include "generators.hpp"

using namespace apportion;
using apportion::testing::random_instance;

namespace {

WeightedBipartiteInstance star(std::vector<Rational> w) {
    std::vector<std::string> b;
    std::vector<BipartiteGraph::Edge> e;
    for (std::size_t i = 0; i < w.size(); ++i) {
        b.push_back("b" + std::to_string(i));
        e.push_back({0, i});
    }
    return WeightedBipartiteInstance::single(BipartiteGraph({"a"}, b, e), std::move(w));
}

WeightedBipartiteInstance layer(const WeightedBipartiteInstance& inst, std::size_t t) {
    std::vector<Rational> w;
    for (std::size_t e = 0; e < inst.graph().edge_count(); ++e) w.push_back(inst.weight(e, t));
    return WeightedBipartiteInstance::single(inst.graph(), w);
}

}  // namespace

TEST(Bipartite, FractionalDegrees) {
    const auto inst = three_step_example();
    EXPECT_EQ(inst.fractional_degree("v1", 1), Rational(3, 4));
    EXPECT_EQ(inst.fractional_degree("v1", 3), Rational(3, 2));
    const auto isolated = WeightedBipartiteInstance::single(BipartiteGraph({"a", "z"}, {"b"}, {{0, 0}}), {Rational(1, 2)});
    EXPECT_EQ(isolated.fractional_degree("z", 1), Rational(0));
    const auto s = star({Rational(45, 100), Rational(25, 100), Rational(15, 100), Rational(15, 100)});
    EXPECT_EQ(s.fractional_degree("a", 1), Rational(1));
    EXPECT_THROW(inst.fractional_degree("nope", 1), std::out_of_range);
    EXPECT_THROW(inst.fractional_degree("v1", 4), std::out_of_range);
}

TEST(Bipartite, ValidationErrors) {
    three_step_example().validate();
    const auto too_big = star({Rational(5, 4)});
    try {
        too_big.validate();
        FAIL();
    } catch (const InvalidInstance& e) {
        EXPECT_NE(std::string(e.what()).find("weight out of range"), std::string::npos);
    }
    const WeightedBipartiteInstance short_weights(BipartiteGraph({"a"}, {"b"}, {{0, 0}}), 2, {{Rational(1, 2)}});
    try {
        short_weights.validate();
        FAIL();
    } catch (const InvalidInstance& e) {
        EXPECT_NE(std::string(e.what()).find("missing weight"), std::string::npos);
    }
    const auto dup = WeightedBipartiteInstance::single(BipartiteGraph({"a"}, {"b"}, {{0, 0}, {0, 0}}),
                                                       {Rational(1, 2), Rational(1, 2)});
    EXPECT_THROW(dup.validate(), InvalidInstance);
}

TEST(Bipartite, JsonRoundTrip) {
    const auto doc = nlohmann::json::parse(R"({"a_nodes":["x"],"b_nodes":["y","z"],"T":2,
        "edges":[{"a":"x","b":"y","weights":["0.25","1/2"]},{"a":"x","b":"z","weights":[1,"0"]}]})");
    const auto inst = instance_from_json(doc);
    inst.validate();
    EXPECT_EQ(inst.weight(0, 1), Rational(1, 4));
    EXPECT_EQ(inst.weight(1, 1), Rational(1));
    const auto again = instance_from_json(nlohmann::json::parse(instance_to_json(inst).dump()));
    EXPECT_EQ(again.weight(0, 2), Rational(1, 2));
    EXPECT_THROW(instance_from_json(nlohmann::json::parse(R"({"a_nodes":["x"],"b_nodes":[],"T":1,
        "edges":[{"a":"x","b":"q","weights":["1"]}]})")),
                 InputError);
}

TEST(BipartiteProperties, HandshakeAndAdditivity) {
    std::mt19937_64 g(21);
    for (int k = 0; k < 300; ++k) {
        const auto inst = random_instance(g, 5, 3, 12);
        const BipartiteGraph& gr = inst.graph();
        for (std::size_t t = 1; t <= 3; ++t) {
            Rational a_side;
            Rational b_side;
            Rational edges;
            for (std::size_t v = 0; v < gr.a_count(); ++v) a_side += inst.fractional_degree(v, t);
            for (std::size_t v = gr.a_count(); v < gr.node_count(); ++v) b_side += inst.fractional_degree(v, t);
            for (std::size_t e = 0; e < gr.edge_count(); ++e) edges += inst.weight(e, t);
            EXPECT_EQ(a_side, edges);
            EXPECT_EQ(b_side, edges);
        }
        // Splitting each weight into halves keeps every degree.
        std::vector<Rational> half;
        std::vector<Rational> full;
        for (std::size_t e = 0; e < gr.edge_count(); ++e) {
            full.push_back(inst.weight(e, 1));
            half.push_back(inst.weight(e, 1) / Rational(2));
        }
        const auto h = WeightedBipartiteInstance::single(gr, half);
        const auto f = WeightedBipartiteInstance::single(gr, full);
        for (std::size_t v = 0; v < gr.node_count(); ++v)
            EXPECT_EQ(h.fractional_degree(v, 1) + h.fractional_degree(v, 1), f.fractional_degree(v, 1));
    }
}

TEST(Pipage, StructureOnStarIsTwoEdgePath) {
    auto graph = std::make_shared<const PipageGraph>(star({Rational(1, 2), Rational(1, 2)}));
    PipageState s(graph, 1);
    auto st = s.find_cycle_or_maximal_path();
    ASSERT_TRUE(st);
    EXPECT_FALSE(st->cycle);
    EXPECT_EQ(st->edges.size(), 2u);
}

TEST(Pipage, FindsFourCycle) {
    BipartiteGraph g({"a1", "a2"}, {"b1", "b2"}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    auto graph = std::make_shared<const PipageGraph>(
        WeightedBipartiteInstance::single(g, {Rational(1, 2), Rational(1, 3), Rational(1, 4), Rational(2, 5)}));
    PipageState s(graph, 1);
    auto st = s.find_cycle_or_maximal_path();
    ASSERT_TRUE(st);
    EXPECT_TRUE(st->cycle);
    EXPECT_EQ(st->edges.size(), 4u);
}

TEST(Pipage, IntegralWeightsHaveNoStructure) {
    auto graph = std::make_shared<const PipageGraph>(star({Rational(1), Rational(0)}));
    PipageState s(graph, 1);
    EXPECT_FALSE(s.find_cycle_or_maximal_path());
    EXPECT_EQ(s.run(), 0u);
    EXPECT_TRUE(s.rounded_up(0));
    EXPECT_FALSE(s.rounded_up(1));
}

TEST(Pipage, StepAmounts) {
    auto graph = std::make_shared<const PipageGraph>(star({Rational(1, 2), Rational(1, 2)}));
    PipageState s(graph, 1);
    auto st = s.find_cycle_or_maximal_path();
    auto amounts = s.amounts(*st);
    EXPECT_EQ(amounts.raise, Rational(1, 2));
    EXPECT_EQ(amounts.lower, Rational(1, 2));

    auto skew = std::make_shared<const PipageGraph>(star({Rational(1, 4), Rational(3, 4)}));
    PipageState t(skew, 1);
    auto st2 = t.find_cycle_or_maximal_path();
    auto a2 = t.amounts(*st2);
    EXPECT_EQ(a2.raise, Rational(3, 4));
    EXPECT_EQ(a2.lower, Rational(1, 4));
    EXPECT_EQ(a2.raise_probability(), Rational(1, 4));
    t.apply(*st2, Branch::raise_odd);
    EXPECT_TRUE(t.rounded_up(0));
    EXPECT_FALSE(t.rounded_up(1));
}

TEST(Pipage, CycleStepKeepsTotalWeight) {
    BipartiteGraph g({"a1", "a2"}, {"b1", "b2"}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    auto graph = std::make_shared<const PipageGraph>(
        WeightedBipartiteInstance::single(g, {Rational(1, 2), Rational(1, 3), Rational(1, 4), Rational(2, 5)}));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        PipageState s(graph, seed);
        auto st = s.find_cycle_or_maximal_path();
        Rational before;
        for (std::size_t e : st->edges) before += s.weight(e);
        s.step(*st);
        Rational after;
        for (std::size_t e : st->edges) after += s.weight(e);
        EXPECT_EQ(before, after);
    }
}

TEST(DependentRound, SeedDeterminesOutcome) {
    const auto inst = layer(three_step_example(), 3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = dependent_round(inst, seed);
        const auto y = dependent_round(inst, seed);
        for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(x.bit(e, 1), y.bit(e, 1));
        const std::int64_t d = x.degree(inst.graph(), 0, 1);
        EXPECT_TRUE(d == 1 || d == 2);
    }
    EXPECT_THROW(dependent_round(three_step_example(), 0), std::invalid_argument);
}

TEST(DependentRound, StarHalfHalfSplitsEvenly) {
    const auto inst = star({Rational(1, 2), Rational(1, 2)});
    DependentRounder r(inst);
    int first = 0;
    const int runs = 20000;
    for (int s = 0; s < runs; ++s) {
        r.round(static_cast<std::uint64_t>(s));
        ASSERT_NE(r.up(0), r.up(1));
        first += r.up(0);
    }
    EXPECT_NEAR(static_cast<double>(first) / runs, 0.5, 4 * std::sqrt(0.25 / runs));
}

// Properties over random instances.

TEST(PipageProperties, InvariantsEveryStep) {
    std::mt19937_64 g(31);
    for (int k = 0; k < 300; ++k) {
        const auto inst = random_instance(g, 5, 1, 12);
        auto graph = std::make_shared<const PipageGraph>(inst);
        PipageState s(graph, g());
        std::vector<std::int64_t> prev(graph->edge_count());
        for (std::size_t e = 0; e < prev.size(); ++e) prev[e] = s.numerator(e);
        std::size_t steps = 0;
        while (auto st = s.find_cycle_or_maximal_path()) {
            for (std::size_t e : st->edges) ASSERT_TRUE(s.is_fractional(e));
            if (st->cycle) {
                EXPECT_EQ(st->edges.size() % 2, 0u);
            }
            std::size_t before = 0;
            for (std::size_t e = 0; e < prev.size(); ++e) before += !s.is_fractional(e);
            s.step(*st);
            ++steps;
            std::size_t after = 0;
            for (std::size_t e = 0; e < prev.size(); ++e) {
                ASSERT_GE(s.numerator(e), 0);
                ASSERT_LE(s.numerator(e), graph->denominator());
                const bool was_integral = prev[e] == 0 || prev[e] == graph->denominator();
                if (was_integral) {
                    ASSERT_EQ(s.numerator(e), prev[e]);
                }
                prev[e] = s.numerator(e);
                after += !s.is_fractional(e);
            }
            EXPECT_GT(after, before);
        }
        EXPECT_LE(steps, graph->edge_count());
        for (std::size_t e = 0; e < prev.size(); ++e) {
            if (inst.weight(e, 1) == Rational(1)) {
                EXPECT_TRUE(s.rounded_up(e));
            }
            if (inst.weight(e, 1) == Rational(0)) {
                EXPECT_FALSE(s.rounded_up(e));
            }
        }
        for (std::size_t v = 0; v < inst.graph().node_count(); ++v) {
            std::int64_t d = 0;
            for (std::size_t e : inst.graph().incident(v)) d += s.rounded_up(e);
            const Rational fd = inst.fractional_degree(v, 1);
            EXPECT_TRUE(d == fd.floor() || d == fd.ceil());
        }
    }
}

// Oracle: the exact distribution (rational probabilities) of dependent
// rounding, compared against the empirical distribution of seeded runs.
TEST(PipageProperties, EmpiricalMatchesExactDistribution) {
    using Big = boost::multiprecision::cpp_rational;
    std::mt19937_64 g(32);
    int checked = 0;
    while (checked < 15) {
        const auto inst = random_instance(g, 3, 1, 6);
        auto graph = std::make_shared<const PipageGraph>(inst);
        if (graph->edge_count() < 2 || graph->edge_count() > 8) continue;
        ++checked;
        const auto report = exact_rounding_check(inst);
        EXPECT_TRUE(report.ok()) << (report.failures.empty() ? "" : report.failures[0]);

        std::map<std::vector<std::uint8_t>, Big> exact;
        std::function<void(PipageState&, const Big&)> expand = [&](PipageState& s, const Big& p) {
            auto st = s.find_cycle_or_maximal_path();
            if (!st) {
                std::vector<std::uint8_t> bits;
                for (std::size_t e = 0; e < graph->edge_count(); ++e) bits.push_back(s.rounded_up(e));
                exact[bits] += p;
                return;
            }
            const auto a = s.amounts(*st);
            const Big up(Big(a.lower.num(), a.lower.den()) /
                         (Big(a.raise.num(), a.raise.den()) + Big(a.lower.num(), a.lower.den())));
            if (up > 0) {
                PipageState n = s;
                n.apply(*st, Branch::raise_odd);
                expand(n, p * up);
            }
            if (up < 1) {
                PipageState n = s;
                n.apply(*st, Branch::lower_odd);
                expand(n, p * (1 - up));
            }
        };
        PipageState root(graph, 0);
        expand(root, Big(1));
        EXPECT_EQ(report.outcomes, exact.size());

        std::map<std::vector<std::uint8_t>, int> seen;
        const int runs = 20000;
        PipageState s(graph, 0);
        for (int r = 0; r < runs; ++r) {
            s.reset(static_cast<std::uint64_t>(r));
            s.run();
            std::vector<std::uint8_t> bits;
            for (std::size_t e = 0; e < graph->edge_count(); ++e) bits.push_back(s.rounded_up(e));
            ++seen[bits];
        }
        for (const auto& [bits, count] : seen) ASSERT_TRUE(exact.count(bits)) << "outcome outside the exact support";
        for (const auto& [bits, p] : exact) {
            const double q = p.convert_to<double>();
            const double est = static_cast<double>(seen[bits]) / runs;
            EXPECT_LE(std::abs(est - q), 4 * std::sqrt(q * (1 - q) / runs) + 1e-12);
        }
    }
}

TEST(Layered, CountsForStar) {
    std::vector<std::string> b = {"b1", "b2", "b3", "b4"};
    std::vector<BipartiteGraph::Edge> e = {{0, 0}, {0, 1}, {0, 2}, {0, 3}};
    std::vector<std::vector<Rational>> w(4, std::vector<Rational>(3, Rational(1, 4)));
    const WeightedBipartiteInstance inst(BipartiteGraph({"a"}, b, e), 3, w);
    const LayeredGraph lg(inst);
    EXPECT_EQ(lg.constructed().graph().node_count(), 65u);
    EXPECT_EQ(lg.constructed().graph().edge_count(), 72u);
}

TEST(Layered, WeightFormulas) {
    // v with d = 3/4 at t = 1, 2: leave edge at t = 2 has 1 - 3/2 + 1 = 1/2.
    const auto inst = WeightedBipartiteInstance(BipartiteGraph({"v"}, {"u"}, {{0, 0}}), 2,
                                                {{Rational(3, 4), Rational(3, 4)}});
    const LayeredGraph lg(inst);
    const auto& c = lg.constructed();
    EXPECT_EQ(c.weight(lg.leave_edge(0, 2), 1), Rational(1, 2));
    EXPECT_EQ(c.weight(lg.enter_edge(0, 2), 1), Rational(3, 4));
    EXPECT_EQ(c.weight(lg.down_edge(0, 2), 1), Rational(1, 4));
    EXPECT_EQ(c.weight(lg.up_edge(0, 2), 1), Rational(3, 4));
    EXPECT_EQ(c.weight(lg.copy_edge(0, 1), 1), Rational(3, 4));

    const auto integral = WeightedBipartiteInstance(BipartiteGraph({"v"}, {"u"}, {{0, 0}}), 2,
                                                    {{Rational(1), Rational(0)}});
    const LayeredGraph li(integral);
    for (std::size_t k = 0; k < li.constructed().graph().edge_count(); ++k)
        EXPECT_TRUE(li.constructed().weight(k, 1).is_integer());
}

TEST(Layered, ExportsJson) {
    const LayeredGraph lg(three_step_example());
    const auto doc = layered_graph_json(lg);
    EXPECT_EQ(doc["edges"].size(), lg.constructed().graph().edge_count());
    const auto back = instance_from_json(nlohmann::json::parse(doc.dump()));
    back.validate();
}

TEST(Cumulative, ThreeStepExampleTotals) {
    const auto inst = three_step_example();
    CumulativeRounder r(inst);
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto out = r.round(seed);
        const auto& x = out.rounding();
        const std::int64_t two = x.degree(inst.graph(), 0, 1) + x.degree(inst.graph(), 0, 2);
        EXPECT_TRUE(two == 1 || two == 2);
        EXPECT_EQ(two + x.degree(inst.graph(), 0, 3), 3);
        EXPECT_TRUE(audit_outcome(inst, out).ok());
    }
}

TEST(Cumulative, AuditCatchesCorruption) {
    const auto inst = three_step_example();
    auto out = cumulative_round(inst, 4);
    ASSERT_TRUE(audit_outcome(inst, out).ok());
    out.rounding().set_bit(0, 1, !out.rounding().bit(0, 1));
    EXPECT_FALSE(audit_outcome(inst, out).ok());
}

TEST(Cumulative, IntegralInstanceIsFixed) {
    const WeightedBipartiteInstance inst(BipartiteGraph({"a"}, {"b", "c"}, {{0, 0}, {0, 1}}), 2,
                                         {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
    const auto out = cumulative_round(inst, 9);
    EXPECT_TRUE(out.rounding().bit(0, 1));
    EXPECT_FALSE(out.rounding().bit(0, 2));
    EXPECT_FALSE(out.rounding().bit(1, 1));
    EXPECT_TRUE(out.rounding().bit(1, 2));
    EXPECT_TRUE(audit_outcome(inst, out).ok());
}

TEST(Cumulative, StagedRunMatchesFullRun) {
    const auto inst = three_step_example();
    CumulativeRounder r(inst);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto run = r.start(seed);
        EXPECT_THROW(run.bit(0, 2), std::logic_error);
        run.settle(1);
        const bool first = run.bit(0, 1);
        const auto saved = nlohmann::json::parse(run.save().dump());
        auto resumed = r.resume(saved);
        resumed.settle(2);
        const auto done = resumed.finish();
        const auto full = r.round(seed);
        EXPECT_EQ(first, full.rounding().bit(0, 1));
        for (std::size_t t = 1; t <= 3; ++t)
            for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(done.rounding().bit(e, t), full.rounding().bit(e, t));
    }
}

TEST(CumulativeProperties, RandomInstances) {
    std::mt19937_64 g(41);
    for (int k = 0; k < 300; ++k) {
        const auto T = static_cast<std::size_t>(apportion::testing::uniform(g, 1, 8));
        const auto inst = random_instance(g, 5, T, 12);
        CumulativeRounder r(inst);
        for (int s = 0; s < 5; ++s) {
            const auto out = r.round(g());
            const auto report = audit_outcome(inst, out);
            ASSERT_TRUE(report.ok()) << report.violations[0];
            const auto& x = out.rounding();
            for (std::size_t v = 0; v < inst.graph().node_count(); ++v) {
                Rational cum;
                std::int64_t got = 0;
                for (std::size_t t = 1; t <= T; ++t) {
                    cum += inst.fractional_degree(v, t);
                    got += x.degree(inst.graph(), v, t);
                    if (cum.is_integer()) {
                        EXPECT_EQ(got, cum.num());
                    }
                }
            }
        }
    }
}

TEST(CumulativeProperties, SingleStepMatchesDependentRoundingGuarantees) {
    const auto inst = layer(three_step_example(), 1);
    CumulativeRounder r(inst);
    std::vector<int> ups(3, 0);
    const int runs = 20000;
    for (int s = 0; s < runs; ++s) {
        r.run(static_cast<std::uint64_t>(s));
        for (std::size_t e = 0; e < 3; ++e) ups[e] += r.bit(e, 1);
    }
    for (std::size_t e = 0; e < 3; ++e) {
        const double w = inst.weight(e, 1).to_double();
        EXPECT_NEAR(static_cast<double>(ups[e]) / runs, w, 4 * std::sqrt(w * (1 - w) / runs));
    }
}
