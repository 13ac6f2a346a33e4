#include "apportion/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>

namespace apportion {

Rational rational_from_json(const nlohmann::json& value) {
    try {
        if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
        if (value.is_string()) return Rational::parse(value.get<std::string>());
        if (value.is_number_float()) {
            // Shortest round-trip text recovers the decimal as written.
            char buf[64];
            const double x = value.get<double>();
            const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
            if (res.ec != std::errc()) throw InputError("bad number " + value.dump());
            return Rational::parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
        }
    } catch (const std::exception& e) {
        throw InputError("bad number " + value.dump() + ": " + e.what());
    }
    throw InputError("expected a rational as a number or string, got " + value.dump());
}

namespace {

std::string node_key(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    throw InputError("node ids must be strings or integers, got " + v.dump());
}

const nlohmann::json& field(const nlohmann::json& obj, const char* name) {
    if (!obj.is_object() || !obj.contains(name)) throw InputError(std::string("missing field \"") + name + "\"");
    return obj.at(name);
}

}  // namespace

WeightedBipartiteInstance instance_from_json(const nlohmann::json& doc) {
    std::vector<std::string> a_nodes;
    std::vector<std::string> b_nodes;
    std::map<std::string, std::size_t> a_index;
    std::map<std::string, std::size_t> b_index;
    for (const auto& v : field(doc, "a_nodes")) {
        a_index.emplace(node_key(v), a_nodes.size());
        a_nodes.push_back(node_key(v));
    }
    for (const auto& v : field(doc, "b_nodes")) {
        b_index.emplace(node_key(v), b_nodes.size());
        b_nodes.push_back(node_key(v));
    }
    if (a_index.size() != a_nodes.size() || b_index.size() != b_nodes.size()) throw InputError("duplicate node id");
    for (const auto& [name, _] : a_index)
        if (b_index.count(name)) throw InputError("node '" + name + "' appears on both sides");

    const auto& steps_field = field(doc, "T");
    if (!steps_field.is_number_integer() || steps_field.get<std::int64_t>() < 1)
        throw InputError("\"T\" must be a positive integer");
    const auto steps = static_cast<std::size_t>(steps_field.get<std::int64_t>());

    std::vector<BipartiteGraph::Edge> edges;
    std::vector<std::vector<Rational>> weights;
    for (const auto& e : field(doc, "edges")) {
        const std::string a = node_key(field(e, "a"));
        const std::string b = node_key(field(e, "b"));
        auto ia = a_index.find(a);
        auto ib = b_index.find(b);
        if (ia == a_index.end()) throw InputError("edge endpoint '" + a + "' is not an A node");
        if (ib == b_index.end()) throw InputError("edge endpoint '" + b + "' is not a B node");
        edges.push_back({ia->second, ib->second});
        std::vector<Rational> ws;
        const auto& wj = field(e, "weights");
        if (!wj.is_array()) throw InputError("weights of edge {" + a + ", " + b + "} must be a list");
        for (const auto& w : wj) {
            try {
                ws.push_back(rational_from_json(w));
            } catch (const InputError& err) {
                throw InputError("edge {" + a + ", " + b + "}: " + err.what());
            }
        }
        weights.push_back(std::move(ws));
    }
    return WeightedBipartiteInstance(BipartiteGraph(std::move(a_nodes), std::move(b_nodes), std::move(edges)), steps,
                                     std::move(weights));
}

nlohmann::ordered_json instance_to_json(const WeightedBipartiteInstance& instance) {
    const BipartiteGraph& g = instance.graph();
    nlohmann::ordered_json doc;
    doc["a_nodes"] = g.a_nodes();
    doc["b_nodes"] = g.b_nodes();
    doc["T"] = instance.steps();
    auto edges = nlohmann::ordered_json::array();
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        nlohmann::ordered_json edge;
        edge["a"] = g.a_nodes()[g.edges()[e].a];
        edge["b"] = g.b_nodes()[g.edges()[e].b];
        auto ws = nlohmann::ordered_json::array();
        for (const Rational& w : instance.edge_weights(e)) ws.push_back(w.to_string());
        edge["weights"] = std::move(ws);
        edges.push_back(std::move(edge));
    }
    doc["edges"] = std::move(edges);
    return doc;
}

NamedProfile profile_from_json(const nlohmann::json& doc) {
    std::vector<std::string> names;
    std::vector<std::int64_t> populations;
    std::set<std::string> seen;
    const auto& states = field(doc, "states");
    if (!states.is_array()) throw InputError("\"states\" must be a list");
    for (const auto& s : states) {
        const auto& name = field(s, "name");
        const auto& pop = field(s, "population");
        if (!name.is_string()) throw InputError("state names must be strings");
        if (!pop.is_number_integer() || pop.get<std::int64_t>() < 1)
            throw InputError("population of '" + name.get<std::string>() + "' must be a positive integer");
        if (!seen.insert(name.get<std::string>()).second)
            throw InputError("duplicate state name '" + name.get<std::string>() + "'");
        names.push_back(name.get<std::string>());
        populations.push_back(pop.get<std::int64_t>());
    }
    if (names.size() < 2) throw InputError("a profile needs at least two states");
    return {std::move(names), PopulationProfile(std::move(populations))};
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

}  // namespace apportion
