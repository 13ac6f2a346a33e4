#include "apportion/applications.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "apportion/cumulative_rounding.hpp"
#include "apportion/io.hpp"

namespace apportion {
namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

const nlohmann::json& field(const nlohmann::json& obj, const char* name) {
    if (!obj.is_object() || !obj.contains(name)) throw InputError(std::string("missing field \"") + name + "\"");
    return obj.at(name);
}

}  // namespace

std::vector<Rational> SortitionConfig::selection_probabilities(std::size_t t) const {
    const auto& w = round_weights.empty() ? weights : round_weights.at(t - 1);
    Rational total;
    for (const Rational& x : w) total += x;
    std::vector<Rational> out;
    out.reserve(w.size());
    for (const Rational& x : w) out.push_back(Rational(seats) * x / total);
    return out;
}

void SortitionConfig::validate() const {
    if (names.size() != weights.size()) throw std::invalid_argument("one weight per member is required");
    if (rounds < 1) throw std::invalid_argument("at least one round is required");
    if (seats < 1) throw std::invalid_argument("the commission needs at least one seat");
    if (!round_weights.empty() && round_weights.size() != rounds)
        throw std::invalid_argument("per-round weights must list every round");
    for (const auto& row : round_weights)
        if (row.size() != names.size()) throw std::invalid_argument("per-round weights must list every member");
    if (static_cast<std::size_t>(seats) > names.size())
        throw InfeasibleConfig("more seats than members", {"add members or reduce the number of seats"});
    for (std::size_t t = 1; t <= (round_weights.empty() ? 1 : rounds); ++t) {
        const auto& w = round_weights.empty() ? weights : round_weights[t - 1];
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] <= Rational(0)) throw std::invalid_argument("weight of " + names[i] + " must be positive");
        const auto probs = selection_probabilities(t);
        for (std::size_t i = 0; i < probs.size(); ++i)
            if (probs[i] > Rational(1))
                throw InfeasibleConfig(
                    "member " + names[i] + " would need selection probability " + probs[i].to_string() +
                        (round_weights.empty() ? "" : " in round " + std::to_string(t)),
                    {"split " + names[i] + " into several members sharing its weight",
                     "lower " + names[i] + "'s weight so that seats * weight / total weight is at most 1",
                     "raise the number of seats"});
    }
}

SortitionResult run_sortition(const SortitionConfig& config, std::uint64_t seed) {
    config.validate();
    const std::size_t n = config.names.size();
    const std::size_t T = config.rounds;
    std::vector<BipartiteGraph::Edge> edges;
    std::vector<std::vector<Rational>> weights(n);
    SortitionAudit audit;
    audit.min_probability = Rational(1);
    for (std::size_t i = 0; i < n; ++i) edges.push_back({0, i});
    for (std::size_t t = 1; t <= T; ++t) {
        const auto probs = config.selection_probabilities(t);
        for (std::size_t i = 0; i < n; ++i) {
            weights[i].push_back(probs[i]);
            audit.min_probability = std::min(audit.min_probability, probs[i]);
        }
    }
    const WeightedBipartiteInstance instance(BipartiteGraph({"commission"}, config.names, std::move(edges)), T,
                                             std::move(weights));
    const CumulativeOutcome outcome = cumulative_round(instance, seed);
    const RoundingOutcome& x = outcome.rounding();

    SortitionResult result;
    result.selected.resize(T);
    for (std::size_t t = 1; t <= T; ++t) {
        for (std::size_t i = 0; i < n; ++i)
            if (x.bit(i, t)) result.selected[t - 1].push_back(i);
        if (static_cast<std::int64_t>(result.selected[t - 1].size()) != config.seats)
            audit.violations.push_back("round " + std::to_string(t) + " selected " +
                                       std::to_string(result.selected[t - 1].size()) + " members");
    }
    for (const auto& v : audit_degrees(instance, x).violations) audit.violations.push_back(v);

    audit.window = (Rational(2) / audit.min_probability).ceil();
    audit.longest_absence.assign(n, 0);
    audit.selections.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t run = 0;
        for (std::size_t t = 1; t <= T; ++t) {
            if (x.bit(i, t)) {
                ++audit.selections[i];
                run = 0;
            } else {
                audit.longest_absence[i] = std::max(audit.longest_absence[i], ++run);
            }
        }
        // Every window of `window` consecutive rounds must select each member.
        if (audit.longest_absence[i] >= audit.window)
            audit.violations.push_back("member " + config.names[i] + " went " +
                                       std::to_string(audit.longest_absence[i]) + " rounds unselected; window is " +
                                       std::to_string(audit.window));
    }
    result.audit = std::move(audit);
    return result;
}

void AssignmentConfig::validate() const {
    if (semesters < 1) throw std::invalid_argument("at least one semester is required");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<Rational> course_load(courses.size());
    for (const auto& e : entries) {
        if (e.faculty >= faculty.size() || e.course >= courses.size())
            throw std::invalid_argument("assignment entry refers to an unknown faculty member or course");
        if (!seen.emplace(e.faculty, e.course).second)
            throw std::invalid_argument("duplicate weight for " + faculty[e.faculty] + " and " + courses[e.course]);
        if (e.weight < Rational(0) || e.weight > Rational(1))
            throw std::invalid_argument("weight out of range for " + faculty[e.faculty] + " and " + courses[e.course]);
        course_load[e.course] += e.weight;
    }
    for (std::size_t c = 0; c < courses.size(); ++c)
        if (course_load[c] > Rational(1))
            throw InfeasibleConfig("course " + courses[c] + " has total weight " + course_load[c].to_string(),
                                   {"scale down the weights of " + courses[c] + " so they sum to at most 1",
                                    "offer " + courses[c] + " as several sections"});
}

AssignmentResult run_assignment(const AssignmentConfig& config, std::uint64_t seed) {
    config.validate();
    std::vector<BipartiteGraph::Edge> edges;
    std::vector<std::vector<Rational>> weights;
    for (const auto& e : config.entries) {
        edges.push_back({e.faculty, e.course});
        weights.emplace_back(config.semesters, e.weight);
    }
    const WeightedBipartiteInstance instance(BipartiteGraph(config.faculty, config.courses, std::move(edges)),
                                             config.semesters, std::move(weights));
    const CumulativeOutcome outcome = cumulative_round(instance, seed);
    const RoundingOutcome& x = outcome.rounding();
    const BipartiteGraph& g = instance.graph();

    AssignmentResult result;
    result.taught.resize(config.semesters);
    for (std::size_t t = 1; t <= config.semesters; ++t) {
        for (std::size_t k = 0; k < config.entries.size(); ++k)
            if (x.bit(k, t)) result.taught[t - 1].emplace_back(config.entries[k].faculty, config.entries[k].course);
        for (std::size_t c = 0; c < config.courses.size(); ++c)
            if (x.degree(g, g.b_node(c), t) > 1)
                result.violations.push_back("course " + config.courses[c] + " taught twice in semester " +
                                            std::to_string(t));
    }
    for (const auto& v : audit_outcome(instance, outcome).violations) result.violations.push_back(v);
    return result;
}

SortitionConfig sortition_config_from_json(const nlohmann::json& doc, std::size_t rounds) {
    SortitionConfig config;
    config.rounds = rounds;
    std::set<std::string> seen;
    const auto& members = field(doc, "members");
    if (!members.is_array()) throw InputError("\"members\" must be a list");
    for (const auto& m : members) {
        const auto& name = field(m, "name");
        if (!name.is_string()) throw InputError("member names must be strings");
        if (!seen.insert(name.get<std::string>()).second)
            throw InputError("duplicate member '" + name.get<std::string>() + "'");
        config.names.push_back(name.get<std::string>());
        config.weights.push_back(rational_from_json(field(m, "weight")));
    }
    const auto& seats = field(doc, "seats");
    if (!seats.is_number_integer()) throw InputError("\"seats\" must be an integer");
    config.seats = seats.get<std::int64_t>();
    if (doc.contains("round_weights")) {
        for (const auto& row : doc.at("round_weights")) {
            std::vector<Rational> r;
            for (const auto& w : row) r.push_back(rational_from_json(w));
            config.round_weights.push_back(std::move(r));
        }
    }
    return config;
}

AssignmentConfig assignment_config_from_json(const nlohmann::json& doc, std::size_t semesters) {
    AssignmentConfig config;
    config.semesters = semesters;
    std::map<std::string, std::size_t> faculty;
    std::map<std::string, std::size_t> courses;
    for (const auto& f : field(doc, "faculty")) {
        if (!faculty.emplace(f.get<std::string>(), config.faculty.size()).second)
            throw InputError("duplicate faculty member " + f.dump());
        config.faculty.push_back(f.get<std::string>());
    }
    for (const auto& c : field(doc, "courses")) {
        if (!courses.emplace(c.get<std::string>(), config.courses.size()).second)
            throw InputError("duplicate course " + c.dump());
        config.courses.push_back(c.get<std::string>());
    }
    for (const auto& e : field(doc, "weights")) {
        const std::string f = field(e, "faculty").get<std::string>();
        const std::string c = field(e, "course").get<std::string>();
        if (!faculty.count(f)) throw InputError("unknown faculty member '" + f + "'");
        if (!courses.count(c)) throw InputError("unknown course '" + c + "'");
        config.entries.push_back({faculty[f], courses[c], rational_from_json(field(e, "weight"))});
    }
    return config;
}

void write_sortition_csv(std::ostream& out, const SortitionConfig& config, const SortitionResult& result) {
    out << "round";
    for (std::int64_t s = 1; s <= config.seats; ++s) out << ",seat" << s;
    out << '\n';
    for (std::size_t t = 0; t < result.selected.size(); ++t) {
        out << t + 1;
        for (std::size_t i : result.selected[t]) out << ',' << csv_field(config.names[i]);
        out << '\n';
    }
}

void write_assignment_csv(std::ostream& out, const AssignmentConfig& config, const AssignmentResult& result) {
    out << "semester,faculty,course\n";
    for (std::size_t t = 0; t < result.taught.size(); ++t)
        for (const auto& [f, c] : result.taught[t])
            out << t + 1 << ',' << csv_field(config.faculty[f]) << ',' << csv_field(config.courses[c]) << '\n';
}

nlohmann::ordered_json to_json(const SortitionConfig& config, const SortitionAudit& audit) {
    nlohmann::ordered_json doc;
    doc["rounds"] = config.rounds;
    doc["seats"] = config.seats;
    doc["min_probability"] = audit.min_probability.to_string();
    doc["window"] = audit.window;
    auto members = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < config.names.size(); ++i) {
        nlohmann::ordered_json m;
        m["name"] = config.names[i];
        m["selections"] = audit.selections[i];
        m["longest_absence"] = audit.longest_absence[i];
        members.push_back(std::move(m));
    }
    doc["members"] = std::move(members);
    doc["violations"] = audit.violations;
    doc["ok"] = audit.ok();
    return doc;
}

nlohmann::ordered_json to_json(const AssignmentConfig& config, const AssignmentResult& result) {
    nlohmann::ordered_json doc;
    doc["semesters"] = config.semesters;
    auto loads = nlohmann::ordered_json::object();
    for (std::size_t f = 0; f < config.faculty.size(); ++f) {
        std::vector<std::int64_t> per;
        for (const auto& sem : result.taught)
            per.push_back(std::count_if(sem.begin(), sem.end(), [&](const auto& p) { return p.first == f; }));
        loads[config.faculty[f]] = per;
    }
    doc["faculty_loads"] = std::move(loads);
    doc["violations"] = result.violations;
    doc["ok"] = result.ok();
    return doc;
}

}  // namespace apportion
