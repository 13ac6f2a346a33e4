#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "apportion/applications.hpp"
#include "apportion/cumulative_rounding.hpp"
#include "apportion/io.hpp"
#include "apportion/methods.hpp"
#include "apportion/verify_lab.hpp"

using namespace apportion;
using nlohmann::ordered_json;

namespace {

constexpr int exit_failed = 1;
constexpr int exit_malformed = 2;
constexpr int exit_infeasible = 3;

void emit(const ordered_json& doc) { std::cout << doc.dump(2) << '\n'; }

std::uint64_t seed_or_default(const std::optional<std::uint64_t>& seed, const std::string& what) {
    if (seed) return *seed;
    std::cerr << "notice: no --seed given for " << what << ", using seed 0\n";
    return 0;
}

struct ApportionArgs {
    std::string method;
    std::string profile;
    std::int64_t house = 0;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> hmax;
};

int cmd_apportion(const ApportionArgs& args) {
    const NamedProfile named = profile_from_json(read_json_file(args.profile));
    const PopulationProfile& p = named.profile;
    if (args.house < 1) throw InputError("--house must be positive");
    const bool seeded = args.method == "grimmett" || args.method == "poisson" || args.method == "cumulative";
    if (!seeded && args.seed) std::cerr << "warning: " << args.method << " is deterministic; --seed is ignored\n";
    if (args.hmax && args.method != "cumulative") std::cerr << "warning: --hmax applies only to the cumulative method\n";

    std::optional<std::uint64_t> seed;
    if (seeded) seed = seed_or_default(args.seed, args.method);
    std::optional<Apportionment> a;
    if (args.method == "hamilton") {
        a = hamilton(p, args.house);
    } else if (args.method == "huntington-hill") {
        a = divisor(p, args.house, huntington_hill());
    } else if (args.method == "grimmett") {
        a = grimmett(p, args.house, *seed);
    } else if (args.method == "poisson") {
        a = poisson_method(p, args.house, *seed);
    } else {
        if (args.hmax && args.house > *args.hmax)
            throw InfeasibleConfig("house " + std::to_string(args.house) + " exceeds --hmax " + std::to_string(*args.hmax),
                                   {"raise --hmax to at least the house size", "drop --hmax to cover every house size"});
        HouseMonotoneMethod method(*seed, args.hmax);
        a = method.apportion(p, args.house);
    }

    ordered_json doc;
    doc["method"] = args.method;
    doc["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    doc["house"] = args.house;
    ordered_json seats = ordered_json::object();
    ordered_json quotas = ordered_json::object();
    const StandardQuota q = standard_quota(p, args.house);
    for (std::size_t i = 0; i < p.size(); ++i) {
        seats[named.names[i]] = (*a)[i];
        quotas[named.names[i]] = q[i].to_string();
    }
    doc["seats"] = std::move(seats);
    doc["quotas"] = std::move(quotas);
    emit(doc);
    return 0;
}

struct RoundArgs {
    std::string instance;
    std::optional<std::uint64_t> seed;
    bool audit = false;
    std::string layered_out;
};

int cmd_round(const RoundArgs& args) {
    const WeightedBipartiteInstance instance = instance_from_json(read_json_file(args.instance));
    try {
        instance.validate();
    } catch (const InvalidInstance& e) {
        throw InputError(args.instance + ": " + e.what());
    }
    const std::uint64_t seed = seed_or_default(args.seed, "round");
    CumulativeRounder rounder(instance);
    const CumulativeOutcome outcome = rounder.round(seed);
    const RoundingOutcome& x = outcome.rounding();
    const BipartiteGraph& g = instance.graph();

    ordered_json doc;
    doc["seed"] = seed;
    doc["T"] = instance.steps();
    ordered_json edges = ordered_json::array();
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        ordered_json row;
        row["a"] = g.a_nodes()[g.edges()[e].a];
        row["b"] = g.b_nodes()[g.edges()[e].b];
        std::vector<int> bits;
        for (std::size_t t = 1; t <= instance.steps(); ++t) bits.push_back(x.bit(e, t) ? 1 : 0);
        row["bits"] = bits;
        edges.push_back(std::move(row));
    }
    doc["edges"] = std::move(edges);
    ordered_json degrees = ordered_json::object();
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        ordered_json row;
        std::vector<std::string> fractional;
        std::vector<std::int64_t> rounded;
        for (std::size_t t = 1; t <= instance.steps(); ++t) {
            fractional.push_back(instance.fractional_degree(v, t).to_string());
            rounded.push_back(x.degree(g, v, t));
        }
        row["fractional"] = fractional;
        row["rounded"] = rounded;
        degrees[g.node_name(v)] = std::move(row);
    }
    doc["degrees"] = std::move(degrees);
    if (args.audit) {
        const AuditReport report = audit_outcome(instance, outcome);
        doc["audit"] = {{"violations", report.violations}, {"ok", report.ok()}};
    }
    if (!args.layered_out.empty()) {
        std::ofstream out(args.layered_out);
        if (!out) throw InputError("cannot write " + args.layered_out);
        out << layered_graph_json(rounder.layered()).dump(2) << '\n';
    }
    emit(doc);
    return args.audit && !doc["audit"]["ok"].get<bool>() ? exit_failed : 0;
}

struct VerifyArgs {
    std::string suite;
    std::optional<std::uint64_t> seed;
    std::size_t samples = 100000;
};

struct Check {
    std::string name;
    bool ok;
    ordered_json detail;
};

std::vector<Check> suite_pitfalls() {
    std::vector<Check> checks;
    const bool toxic = is_toxic(PopulationProfile({1, 2, 1, 2}), 2, Apportionment({1, 0, 1, 0}));
    checks.push_back({"example1_toxic", toxic, {{"profile", {1, 2, 1, 2}}, {"house", 2}, {"allocation", {1, 0, 1, 0}},
                                                {"toxic", toxic}}});
    const PitfallCertificate cert = verify_pitfall_example2();
    checks.push_back({"example2", cert.ok(), to_json(cert)});
    return checks;
}

std::vector<Check> suite_bijection() {
    std::vector<Check> checks;
    std::function<void(std::vector<std::int64_t>&, std::int64_t)> sweep = [&](std::vector<std::int64_t>& p,
                                                                             std::int64_t left) {
        if (p.size() >= 2) {
            const BijectionCertificate cert = verify_bijection(PopulationProfile(p));
            std::string name = "bijection";
            for (std::int64_t x : p) name += "_" + std::to_string(x);
            checks.push_back({name, cert.ok(), to_json(cert)});
        }
        if (p.size() == 3) return;
        for (std::int64_t x = 1; x <= left; ++x) {
            p.push_back(x);
            sweep(p, left - x);
            p.pop_back();
        }
    };
    std::vector<std::int64_t> p;
    sweep(p, 8);
    return checks;
}

std::vector<Check> suite_stats(std::uint64_t seed, std::size_t samples) {
    std::vector<Check> checks;
    auto add = [&](const std::string& name, const StatReport& r) { checks.push_back({name, r.ok(), to_json(r)}); };

    const PopulationProfile pair({1, 1});
    add("grimmett_exante_1_1_h1",
        stat_exante([&](std::uint64_t s) { return grimmett(pair, 1, s); }, pair, 1, samples, derive_seed(seed, 1)));
    const PopulationProfile four({1, 2, 1, 2});
    add("poisson_exante_1_2_1_2_h3",
        stat_exante([&](std::uint64_t s) { return poisson_method(four, 3, s); }, four, 3, samples, derive_seed(seed, 2)));
    const PopulationProfile five({45, 25, 15, 15});
    SeatSequenceSampler sampler(five);
    std::vector<std::size_t> seq;
    add("cumulative_exante_45_25_15_15_h3", stat_exante(
                                                [&](std::uint64_t s) {
                                                    sampler.sample_into(s, seq);
                                                    return seat_sequence_prefix_allocation(
                                                        SeatSequence(seq, five.size()), 3);
                                                },
                                                five, 3, samples, derive_seed(seed, 3)));

    const WeightedBipartiteInstance example = three_step_example();
    CumulativeRounder rounder(example);
    std::vector<Rational> targets;
    for (std::size_t t = 1; t <= example.steps(); ++t)
        for (std::size_t e = 0; e < example.graph().edge_count(); ++e) targets.push_back(example.weight(e, t));
    add("cumulative_marginals_three_step", stat_marginals(
                                               [&](std::uint64_t s, std::vector<std::uint8_t>& bits) {
                                                   rounder.run(s);
                                                   std::size_t k = 0;
                                                   for (std::size_t t = 1; t <= example.steps(); ++t)
                                                       for (std::size_t e = 0; e < example.graph().edge_count(); ++e)
                                                           bits[k++] = rounder.bit(e, t);
                                               },
                                               targets, samples, derive_seed(seed, 4)));

    std::vector<Rational> last;
    for (std::size_t e = 0; e < example.graph().edge_count(); ++e) last.push_back(example.weight(e, 3));
    add("negative_correlation_three_step_layer3",
        stat_negcorr(WeightedBipartiteInstance::single(example.graph(), last), samples, derive_seed(seed, 5)));
    return checks;
}

int cmd_verify(const VerifyArgs& args) {
    std::vector<Check> checks;
    std::optional<std::uint64_t> used_seed;
    if (args.suite == "theorem1") {
        const Theorem1Certificate cert = verify_theorem1();
        checks.push_back({"theorem1", cert.ok(), to_json(cert)});
    } else if (args.suite == "pitfalls") {
        checks = suite_pitfalls();
    } else if (args.suite == "bijection") {
        checks = suite_bijection();
    } else {
        if (args.samples < 1000) throw InputError("--samples must be at least 1000");
        used_seed = seed_or_default(args.seed, "stats");
        checks = suite_stats(*used_seed, args.samples);
    }
    ordered_json doc;
    doc["suite"] = args.suite;
    if (used_seed) {
        doc["seed"] = *used_seed;
        doc["samples"] = args.samples;
    }
    ordered_json results = ordered_json::array();
    std::optional<std::string> first_failure;
    for (auto& c : checks) {
        if (!c.ok && !first_failure) first_failure = c.name;
        results.push_back({{"check", c.name}, {"ok", c.ok}, {"detail", std::move(c.detail)}});
    }
    doc["checks"] = std::move(results);
    doc["ok"] = !first_failure.has_value();
    emit(doc);
    if (first_failure) {
        std::cerr << "check failed: " << *first_failure << '\n';
        return exit_failed;
    }
    return 0;
}

struct SimulateArgs {
    std::string app;
    std::string config;
    std::size_t rounds = 0;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_simulate(const SimulateArgs& args) {
    const nlohmann::json doc = read_json_file(args.config);
    const std::uint64_t seed = seed_or_default(args.seed, args.app);
    if (args.rounds < 1) throw InputError("--rounds must be positive");
    std::ofstream csv;
    if (!args.out.empty()) {
        csv.open(args.out, std::ios::binary);
        if (!csv) throw InputError("cannot write " + args.out);
    }
    ordered_json audit;
    bool ok = false;
    try {
        if (args.app == "sortition") {
            const SortitionConfig config = sortition_config_from_json(doc, args.rounds);
            const SortitionResult result = run_sortition(config, seed);
            if (csv.is_open()) write_sortition_csv(csv, config, result);
            audit = to_json(config, result.audit);
            ok = result.audit.ok();
        } else {
            const AssignmentConfig config = assignment_config_from_json(doc, args.rounds);
            const AssignmentResult result = run_assignment(config, seed);
            if (csv.is_open()) write_assignment_csv(csv, config, result);
            audit = to_json(config, result);
            ok = result.ok();
        }
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    ordered_json out;
    out["app"] = args.app;
    out["seed"] = seed;
    out["audit"] = std::move(audit);
    emit(out);
    return ok ? 0 : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized apportionment and cumulative dependent rounding"};
    app.require_subcommand(1);

    ApportionArgs ap;
    auto* c_apportion = app.add_subcommand("apportion", "Apportion seats for a profile");
    c_apportion->add_option("--method", ap.method, "Apportionment method")
        ->required()
        ->check(CLI::IsMember({"hamilton", "huntington-hill", "grimmett", "poisson", "cumulative"}));
    c_apportion->add_option("--profile", ap.profile, "Profile JSON file")->required();
    c_apportion->add_option("--house", ap.house, "House size")->required();
    c_apportion->add_option("--seed", ap.seed, "Seed (decimal 64-bit)");
    c_apportion->add_option("--hmax", ap.hmax, "Largest house size served by the cumulative method");

    RoundArgs rd;
    auto* c_round = app.add_subcommand("round", "Cumulative dependent rounding of an instance");
    c_round->add_option("--instance", rd.instance, "Instance JSON file")->required();
    c_round->add_option("--seed", rd.seed, "Seed");
    c_round->add_flag("--audit", rd.audit, "Audit the outcome");
    c_round->add_option("--layered", rd.layered_out, "Write the layered graph as JSON");

    VerifyArgs vf;
    auto* c_verify = app.add_subcommand("verify", "Run a verification suite");
    c_verify->add_option("--suite", vf.suite, "Suite")
        ->required()
        ->check(CLI::IsMember({"theorem1", "pitfalls", "bijection", "stats"}));
    c_verify->add_option("--seed", vf.seed, "Seed for the stats suite");
    c_verify->add_option("--samples", vf.samples, "Samples for the stats suite");

    SimulateArgs sm;
    auto* c_simulate = app.add_subcommand("simulate", "Simulate repeated sortition or assignment");
    c_simulate->add_option("--app", sm.app, "Application")->required()->check(CLI::IsMember({"sortition", "assignment"}));
    c_simulate->add_option("--config", sm.config, "Configuration JSON file")->required();
    c_simulate->add_option("--rounds", sm.rounds, "Rounds or semesters")->required();
    c_simulate->add_option("--seed", sm.seed, "Seed");
    c_simulate->add_option("--out", sm.out, "CSV output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_malformed;
    }

    try {
        if (c_apportion->parsed()) return cmd_apportion(ap);
        if (c_round->parsed()) return cmd_round(rd);
        if (c_verify->parsed()) return cmd_verify(vf);
        return cmd_simulate(sm);
    } catch (const InfeasibleConfig& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        for (const auto& hint : e.hints()) std::cerr << "  hint: " << hint << '\n';
        return exit_infeasible;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_malformed;
    } catch (const InvalidInstance& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_malformed;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << '\n';
        return exit_malformed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_malformed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed;
    }
}
