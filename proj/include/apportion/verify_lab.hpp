#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "apportion/bipartite.hpp"
#include "apportion/core_model.hpp"
#include "apportion/rational.hpp"

namespace apportion {

/// Every apportionment of `house` seats satisfying quota for `profile`.
struct QuotaAllocationSet {
    PopulationProfile profile;
    std::int64_t house;
    std::vector<Apportionment> allocations;  // lexicographically descending
};

/// Enumerates the 2^n floor/ceiling choices. Throws std::length_error for
/// more than 20 states.
QuotaAllocationSet enumerate_quota_allocations(const PopulationProfile& profile, std::int64_t house);

/// One allocation on the first profile and the evidence against it.
struct Theorem1Case {
    Apportionment allocation;
    std::string against;  // "pB" or "pC", empty when no certificate was found
    /// relabel[i] is the state of the comparison profile playing state i.
    std::vector<std::size_t> relabel;
    struct Witness {
        Apportionment other;
        std::size_t gainer_population_state;  // i: weakly grew, lost seats
        std::size_t loser_population_state;   // j: weakly shrank, gained seats
        bool reversed;                        // paradox found going from the other profile back
    };
    std::vector<Witness> witnesses;
};

struct Theorem1Certificate {
    std::vector<std::int64_t> p_a, p_b, p_c;
    std::int64_t house = 10;
    std::vector<Theorem1Case> cases;
    bool ok() const;
};

/// No deterministic solution is population monotone and satisfies quota:
/// every quota allocation on (824,44,44,44,44) has a population paradox
/// against all quota allocations on (824,44,44,44,222) or on all of
/// (824,1,1,44,44), after relabeling states 2..5.
Theorem1Certificate verify_theorem1();

/// Allocations a' = a + e_i at house h+1 that satisfy quota.
std::vector<Apportionment> quota_successors(const PopulationProfile& profile, const Apportionment& a);

/// True iff no quota seat sequence passes through `a`. Throws
/// std::invalid_argument if `a` violates quota or its house exceeds P.
bool is_toxic(const PopulationProfile& profile, std::int64_t house, const Apportionment& a);

struct FlowEdge {
    Apportionment from;
    Apportionment to;
    Rational amount;
};

struct PitfallCertificate {
    std::vector<std::int64_t> populations;
    std::vector<std::pair<Apportionment, Rational>> distribution;  // at h = 3
    std::vector<std::vector<Apportionment>> successors;            // quota successors at h = 4
    std::vector<bool> toxic;
    Rational max_expected_first;  // max E[F_1(p, 4)]
    Rational first_quota;         // q_1 at h = 4
    std::vector<std::string> flow_failures;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Flow network for the (45,25,15,15) profile: ingress at h = 1, one layer per house size, egress at h = 3.
struct FlowNetwork {
    std::vector<std::pair<Apportionment, Rational>> ingress;
    std::vector<FlowEdge> edges;
    std::vector<std::pair<Apportionment, Rational>> egress;
};
FlowNetwork example2_flow_network();

/// Checks conservation, unit total flow, monotone quota steps, quota at
/// every node and ex ante proportionality per layer. Returns failures.
std::vector<std::string> check_flow_network(const PopulationProfile& profile, const FlowNetwork& network);

PitfallCertificate verify_pitfall_example2();

struct BijectionCertificate {
    std::vector<std::int64_t> populations;
    std::size_t sequences = 0;
    std::size_t matchings = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty() && sequences == matchings; }
};

/// All finite quota seat sequences, depth first, in lexicographic order.
std::vector<std::vector<std::size_t>> enumerate_quota_sequences(const PopulationProfile& profile);

/// Seat sequences versus perfect b-matchings of the layered star graph.
/// Throws std::length_error when P > 10.
BijectionCertificate verify_bijection(const PopulationProfile& profile);

/// Estimates compared against targets within z standard errors.
struct StatReport {
    struct Entry {
        std::string label;
        double target = 0;
        double estimate = 0;
        double std_error = 0;
        bool pass = true;
    };
    std::size_t samples = 0;
    double z = 4.0;
    std::vector<Entry> entries;

    bool ok() const;
    /// Failing entries only.
    std::vector<Entry> failures() const;
};

inline constexpr double default_z = 4.0;

/// sampler(seed, bits) fills one 0/1 value per target. Two-sided band with
/// standard error sqrt(w(1-w)/M); targets 0 and 1 must be hit exactly.
StatReport stat_marginals(const std::function<void(std::uint64_t, std::vector<std::uint8_t>&)>& sampler,
                          const std::vector<Rational>& targets, std::size_t samples, std::uint64_t seed,
                          double z = default_z);

/// Dependent rounding of a single-step instance: for every node and every
/// set S of at most three incident edges, P[all of S up] and P[all of S
/// down] may exceed the product bound by at most z * sqrt(1/(4M)).
StatReport stat_negcorr(const WeightedBipartiteInstance& instance, std::size_t samples, std::uint64_t seed,
                        double z = default_z);

/// Mean seats of each state against its quota; the standard error is the
/// sample standard deviation over sqrt(M).
StatReport stat_exante(const std::function<Apportionment(std::uint64_t)>& method, const PopulationProfile& profile,
                       std::int64_t house, std::size_t samples, std::uint64_t seed, double z = default_z);

/// Seed of replication k.
std::uint64_t replication_seed(std::uint64_t seed, std::size_t k);

/// Exact outcome distribution of dependent rounding, by following both
/// branches of every pipage step. Verifies marginals, degree preservation
/// and negative correlation for every incident edge subset. Throws
/// std::length_error with more than `max_fractional` fractional edges.
struct ExactRoundingReport {
    std::size_t outcomes = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};
ExactRoundingReport exact_rounding_check(const WeightedBipartiteInstance& instance, std::size_t max_fractional = 12);

struct AlabamaWitness {
    std::vector<std::int64_t> populations;
    std::int64_t house;
    Apportionment before;
    Apportionment after;
};
/// First profile (p_i <= max_population, n states) and h <= max_house where
/// Hamilton's method takes a seat away as the house grows to h+1.
std::optional<AlabamaWitness> find_alabama_paradox(std::size_t states, std::int64_t max_population,
                                                   std::int64_t max_house);

struct QuotaViolationWitness {
    std::vector<std::int64_t> populations;
    std::int64_t house;
    Apportionment seats;
};
/// First profile and house where Huntington-Hill violates quota.
std::optional<QuotaViolationWitness> find_hh_quota_violation(std::size_t states, std::int64_t max_population,
                                                             std::int64_t max_house);

/// Three-step instance on A = {v1, v2}, B = {v3, v4}: edge {v1, v3} with
/// weights 1/4, 1/2, 3/4, {v1, v4} with 1/2, 1/4, 3/4, {v2, v4} with 1/2,
/// 1/2, 1/4.
WeightedBipartiteInstance three_step_example();

nlohmann::ordered_json to_json(const Apportionment& a);
nlohmann::ordered_json to_json(const Theorem1Certificate& c);
nlohmann::ordered_json to_json(const PitfallCertificate& c);
nlohmann::ordered_json to_json(const BijectionCertificate& c);
nlohmann::ordered_json to_json(const StatReport& r);

}  // namespace apportion
