#include "apportion/verify_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "apportion/cumulative_rounding.hpp"
#include "apportion/dependent_rounding.hpp"
#include "apportion/methods.hpp"

namespace apportion {
namespace {

using BigRational = boost::multiprecision::cpp_rational;

BigRational big(const Rational& r) { return BigRational(r.num(), r.den()); }

std::string show(const std::vector<std::int64_t>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

std::string show(const Apportionment& a) { return show(a.seats()); }

bool quota_at(const PopulationProfile& profile, const std::vector<std::int64_t>& seats) {
    std::int64_t h = std::accumulate(seats.begin(), seats.end(), std::int64_t{0});
    if (h == 0) return true;
    return check_quota(profile, h, Apportionment(seats, h));
}

}  // namespace

QuotaAllocationSet enumerate_quota_allocations(const PopulationProfile& profile, std::int64_t house) {
    if (profile.size() > 20) throw std::length_error("quota enumeration is limited to 20 states");
    const StandardQuota q = standard_quota(profile, house);
    std::vector<std::int64_t> base(profile.size());
    std::vector<std::size_t> fractional;
    std::int64_t floor_sum = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        base[i] = q[i].floor();
        floor_sum += base[i];
        if (!q[i].is_integer()) fractional.push_back(i);
    }
    QuotaAllocationSet out{profile, house, {}};
    for (std::uint32_t mask = 0; mask < (1u << fractional.size()); ++mask) {
        if (floor_sum + std::popcount(mask) != house) continue;
        std::vector<std::int64_t> seats = base;
        for (std::size_t k = 0; k < fractional.size(); ++k)
            if (mask >> k & 1u) ++seats[fractional[k]];
        out.allocations.emplace_back(std::move(seats), house);
    }
    std::sort(out.allocations.begin(), out.allocations.end(), std::greater<>());
    return out;
}

bool Theorem1Certificate::ok() const {
    if (cases.empty()) return false;
    for (const auto& c : cases) {
        if (c.against.empty()) return false;
        // The case split: nine seats for state 1 are refuted by pB, eight by pC.
        const std::string expected = c.allocation[0] >= 9 ? "pB" : "pC";
        if (c.against != expected) return false;
    }
    return true;
}

Theorem1Certificate verify_theorem1() {
    Theorem1Certificate cert;
    cert.p_a = {824, 44, 44, 44, 44};
    cert.p_b = {824, 44, 44, 44, 222};
    cert.p_c = {824, 1, 1, 44, 44};
    const PopulationProfile pa(cert.p_a);
    const std::vector<std::pair<std::string, const std::vector<std::int64_t>*>> targets = {{"pB", &cert.p_b},
                                                                                         {"pC", &cert.p_c}};
    for (const Apportionment& a : enumerate_quota_allocations(pa, cert.house).allocations) {
        Theorem1Case c{a, "", {}, {}};
        for (const auto& [label, target] : targets) {
            std::vector<std::size_t> relabel = {0, 1, 2, 3, 4};
            do {
                std::vector<std::int64_t> moved(5);
                for (std::size_t i = 0; i < 5; ++i) moved[i] = (*target)[relabel[i]];
                const PopulationProfile other(moved);
                std::vector<Theorem1Case::Witness> witnesses;
                for (const Apportionment& b : enumerate_quota_allocations(other, cert.house).allocations) {
                    const LabeledApportionment from{pa, cert.house, a};
                    const LabeledApportionment to{other, cert.house, b};
                    if (auto p = detect_population_paradox(from, to)) {
                        witnesses.push_back({b, p->first, p->second, false});
                    } else if (auto q = detect_population_paradox(to, from)) {
                        witnesses.push_back({b, q->first, q->second, true});
                    } else {
                        witnesses.clear();
                        break;
                    }
                }
                if (!witnesses.empty()) {
                    c.against = label;
                    c.relabel = relabel;
                    c.witnesses = std::move(witnesses);
                    break;
                }
            } while (std::next_permutation(relabel.begin() + 1, relabel.end()));
            if (!c.against.empty()) break;
        }
        cert.cases.push_back(std::move(c));
    }
    return cert;
}

std::vector<Apportionment> quota_successors(const PopulationProfile& profile, const Apportionment& a) {
    std::vector<Apportionment> out;
    std::vector<std::int64_t> seats = a.seats();
    for (std::size_t i = 0; i < seats.size(); ++i) {
        ++seats[i];
        Apportionment b(seats, a.house() + 1);
        if (check_quota(profile, a.house() + 1, b)) out.push_back(std::move(b));
        --seats[i];
    }
    return out;
}

namespace {

class ToxicitySearch {
public:
    explicit ToxicitySearch(const PopulationProfile& profile) : profile_(profile) {}

    bool from_empty(const std::vector<std::int64_t>& a) {
        const std::int64_t h = std::accumulate(a.begin(), a.end(), std::int64_t{0});
        if (h <= 1) return true;
        if (auto it = down_.find(a); it != down_.end()) return it->second;
        bool ok = false;
        std::vector<std::int64_t> b = a;
        for (std::size_t i = 0; i < b.size() && !ok; ++i) {
            if (b[i] == 0) continue;
            --b[i];
            ok = quota_at(profile_, b) && from_empty(b);
            ++b[i];
        }
        return down_[a] = ok;
    }

    bool to_full(const std::vector<std::int64_t>& a) {
        const std::int64_t h = std::accumulate(a.begin(), a.end(), std::int64_t{0});
        if (h == profile_.total())
            return std::equal(a.begin(), a.end(), profile_.populations().begin(), profile_.populations().end());
        if (auto it = up_.find(a); it != up_.end()) return it->second;
        bool ok = false;
        std::vector<std::int64_t> b = a;
        for (std::size_t i = 0; i < b.size() && !ok; ++i) {
            ++b[i];
            ok = quota_at(profile_, b) && to_full(b);
            --b[i];
        }
        return up_[a] = ok;
    }

private:
    const PopulationProfile& profile_;
    std::map<std::vector<std::int64_t>, bool> down_;
    std::map<std::vector<std::int64_t>, bool> up_;
};

}  // namespace

bool is_toxic(const PopulationProfile& profile, std::int64_t house, const Apportionment& a) {
    if (profile.size() > 20) throw std::length_error("toxicity search is limited to 20 states");
    if (house > profile.total()) throw std::invalid_argument("toxicity is decided for house sizes up to P");
    if (!check_quota(profile, house, a)) throw std::invalid_argument("allocation " + show(a) + " violates quota");
    // A quota sequence of length P extends to all houses by repetition, so
    // the horizon P suffices.
    ToxicitySearch search(profile);
    return !(search.from_empty(a.seats()) && search.to_full(a.seats()));
}

FlowNetwork example2_flow_network() {
    auto A = [](std::vector<std::int64_t> s) { return Apportionment(std::move(s)); };
    auto pct = [](std::int64_t num, std::int64_t den = 1) { return Rational(num, 100 * den); };
    const std::vector<Apportionment> l1 = {A({1, 0, 0, 0}), A({0, 1, 0, 0}), A({0, 0, 1, 0}), A({0, 0, 0, 1})};
    const std::vector<Apportionment> l2 = {A({1, 1, 0, 0}), A({1, 0, 1, 0}), A({1, 0, 0, 1}), A({0, 1, 1, 0}),
                                           A({0, 1, 0, 1})};
    const std::vector<Apportionment> l3 = {A({2, 1, 0, 0}), A({1, 1, 1, 0}), A({1, 1, 0, 1}), A({1, 0, 1, 1})};
    FlowNetwork net;
    net.ingress = {{l1[0], pct(45)}, {l1[1], pct(25)}, {l1[2], pct(15)}, {l1[3], pct(15)}};
    net.egress = {{l3[0], pct(35)}, {l3[1], pct(20)}, {l3[2], pct(20)}, {l3[3], pct(25)}};
    const Rational r125 = pct(25, 2);
    const Rational r25 = pct(5, 2);
    // (from row, to row, amount), rows 1-based as drawn.
    const std::vector<std::tuple<int, int, Rational>> first = {
        {1, 1, pct(20)}, {1, 2, r125}, {1, 3, r125}, {2, 1, pct(20)}, {2, 4, r25},
        {2, 5, r25},     {3, 2, r125}, {3, 4, r25},  {4, 3, r125},    {4, 5, r25}};
    const std::vector<std::tuple<int, int, Rational>> second = {
        {1, 1, pct(35)}, {1, 2, r25}, {1, 3, r25}, {2, 2, r125}, {2, 4, r125},
        {3, 3, r125},    {3, 4, r125}, {4, 2, pct(5)}, {5, 3, pct(5)}};
    for (const auto& [f, t, x] : first) net.edges.push_back({l1[f - 1], l2[t - 1], x});
    for (const auto& [f, t, x] : second) net.edges.push_back({l2[f - 1], l3[t - 1], x});
    return net;
}

std::vector<std::string> check_flow_network(const PopulationProfile& profile, const FlowNetwork& network) {
    std::vector<std::string> failures;
    std::map<Apportionment, Rational> in;
    std::map<Apportionment, Rational> out;
    std::map<std::int64_t, std::map<Apportionment, Rational>> layer;  // node throughput per house
    Rational total_in;
    Rational total_out;
    for (const auto& [a, x] : network.ingress) {
        in[a] += x;
        total_in += x;
    }
    for (const auto& [a, x] : network.egress) {
        out[a] += x;
        total_out += x;
    }
    for (const auto& e : network.edges) {
        out[e.from] += e.amount;
        in[e.to] += e.amount;
        if (e.amount <= Rational(0)) failures.push_back("edge " + show(e.from) + " -> " + show(e.to) + " has no capacity");
        if (e.to.house() != e.from.house() + 1 || !check_house_monotone_step(profile, e.from.house(), e.from, e.to))
            failures.push_back("edge " + show(e.from) + " -> " + show(e.to) + " is not a house-monotone step");
    }
    if (total_in != Rational(1)) failures.push_back("ingress totals " + total_in.to_string() + ", not 1");
    if (total_out != Rational(1)) failures.push_back("egress totals " + total_out.to_string() + ", not 1");
    std::set<Apportionment> nodes;
    for (const auto& [a, _] : in) nodes.insert(a);
    for (const auto& [a, _] : out) nodes.insert(a);
    for (const Apportionment& a : nodes) {
        if (in[a] != out[a])
            failures.push_back("flow not conserved at " + show(a) + ": in " + in[a].to_string() + ", out " +
                               out[a].to_string());
        if (!check_quota(profile, a.house(), a)) failures.push_back("node " + show(a) + " violates quota");
        layer[a.house()][a] = in[a];
    }
    for (const auto& [h, members] : layer) {
        const StandardQuota q = standard_quota(profile, h);
        for (std::size_t i = 0; i < profile.size(); ++i) {
            Rational mean;
            for (const auto& [a, x] : members) mean += x * Rational(a[i]);
            if (mean != q[i])
                failures.push_back("layer h=" + std::to_string(h) + ": expected seats of state " + std::to_string(i + 1) +
                                   " are " + mean.to_string() + ", quota " + q[i].to_string());
        }
    }
    return failures;
}

PitfallCertificate verify_pitfall_example2() {
    PitfallCertificate cert;
    cert.populations = {45, 25, 15, 15};
    const PopulationProfile p(cert.populations);
    cert.distribution = {{Apportionment({2, 1, 0, 0}), Rational(35, 100)},
                         {Apportionment({1, 1, 1, 0}), Rational(20, 100)},
                         {Apportionment({1, 1, 0, 1}), Rational(20, 100)},
                         {Apportionment({1, 0, 1, 1}), Rational(25, 100)}};
    Rational total;
    for (const auto& [a, x] : cert.distribution) {
        total += x;
        auto next = quota_successors(p, a);
        if (next.empty()) cert.failures.push_back(show(a) + " has no quota successor");
        std::int64_t best = -1;
        for (const auto& b : next) best = std::max(best, b[0]);
        cert.max_expected_first += x * Rational(best);
        cert.successors.push_back(std::move(next));
        const bool toxic = is_toxic(p, 3, a);
        cert.toxic.push_back(toxic);
        if (toxic) cert.failures.push_back(show(a) + " is toxic");
    }
    if (total != Rational(1)) cert.failures.push_back("distribution does not sum to 1");
    const auto& forced = cert.successors[3];
    if (forced.size() != 1 || forced[0] != Apportionment({1, 1, 1, 1}))
        cert.failures.push_back("(1,0,1,1) does not force (1,1,1,1)");
    cert.first_quota = standard_quota(p, 4)[0];
    if (cert.max_expected_first != Rational(7, 4))
        cert.failures.push_back("max E[F_1] is " + cert.max_expected_first.to_string() + ", not 7/4");
    if (!(cert.max_expected_first < cert.first_quota)) cert.failures.push_back("max E[F_1] reaches the quota");
    cert.flow_failures = check_flow_network(p, example2_flow_network());
    for (const auto& f : cert.flow_failures) cert.failures.push_back("flow network: " + f);
    return cert;
}

std::vector<std::vector<std::size_t>> enumerate_quota_sequences(const PopulationProfile& profile) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> prefix;
    std::vector<std::int64_t> seats(profile.size(), 0);
    std::function<void()> extend = [&] {
        if (static_cast<std::int64_t>(prefix.size()) == profile.total()) {
            out.push_back(prefix);
            return;
        }
        for (std::size_t i = 0; i < profile.size(); ++i) {
            ++seats[i];
            if (quota_at(profile, seats)) {
                prefix.push_back(i);
                extend();
                prefix.pop_back();
            }
            --seats[i];
        }
    };
    extend();
    return out;
}

namespace {

// Constructed-edge bits encoding a seat sequence, by the interpretation of
// each auxiliary edge.
std::vector<std::uint8_t> sequence_labeling(const LayeredGraph& lg, const std::vector<std::size_t>& sequence) {
    const BipartiteGraph& g = lg.original().graph();
    const std::size_t T = lg.steps();
    std::vector<std::uint8_t> bits(lg.constructed().graph().edge_count(), 0);
    for (std::size_t t = 1; t <= T; ++t) bits[lg.copy_edge(sequence[t - 1], t)] = 1;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        std::int64_t before = 0;
        for (std::size_t t = 1; t <= T; ++t) {
            std::int64_t D = 0;
            for (std::size_t e : g.incident(v)) D += bits[lg.copy_edge(e, t)];
            const std::int64_t through = before + D;
            bits[lg.down_edge(v, t)] = D == lg.degree(v, t).floor();
            bits[lg.up_edge(v, t)] = D == lg.degree(v, t).floor() + 1;
            bits[lg.enter_edge(v, t)] = before == lg.cumulative_degree(v, t - 1).floor() + 1;
            bits[lg.leave_edge(v, t)] = through == lg.cumulative_degree(v, t).floor();
            before = through;
        }
    }
    return bits;
}

class MatchingCounter {
public:
    MatchingCounter(const LayeredGraph& lg, std::vector<std::string>& failures) : lg_(lg), failures_(failures) {
        const auto& inst = lg.constructed();
        const BipartiteGraph& cg = inst.graph();
        need_.resize(cg.node_count());
        open_.assign(cg.node_count(), 0);
        chosen_.assign(cg.edge_count(), 0);
        for (std::size_t node = 0; node < cg.node_count(); ++node) {
            const auto target = lg.target_degree(node);
            if (!target) throw std::logic_error("node " + cg.node_name(node) + " has no integral target degree");
            need_[node] = *target;
        }
        for (std::size_t k = 0; k < cg.edge_count(); ++k) {
            const Rational& w = inst.weight(k, 1);
            if (w == Rational(0)) continue;
            if (w == Rational(1)) {
                chosen_[k] = 1;
                --need_[cg.edge_a_node(k)];
                --need_[cg.edge_b_node(k)];
                continue;
            }
            free_.push_back(k);
            ++open_[cg.edge_a_node(k)];
            ++open_[cg.edge_b_node(k)];
        }
        for (std::size_t node = 0; node < cg.node_count(); ++node)
            if (need_[node] < 0 || need_[node] > open_[node]) feasible_ = false;
    }

    void run() {
        if (feasible_) search(0);
    }

    std::size_t count() const { return count_; }
    const std::set<std::vector<std::size_t>>& sequences() const { return sequences_; }

private:
    bool fits(std::size_t node) const { return need_[node] >= 0 && need_[node] <= open_[node]; }

    void search(std::size_t k) {
        if (k == free_.size()) {
            record();
            return;
        }
        const BipartiteGraph& cg = lg_.constructed().graph();
        const std::size_t e = free_[k];
        const std::size_t x = cg.edge_a_node(e);
        const std::size_t y = cg.edge_b_node(e);
        --open_[x];
        --open_[y];
        for (int take = 1; take >= 0; --take) {
            chosen_[e] = static_cast<std::uint8_t>(take);
            need_[x] -= take;
            need_[y] -= take;
            if (fits(x) && fits(y)) search(k + 1);
            need_[x] += take;
            need_[y] += take;
        }
        chosen_[e] = 0;
        ++open_[x];
        ++open_[y];
    }

    void record() {
        ++count_;
        const std::size_t n = lg_.original().graph().edge_count();
        std::vector<std::size_t> seq;
        for (std::size_t t = 1; t <= lg_.steps(); ++t) {
            std::size_t winner = n;
            std::size_t ups = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (chosen_[lg_.copy_edge(i, t)]) {
                    winner = i;
                    ++ups;
                }
            if (ups != 1) {
                failures_.push_back("a b-matching assigns " + std::to_string(ups) + " seats at position " +
                                    std::to_string(t));
                return;
            }
            seq.push_back(winner);
        }
        if (!sequences_.insert(seq).second) failures_.push_back("two b-matchings map to the same seat sequence");
    }

    const LayeredGraph& lg_;
    std::vector<std::string>& failures_;
    std::vector<std::int64_t> need_;
    std::vector<std::int64_t> open_;
    std::vector<std::uint8_t> chosen_;
    std::vector<std::size_t> free_;
    bool feasible_ = true;
    std::size_t count_ = 0;
    std::set<std::vector<std::size_t>> sequences_;
};

}  // namespace

BijectionCertificate verify_bijection(const PopulationProfile& profile) {
    if (profile.total() > 10) throw std::length_error("bijection check is limited to total population 10");
    BijectionCertificate cert;
    cert.populations.assign(profile.populations().begin(), profile.populations().end());
    const LayeredGraph lg(star_instance(profile, profile.total()));
    const auto& inst = lg.constructed();
    const BipartiteGraph& cg = inst.graph();

    const auto sequences = enumerate_quota_sequences(profile);
    cert.sequences = sequences.size();
    for (const auto& seq : sequences) {
        const auto bits = sequence_labeling(lg, seq);
        std::string label = "sequence";
        for (std::size_t s : seq) label += " " + std::to_string(s + 1);
        for (std::size_t k = 0; k < bits.size(); ++k) {
            const Rational& w = inst.weight(k, 1);
            if ((w == Rational(0) && bits[k]) || (w == Rational(1) && !bits[k]))
                cert.failures.push_back(label + ": edge " + std::to_string(k) + " contradicts its weight");
        }
        for (std::size_t node = 0; node < cg.node_count(); ++node) {
            std::int64_t d = 0;
            for (std::size_t k : cg.incident(node)) d += bits[k];
            const auto target = lg.target_degree(node);
            if (!target || d != *target)
                cert.failures.push_back(label + ": node " + cg.node_name(node) + " misses its target degree");
        }
    }

    MatchingCounter counter(lg, cert.failures);
    counter.run();
    cert.matchings = counter.count();
    const std::set<std::vector<std::size_t>> expected(sequences.begin(), sequences.end());
    if (counter.sequences() != expected) cert.failures.push_back("b-matchings and seat sequences differ as sets");
    return cert;
}

bool StatReport::ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.pass; });
}

std::vector<StatReport::Entry> StatReport::failures() const {
    std::vector<Entry> out;
    for (const auto& e : entries)
        if (!e.pass) out.push_back(e);
    return out;
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t k) {
    return derive_seed(seed, static_cast<std::uint64_t>(k));
}

StatReport stat_marginals(const std::function<void(std::uint64_t, std::vector<std::uint8_t>&)>& sampler,
                          const std::vector<Rational>& targets, std::size_t samples, std::uint64_t seed, double z) {
    if (samples < 1000) throw std::invalid_argument("statistical checks need at least 1000 samples");
    std::vector<std::uint64_t> ones(targets.size(), 0);
    std::vector<std::uint8_t> bits;
    for (std::size_t k = 0; k < samples; ++k) {
        bits.assign(targets.size(), 0);
        sampler(replication_seed(seed, k), bits);
        if (bits.size() != targets.size()) throw std::logic_error("sampler returned the wrong number of values");
        for (std::size_t i = 0; i < targets.size(); ++i) ones[i] += bits[i];
    }
    StatReport report;
    report.samples = samples;
    report.z = z;
    const auto M = static_cast<double>(samples);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        StatReport::Entry e;
        e.label = "target " + std::to_string(i);
        e.target = targets[i].to_double();
        e.estimate = static_cast<double>(ones[i]) / M;
        e.std_error = std::sqrt(e.target * (1 - e.target) / M);
        if (targets[i] == Rational(0) || targets[i] == Rational(1))
            e.pass = e.estimate == e.target;
        else
            e.pass = std::abs(e.estimate - e.target) <= z * e.std_error;
        report.entries.push_back(e);
    }
    return report;
}

StatReport stat_negcorr(const WeightedBipartiteInstance& instance, std::size_t samples, std::uint64_t seed, double z) {
    if (samples < 1000) throw std::invalid_argument("statistical checks need at least 1000 samples");
    if (instance.steps() != 1) throw std::invalid_argument("negative correlation is checked on single-step instances");
    const BipartiteGraph& g = instance.graph();
    struct Subset {
        std::string label;
        std::vector<std::size_t> edges;
        std::uint64_t all_up = 0;
        std::uint64_t all_down = 0;
    };
    std::vector<Subset> subsets;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        const auto& inc = g.incident(v);
        const std::size_t d = inc.size();
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) {
                subsets.push_back({g.node_name(v) + " {" + std::to_string(inc[i]) + "," + std::to_string(inc[j]) + "}",
                                   {inc[i], inc[j]}});
                for (std::size_t k = j + 1; k < d; ++k)
                    subsets.push_back({g.node_name(v) + " {" + std::to_string(inc[i]) + "," + std::to_string(inc[j]) +
                                           "," + std::to_string(inc[k]) + "}",
                                       {inc[i], inc[j], inc[k]}});
            }
    }
    DependentRounder rounder(instance);
    for (std::size_t k = 0; k < samples; ++k) {
        rounder.round(replication_seed(seed, k));
        for (auto& s : subsets) {
            bool up = true;
            bool down = true;
            for (std::size_t e : s.edges) {
                const bool x = rounder.up(e);
                up = up && x;
                down = down && !x;
            }
            s.all_up += up;
            s.all_down += down;
        }
    }
    StatReport report;
    report.samples = samples;
    report.z = z;
    const auto M = static_cast<double>(samples);
    const double se = std::sqrt(1.0 / (4.0 * M));
    for (const auto& s : subsets) {
        double up_bound = 1;
        double down_bound = 1;
        for (std::size_t e : s.edges) {
            up_bound *= instance.weight(e, 1).to_double();
            down_bound *= 1 - instance.weight(e, 1).to_double();
        }
        StatReport::Entry up{s.label + " all up", up_bound, static_cast<double>(s.all_up) / M, se, true};
        up.pass = up.estimate <= up.target + z * se;
        StatReport::Entry down{s.label + " all down", down_bound, static_cast<double>(s.all_down) / M, se, true};
        down.pass = down.estimate <= down.target + z * se;
        report.entries.push_back(up);
        report.entries.push_back(down);
    }
    return report;
}

StatReport stat_exante(const std::function<Apportionment(std::uint64_t)>& method, const PopulationProfile& profile,
                       std::int64_t house, std::size_t samples, std::uint64_t seed, double z) {
    if (samples < 1000) throw std::invalid_argument("statistical checks need at least 1000 samples");
    const std::size_t n = profile.size();
    std::vector<double> sum(n, 0);
    std::vector<double> sum_sq(n, 0);
    for (std::size_t k = 0; k < samples; ++k) {
        const Apportionment a = method(replication_seed(seed, k));
        if (a.size() != n || a.house() != house) throw std::logic_error("method returned a malformed apportionment");
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = static_cast<double>(a[i]);
            sum[i] += x;
            sum_sq[i] += x * x;
        }
    }
    const StandardQuota q = standard_quota(profile, house);
    StatReport report;
    report.samples = samples;
    report.z = z;
    const auto M = static_cast<double>(samples);
    for (std::size_t i = 0; i < n; ++i) {
        StatReport::Entry e;
        e.label = "state " + std::to_string(i + 1);
        e.target = q[i].to_double();
        e.estimate = sum[i] / M;
        const double var = std::max(0.0, (sum_sq[i] - M * e.estimate * e.estimate) / (M - 1));
        e.std_error = std::sqrt(var / M);
        e.pass = e.std_error == 0 ? e.estimate == e.target : std::abs(e.estimate - e.target) <= z * e.std_error;
        report.entries.push_back(e);
    }
    return report;
}

ExactRoundingReport exact_rounding_check(const WeightedBipartiteInstance& instance, std::size_t max_fractional) {
    if (instance.steps() != 1) throw std::invalid_argument("exact check expects a single time step");
    auto graph = std::make_shared<const PipageGraph>(instance);
    const std::size_t m = graph->edge_count();
    std::size_t fractional = 0;
    for (std::size_t e = 0; e < m; ++e) {
        const auto x = graph->initial_numerator(e);
        fractional += x != 0 && x != graph->denominator();
    }
    if (fractional > max_fractional)
        throw std::length_error("exact check is limited to " + std::to_string(max_fractional) + " fractional edges");

    std::map<std::vector<std::uint8_t>, BigRational> outcomes;
    std::function<void(PipageState&, const BigRational&)> expand = [&](PipageState& state, const BigRational& prob) {
        auto s = state.find_cycle_or_maximal_path();
        if (!s) {
            std::vector<std::uint8_t> bits(m);
            for (std::size_t e = 0; e < m; ++e) bits[e] = state.rounded_up(e);
            outcomes[bits] += prob;
            return;
        }
        const StepAmounts amounts = state.amounts(*s);
        const BigRational up = big(amounts.raise_probability());
        if (up > 0) {
            PipageState next = state;
            next.apply(*s, Branch::raise_odd);
            expand(next, prob * up);
        }
        if (up < 1) {
            PipageState next = state;
            next.apply(*s, Branch::lower_odd);
            expand(next, prob * (1 - up));
        }
    };
    PipageState start(graph, 0);
    expand(start, BigRational(1));

    ExactRoundingReport report;
    report.outcomes = outcomes.size();
    const BipartiteGraph& g = instance.graph();
    BigRational total = 0;
    std::vector<BigRational> marginal(m, BigRational(0));
    for (const auto& [bits, prob] : outcomes) {
        total += prob;
        for (std::size_t e = 0; e < m; ++e)
            if (bits[e]) marginal[e] += prob;
        for (std::size_t v = 0; v < g.node_count(); ++v) {
            std::int64_t D = 0;
            for (std::size_t e : g.incident(v)) D += bits[e];
            const Rational d = instance.fractional_degree(v, 1);
            if (D != d.floor() && D != d.ceil())
                report.failures.push_back("degree of " + g.node_name(v) + " leaves [floor, ceil] in some outcome");
        }
    }
    if (total != 1) report.failures.push_back("outcome probabilities do not sum to 1");
    for (std::size_t e = 0; e < m; ++e)
        if (marginal[e] != big(instance.weight(e, 1)))
            report.failures.push_back("marginal of edge " + std::to_string(e) + " differs from its weight");
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        const auto& inc = g.incident(v);
        if (inc.size() > 16) continue;
        for (std::uint32_t mask = 1; mask < (1u << inc.size()); ++mask) {
            if (std::popcount(mask) < 2) continue;
            BigRational up_bound = 1;
            BigRational down_bound = 1;
            for (std::size_t k = 0; k < inc.size(); ++k)
                if (mask >> k & 1u) {
                    up_bound *= big(instance.weight(inc[k], 1));
                    down_bound *= 1 - big(instance.weight(inc[k], 1));
                }
            BigRational up = 0;
            BigRational down = 0;
            for (const auto& [bits, prob] : outcomes) {
                bool all_up = true;
                bool all_down = true;
                for (std::size_t k = 0; k < inc.size(); ++k)
                    if (mask >> k & 1u) {
                        all_up = all_up && bits[inc[k]];
                        all_down = all_down && !bits[inc[k]];
                    }
                if (all_up) up += prob;
                if (all_down) down += prob;
            }
            if (up > up_bound || down > down_bound)
                report.failures.push_back("negative correlation fails at " + g.node_name(v) + " for subset mask " +
                                          std::to_string(mask));
        }
    }
    return report;
}

namespace {

template <typename Visit>
bool for_each_profile(std::size_t states, std::int64_t max_population, Visit&& visit) {
    std::vector<std::int64_t> p(states, 1);
    for (;;) {
        if (visit(p)) return true;
        std::size_t k = states;
        while (k > 0 && p[k - 1] == max_population) p[--k] = 1;
        if (k == 0) return false;
        ++p[k - 1];
    }
}

}  // namespace

std::optional<AlabamaWitness> find_alabama_paradox(std::size_t states, std::int64_t max_population,
                                                   std::int64_t max_house) {
    std::optional<AlabamaWitness> found;
    for_each_profile(states, max_population, [&](const std::vector<std::int64_t>& p) {
        const PopulationProfile profile(p);
        Apportionment previous = hamilton(profile, 1);
        for (std::int64_t h = 1; h < max_house; ++h) {
            Apportionment next = hamilton(profile, h + 1);
            if (!check_house_monotone_step(profile, h, previous, next)) {
                found = AlabamaWitness{p, h, previous, next};
                return true;
            }
            previous = std::move(next);
        }
        return false;
    });
    return found;
}

std::optional<QuotaViolationWitness> find_hh_quota_violation(std::size_t states, std::int64_t max_population,
                                                             std::int64_t max_house) {
    std::optional<QuotaViolationWitness> found;
    const DivisorCriterion hh = huntington_hill();
    for_each_profile(states, max_population, [&](const std::vector<std::int64_t>& p) {
        const PopulationProfile profile(p);
        for (std::int64_t h = 1; h <= max_house; ++h) {
            Apportionment a = divisor(profile, h, hh);
            if (!check_quota(profile, h, a)) {
                found = QuotaViolationWitness{p, h, std::move(a)};
                return true;
            }
        }
        return false;
    });
    return found;
}

WeightedBipartiteInstance three_step_example() {
    BipartiteGraph g({"v1", "v2"}, {"v3", "v4"}, {{0, 0}, {0, 1}, {1, 1}});
    return WeightedBipartiteInstance(std::move(g), 3,
                                     {{Rational(1, 4), Rational(1, 2), Rational(3, 4)},
                                      {Rational(1, 2), Rational(1, 4), Rational(3, 4)},
                                      {Rational(1, 2), Rational(1, 2), Rational(1, 4)}});
}

nlohmann::ordered_json to_json(const Apportionment& a) { return a.seats(); }

nlohmann::ordered_json to_json(const Theorem1Certificate& c) {
    nlohmann::ordered_json doc;
    doc["house"] = c.house;
    doc["pA"] = c.p_a;
    doc["pB"] = c.p_b;
    doc["pC"] = c.p_c;
    auto cases = nlohmann::ordered_json::array();
    for (const auto& k : c.cases) {
        nlohmann::ordered_json row;
        row["allocation"] = to_json(k.allocation);
        row["against"] = k.against;
        std::vector<std::size_t> relabel;
        for (std::size_t s : k.relabel) relabel.push_back(s + 1);
        row["relabel"] = relabel;
        auto witnesses = nlohmann::ordered_json::array();
        for (const auto& w : k.witnesses) {
            nlohmann::ordered_json x;
            x["other"] = to_json(w.other);
            x["i"] = w.gainer_population_state + 1;
            x["j"] = w.loser_population_state + 1;
            x["direction"] = w.reversed ? "other->pA" : "pA->other";
            witnesses.push_back(std::move(x));
        }
        row["witnesses"] = std::move(witnesses);
        cases.push_back(std::move(row));
    }
    doc["cases"] = std::move(cases);
    doc["ok"] = c.ok();
    return doc;
}

nlohmann::ordered_json to_json(const PitfallCertificate& c) {
    nlohmann::ordered_json doc;
    doc["populations"] = c.populations;
    auto support = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < c.distribution.size(); ++k) {
        nlohmann::ordered_json row;
        row["allocation"] = to_json(c.distribution[k].first);
        row["probability"] = c.distribution[k].second.to_string();
        auto next = nlohmann::ordered_json::array();
        for (const auto& b : c.successors[k]) next.push_back(to_json(b));
        row["successors"] = std::move(next);
        row["toxic"] = static_cast<bool>(c.toxic[k]);
        support.push_back(std::move(row));
    }
    doc["support"] = std::move(support);
    doc["max_expected_first"] = c.max_expected_first.to_string();
    doc["first_quota"] = c.first_quota.to_string();
    doc["flow_ok"] = c.flow_failures.empty();
    doc["failures"] = c.failures;
    doc["ok"] = c.ok();
    return doc;
}

nlohmann::ordered_json to_json(const BijectionCertificate& c) {
    nlohmann::ordered_json doc;
    doc["populations"] = c.populations;
    doc["sequences"] = c.sequences;
    doc["matchings"] = c.matchings;
    doc["failures"] = c.failures;
    doc["ok"] = c.ok();
    return doc;
}

nlohmann::ordered_json to_json(const StatReport& r) {
    nlohmann::ordered_json doc;
    doc["samples"] = r.samples;
    doc["z"] = r.z;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : r.entries) {
        nlohmann::ordered_json x;
        x["label"] = e.label;
        x["target"] = e.target;
        x["estimate"] = e.estimate;
        x["std_error"] = e.std_error;
        x["pass"] = e.pass;
        entries.push_back(std::move(x));
    }
    doc["entries"] = std::move(entries);
    doc["ok"] = r.ok();
    return doc;
}

}  // namespace apportion
