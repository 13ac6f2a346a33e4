#include <gtest/gtest.h>

#include <random>
#include <set>

#include "apportion/methods.hpp"
#include "apportion/verify_lab.hpp"
#include "generators.hpp"

using namespace apportion;

TEST(QuotaAllocations, Enumerates) {
    const auto set = enumerate_quota_allocations(PopulationProfile({1, 2, 1, 2}), 3);
    ASSERT_EQ(set.allocations.size(), 2u);
    EXPECT_EQ(set.allocations[0], Apportionment({1, 1, 0, 1}));
    EXPECT_EQ(set.allocations[1], Apportionment({0, 1, 1, 1}));
    EXPECT_EQ(enumerate_quota_allocations(PopulationProfile({1, 1, 1}), 3).allocations.size(), 1u);
    EXPECT_EQ(enumerate_quota_allocations(PopulationProfile({1, 1, 1, 1}), 2).allocations.size(), 6u);
}

TEST(QuotaSequences, CountsSmallProfiles) {
    EXPECT_EQ(enumerate_quota_sequences(PopulationProfile({1, 1})).size(), 2u);
    EXPECT_EQ(enumerate_quota_sequences(PopulationProfile({1, 3})).size(), 4u);
    for (const auto& seq : enumerate_quota_sequences(PopulationProfile({2, 3, 1})))
        EXPECT_TRUE(check_sequence_quota(PopulationProfile({2, 3, 1}), SeatSequence(seq, 3), 6));
}

TEST(Theorem1, CertificateIsComplete) {
    const auto cert = verify_theorem1();
    EXPECT_TRUE(cert.ok());
    EXPECT_EQ(cert.cases.size(), 10u);
    for (const auto& c : cert.cases) EXPECT_FALSE(c.witnesses.empty());
}

TEST(Pitfalls, ExampleTwo) {
    const auto cert = verify_pitfall_example2();
    EXPECT_TRUE(cert.ok());
    EXPECT_TRUE(cert.flow_failures.empty());
    for (bool t : cert.toxic) EXPECT_FALSE(t);
    EXPECT_EQ(cert.max_expected_first, Rational(7, 4));
}

// Oracle: an allocation is non-toxic exactly when it is a prefix allocation
// of some full quota sequence.
TEST(Toxicity, MatchesPrefixesOfQuotaSequences) {
    int toxic_seen = 0;
    for (const auto& p : apportion::testing::small_profiles(4, 8)) {
        std::set<std::vector<std::int64_t>> prefixes;
        for (const auto& seq : enumerate_quota_sequences(p)) {
            std::vector<std::int64_t> seats(p.size(), 0);
            for (std::size_t i : seq) {
                ++seats[i];
                prefixes.insert(seats);
            }
        }
        for (std::int64_t h = 1; h <= p.total(); ++h)
            for (const auto& a : enumerate_quota_allocations(p, h).allocations) {
                const bool toxic = is_toxic(p, h, a);
                ASSERT_EQ(toxic, !prefixes.count(a.seats()));
                toxic_seen += toxic;
            }
    }
    EXPECT_GT(toxic_seen, 0);
    EXPECT_TRUE(is_toxic(PopulationProfile({1, 2, 1, 2}), 2, Apportionment({1, 0, 1, 0})));
    EXPECT_FALSE(is_toxic(PopulationProfile({45, 25, 15, 15}), 3, Apportionment({2, 1, 0, 0})));
    EXPECT_THROW(is_toxic(PopulationProfile({1, 2, 1, 2}), 2, Apportionment({2, 0, 0, 0})), std::invalid_argument);
}

TEST(Toxicity, SampledPrefixesAreNeverToxic) {
    std::mt19937_64 g(61);
    for (int k = 0; k < 300; ++k) {
        const auto p = apportion::testing::random_profile(g, 4, 3);
        if (p.total() > 10) continue;
        HouseMonotoneMethod m(g());
        for (std::int64_t h = 1; h <= p.total(); ++h) ASSERT_FALSE(is_toxic(p, h, m.apportion(p, h)));
    }
}

TEST(Toxicity, QuotaSuccessorsRespectQuota) {
    const PopulationProfile p({3, 2, 2});
    for (const auto& a : enumerate_quota_allocations(p, 3).allocations)
        for (const auto& b : quota_successors(p, a)) {
            EXPECT_TRUE(check_quota(p, 4, b));
            EXPECT_TRUE(check_house_monotone_step(p, 3, a, b));
        }
}

TEST(Bijection, SmallProfiles) {
    const auto c = verify_bijection(PopulationProfile({1, 2, 1, 2}));
    EXPECT_TRUE(c.ok());
    EXPECT_EQ(c.sequences, 72u);
    EXPECT_TRUE(verify_bijection(PopulationProfile({2, 3})).ok());
}

TEST(Stats, MarginalsAndExante) {
    const auto report = stat_exante([](std::uint64_t s) { return grimmett(PopulationProfile({1, 2, 1, 2}), 3, s); },
                                    PopulationProfile({1, 2, 1, 2}), 3, 20000, 5);
    EXPECT_TRUE(report.ok());
    EXPECT_EQ(report.entries.size(), 4u);
    // A biased sampler must be flagged.
    const auto biased = stat_marginals(
        [](std::uint64_t s, std::vector<std::uint8_t>& bits) { bits.assign(1, (s % 10) < 7); },
        {Rational(1, 2)}, 20000, 1);
    EXPECT_FALSE(biased.ok());
}

TEST(Stats, NegativeCorrelationOnThreeStepLayer) {
    const auto inst = three_step_example();
    std::vector<Rational> w;
    for (std::size_t e = 0; e < 3; ++e) w.push_back(inst.weight(e, 3));
    EXPECT_TRUE(stat_negcorr(WeightedBipartiteInstance::single(inst.graph(), w), 20000, 3).ok());
}

TEST(ExactRounding, ThreeStepLayers) {
    const auto inst = three_step_example();
    for (std::size_t t = 1; t <= 3; ++t) {
        std::vector<Rational> w;
        for (std::size_t e = 0; e < 3; ++e) w.push_back(inst.weight(e, t));
        const auto r = exact_rounding_check(WeightedBipartiteInstance::single(inst.graph(), w));
        EXPECT_TRUE(r.ok());
        EXPECT_GE(r.outcomes, 1u);
    }
}

TEST(Hunters, FindKnownWitnesses) {
    const auto alabama = find_alabama_paradox(3, 10, 20);
    ASSERT_TRUE(alabama);
    const PopulationProfile p(alabama->populations);
    EXPECT_EQ(alabama->before, hamilton(p, alabama->house));
    EXPECT_EQ(alabama->after, hamilton(p, alabama->house + 1));
    EXPECT_FALSE(check_house_monotone_step(p, alabama->house, alabama->before, alabama->after));

    const auto hh = find_hh_quota_violation(3, 10, 20);
    ASSERT_TRUE(hh);
    const PopulationProfile q(hh->populations);
    EXPECT_EQ(hh->seats, divisor(q, hh->house, huntington_hill()));
    EXPECT_FALSE(check_quota(q, hh->house, hh->seats));
}
