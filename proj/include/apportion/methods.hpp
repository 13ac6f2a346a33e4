#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "apportion/core_model.hpp"
#include "apportion/cumulative_rounding.hpp"
#include "apportion/rational.hpp"
#include "apportion/rng.hpp"

namespace apportion {

/// Largest remainder method. Residue ties go to the lower state index.
Apportionment hamilton(const PopulationProfile& profile, std::int64_t house);

/// Rounding criterion d of a divisor method, given through its square so
/// that geometric means such as sqrt(t(t+1)) stay exact.
struct DivisorCriterion {
    std::string name;
    std::function<Rational(std::int64_t)> squared;  // d(t)^2

    /// Throws std::invalid_argument unless t <= d(t) <= t+1 and d is
    /// non-decreasing on 0..up_to.
    void check(std::int64_t up_to) const;
};

DivisorCriterion huntington_hill();  // d(t) = sqrt(t(t+1))
DivisorCriterion webster();          // d(t) = t + 1/2
DivisorCriterion jefferson();        // d(t) = t + 1
DivisorCriterion adams();            // d(t) = t

/// Seats go to the h largest values p_i / d(t), t = 0, 1, ... Values with
/// d(t) = 0 are infinite and ordered by population (larger first), then by
/// state index; finite ties go to the lower state index.
Apportionment divisor(const PopulationProfile& profile, std::int64_t house, const DivisorCriterion& criterion);

/// Grimmett's method with an explicit permutation (order[k] is the state in
/// position k) and offset U in [0, 1).
Apportionment grimmett_with(const PopulationProfile& profile, std::int64_t house, const std::vector<std::size_t>& order,
                            const Rational& offset);
/// Uniform permutation and U = k / 2^53 drawn from the seed.
Apportionment grimmett(const PopulationProfile& profile, std::int64_t house, std::uint64_t seed);

/// Unit-rate Poisson arrival times of one state, generated on demand.
class ArrivalStream {
public:
    /// Seeded stream; arrivals depend only on the key.
    explicit ArrivalStream(std::uint64_t key);
    /// Fixed arrivals, e.g. for hand-built examples. Must be strictly
    /// increasing and positive; reading past the end throws.
    static ArrivalStream fixed(std::vector<double> arrivals);

    /// k-th arrival, 0-based.
    double at(std::size_t k);
    std::size_t generated() const { return arrivals_.size(); }

private:
    ArrivalStream() = default;

    std::optional<CounterRng> rng_;
    std::vector<double> arrivals_;
};

/// Stream of state i for a method seed.
ArrivalStream poisson_stream(std::uint64_t seed, std::size_t state);

/// Poisson method: scale each state's arrivals by 1/p_i, merge, and give
/// the first h arrivals their seats. Ties go to the lower state index.
Apportionment poisson_method(const PopulationProfile& profile, std::int64_t house, std::uint64_t seed);
Apportionment poisson_with(const PopulationProfile& profile, std::int64_t house, std::vector<ArrivalStream>& streams);

/// Seed of the cumulative method for one profile.
std::uint64_t profile_seed(std::uint64_t seed, const PopulationProfile& profile);

/// Star instance: one center joined to every state, weight p_i/P at each of
/// `steps` time steps.
WeightedBipartiteInstance star_instance(const PopulationProfile& profile, std::int64_t steps);

/// Samples finite seat sequences of one profile by cumulative rounding on
/// the star instance, reusing the layered graph across seeds.
class SeatSequenceSampler {
public:
    /// `horizon` defaults to P.
    explicit SeatSequenceSampler(const PopulationProfile& profile, std::optional<std::int64_t> horizon = std::nullopt);

    const PopulationProfile& profile() const { return profile_; }
    std::int64_t horizon() const { return horizon_; }

    /// Sequence for master seed `seed` (the per-profile seed is derived).
    SeatSequence sample(std::uint64_t seed);
    /// Same, writing the 0-based states into `out` without the quota check.
    void sample_into(std::uint64_t seed, std::vector<std::size_t>& out);

private:
    PopulationProfile profile_;
    std::int64_t horizon_;
    CumulativeRounder rounder_;
};

/// Finite quota seat sequence of length P, checked before it is returned.
SeatSequence sample_finite_seat_sequence(const PopulationProfile& profile, std::uint64_t seed);

/// The house-monotone method: one seat sequence per profile, repeated
/// forever, answers every house size. Sequences are cached, so a method
/// object is not safe for unsynchronized concurrent use; clones with the
/// same seed give identical answers.
class HouseMonotoneMethod {
public:
    /// With `max_house` set, sequences have that length instead of P and
    /// larger houses are rejected.
    explicit HouseMonotoneMethod(std::uint64_t seed, std::optional<std::int64_t> max_house = std::nullopt);

    Apportionment apportion(const PopulationProfile& profile, std::int64_t house);
    const SeatSequence& sequence(const PopulationProfile& profile);

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::optional<std::int64_t> max_house_;
    std::map<std::vector<std::int64_t>, SeatSequence> cache_;
};

Apportionment house_monotone_method(const PopulationProfile& profile, std::int64_t house, std::uint64_t seed);

}  // namespace apportion
