#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "apportion/rational.hpp"

namespace apportion {

/// Positive integer populations for n >= 2 states. States are 0-based.
class PopulationProfile {
public:
    explicit PopulationProfile(std::vector<std::int64_t> populations);

    std::size_t size() const { return populations_.size(); }
    std::int64_t operator[](std::size_t i) const { return populations_[i]; }
    std::int64_t total() const { return total_; }
    std::span<const std::int64_t> populations() const { return populations_; }

    friend bool operator==(const PopulationProfile&, const PopulationProfile&) = default;

private:
    std::vector<std::int64_t> populations_;
    std::int64_t total_ = 0;
};

/// Seat vector whose entries sum to the house size.
class Apportionment {
public:
    Apportionment(std::vector<std::int64_t> seats, std::int64_t house);
    /// House size taken as the sum of the seats.
    explicit Apportionment(std::vector<std::int64_t> seats);

    std::size_t size() const { return seats_.size(); }
    std::int64_t operator[](std::size_t i) const { return seats_[i]; }
    std::int64_t house() const { return house_; }
    const std::vector<std::int64_t>& seats() const { return seats_; }

    friend bool operator==(const Apportionment&, const Apportionment&) = default;
    friend auto operator<=>(const Apportionment& a, const Apportionment& b) { return a.seats_ <=> b.seats_; }

private:
    std::vector<std::int64_t> seats_;
    std::int64_t house_ = 0;
};

/// Exact standard quotas q_i = p_i * h / P.
struct StandardQuota {
    std::vector<Rational> values;

    std::size_t size() const { return values.size(); }
    const Rational& operator[](std::size_t i) const { return values[i]; }
};

/// Sequence of 0-based state indices. A finite sequence answers only for
/// positions it holds; a cyclic one repeats its entries forever.
class SeatSequence {
public:
    enum class Extent { finite, cyclic };

    SeatSequence(std::vector<std::size_t> entries, std::size_t states, Extent extent = Extent::finite);

    std::size_t states() const { return states_; }
    std::size_t period() const { return entries_.size(); }
    Extent extent() const { return extent_; }
    const std::vector<std::size_t>& entries() const { return entries_; }

    /// Whether position h (1-based) is defined.
    bool covers(std::int64_t h) const;
    /// State receiving the h-th seat (1-based h).
    std::size_t at(std::int64_t h) const;

    SeatSequence repeated() const { return SeatSequence(entries_, states_, Extent::cyclic); }

private:
    std::vector<std::size_t> entries_;
    std::size_t states_;
    Extent extent_;
};

/// A profile, house size and allocation, as compared by the paradox detector.
struct LabeledApportionment {
    const PopulationProfile& profile;
    std::int64_t house;
    const Apportionment& seats;
};

StandardQuota standard_quota(const PopulationProfile& profile, std::int64_t house);

bool check_quota(const PopulationProfile& profile, std::int64_t house, const Apportionment& a);

/// First (i, j) in lexicographic order such that i's population weakly grew,
/// j's weakly shrank, i lost seats and j gained seats going from `before` to
/// `after`.
std::optional<std::pair<std::size_t, std::size_t>> detect_population_paradox(const LabeledApportionment& before,
                                                                              const LabeledApportionment& after);

bool check_house_monotone_step(const PopulationProfile& profile, std::int64_t house, const Apportionment& at_house,
                               const Apportionment& at_next_house);

Apportionment seat_sequence_prefix_allocation(const SeatSequence& sequence, std::int64_t house);

/// Quota at every prefix 1..max_house.
bool check_sequence_quota(const PopulationProfile& profile, const SeatSequence& sequence, std::int64_t max_house);

}  // namespace apportion
