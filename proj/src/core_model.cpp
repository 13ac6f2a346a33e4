#include "apportion/core_model.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace apportion {
namespace {

void require_same_size(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(expected) + " states vs " +
                                    std::to_string(actual) + ")");
}

// floor and ceil of p_i * h / P without leaving the integers.
std::pair<std::int64_t, std::int64_t> quota_bounds(const PopulationProfile& profile, std::int64_t house, std::size_t i) {
    int128 scaled = static_cast<int128>(profile[i]) * house;
    auto lo = static_cast<std::int64_t>(scaled / profile.total());
    return {lo, scaled % profile.total() == 0 ? lo : lo + 1};
}

}  // namespace

PopulationProfile::PopulationProfile(std::vector<std::int64_t> populations) : populations_(std::move(populations)) {
    if (populations_.size() < 2) throw std::invalid_argument("a population profile needs at least 2 states");
    for (std::int64_t p : populations_) {
        if (p < 1) throw std::invalid_argument("populations must be positive integers");
        if (total_ > std::numeric_limits<std::int64_t>::max() - p) throw std::overflow_error("total population overflows");
        total_ += p;
    }
}

Apportionment::Apportionment(std::vector<std::int64_t> seats, std::int64_t house) : seats_(std::move(seats)), house_(house) {
    std::int64_t sum = 0;
    for (std::int64_t a : seats_) {
        if (a < 0) throw std::invalid_argument("seat counts must be non-negative");
        sum += a;
    }
    if (sum != house_)
        throw std::invalid_argument("seats sum to " + std::to_string(sum) + " but the house has " + std::to_string(house_));
}

Apportionment::Apportionment(std::vector<std::int64_t> seats)
    : Apportionment(seats, std::accumulate(seats.begin(), seats.end(), std::int64_t{0})) {}

SeatSequence::SeatSequence(std::vector<std::size_t> entries, std::size_t states, Extent extent)
    : entries_(std::move(entries)), states_(states), extent_(extent) {
    for (std::size_t s : entries_)
        if (s >= states_) throw std::invalid_argument("seat sequence entry out of range");
    if (extent_ == Extent::cyclic && entries_.empty()) throw std::invalid_argument("an empty sequence cannot repeat");
}

bool SeatSequence::covers(std::int64_t h) const {
    if (h < 1) return false;
    return extent_ == Extent::cyclic || static_cast<std::size_t>(h) <= entries_.size();
}

std::size_t SeatSequence::at(std::int64_t h) const {
    if (!covers(h)) throw std::out_of_range("seat sequence has no position " + std::to_string(h));
    return entries_[static_cast<std::size_t>(h - 1) % entries_.size()];
}

StandardQuota standard_quota(const PopulationProfile& profile, std::int64_t house) {
    if (house < 1) throw std::invalid_argument("house size must be positive");
    StandardQuota q;
    q.values.reserve(profile.size());
    for (std::int64_t p : profile.populations()) q.values.push_back(Rational(p) * Rational(house, profile.total()));
    return q;
}

bool check_quota(const PopulationProfile& profile, std::int64_t house, const Apportionment& a) {
    require_same_size(profile.size(), a.size(), "check_quota");
    if (a.house() != house) return false;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        auto [lo, hi] = quota_bounds(profile, house, i);
        if (a[i] != lo && a[i] != hi) return false;
    }
    return true;
}

std::optional<std::pair<std::size_t, std::size_t>> detect_population_paradox(const LabeledApportionment& before,
                                                                              const LabeledApportionment& after) {
    const std::size_t n = before.profile.size();
    require_same_size(n, after.profile.size(), "detect_population_paradox");
    require_same_size(n, before.seats.size(), "detect_population_paradox");
    require_same_size(n, after.seats.size(), "detect_population_paradox");
    for (std::size_t i = 0; i < n; ++i) {
        if (after.profile[i] < before.profile[i] || after.seats[i] >= before.seats[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (after.profile[j] <= before.profile[j] && after.seats[j] > before.seats[j]) return std::pair{i, j};
        }
    }
    return std::nullopt;
}

bool check_house_monotone_step(const PopulationProfile& profile, std::int64_t house, const Apportionment& at_house,
                               const Apportionment& at_next_house) {
    require_same_size(profile.size(), at_house.size(), "check_house_monotone_step");
    require_same_size(profile.size(), at_next_house.size(), "check_house_monotone_step");
    if (at_house.house() != house || at_next_house.house() != house + 1)
        throw std::invalid_argument("check_house_monotone_step: allocations are not for houses h and h+1");
    for (std::size_t i = 0; i < profile.size(); ++i)
        if (at_house[i] > at_next_house[i]) return false;
    return true;
}

Apportionment seat_sequence_prefix_allocation(const SeatSequence& sequence, std::int64_t house) {
    if (house < 1) throw std::invalid_argument("house size must be positive");
    if (!sequence.covers(house))
        throw std::out_of_range("finite seat sequence of length " + std::to_string(sequence.period()) +
                                " cannot allocate a house of " + std::to_string(house));
    std::vector<std::int64_t> seats(sequence.states(), 0);
    const auto period = static_cast<std::int64_t>(sequence.period());
    const std::int64_t full_cycles = house / period;
    if (full_cycles > 0)
        for (std::size_t s : sequence.entries()) seats[s] += full_cycles;
    for (std::int64_t k = 0; k < house % period; ++k) ++seats[sequence.entries()[static_cast<std::size_t>(k)]];
    return Apportionment(std::move(seats), house);
}

bool check_sequence_quota(const PopulationProfile& profile, const SeatSequence& sequence, std::int64_t max_house) {
    if (max_house < 1) throw std::invalid_argument("max_house must be positive");
    require_same_size(profile.size(), sequence.states(), "check_sequence_quota");
    if (!sequence.covers(max_house))
        throw std::out_of_range("seat sequence shorter than " + std::to_string(max_house));
    std::vector<std::int64_t> seats(profile.size(), 0);
    for (std::int64_t h = 1; h <= max_house; ++h) {
        ++seats[sequence.at(h)];
        for (std::size_t i = 0; i < profile.size(); ++i) {
            auto [lo, hi] = quota_bounds(profile, h, i);
            if (seats[i] != lo && seats[i] != hi) return false;
        }
    }
    return true;
}

}  // namespace apportion
