#include "apportion/methods.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace apportion {
namespace {

void require_house(std::int64_t house) {
    if (house < 1) throw std::invalid_argument("house size must be positive");
}

int128 mul(int128 a, int128 b) {
    int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("divisor comparison overflows 128 bits");
    return r;
}

}  // namespace

Apportionment hamilton(const PopulationProfile& profile, std::int64_t house) {
    require_house(house);
    const std::size_t n = profile.size();
    std::vector<std::int64_t> seats(n);
    std::vector<int128> residue(n);
    std::int64_t given = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int128 scaled = static_cast<int128>(profile[i]) * house;
        seats[i] = static_cast<std::int64_t>(scaled / profile.total());
        residue[i] = scaled % profile.total();
        given += seats[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return residue[x] > residue[y]; });
    for (std::int64_t k = 0; k < house - given; ++k) ++seats[order[static_cast<std::size_t>(k)]];
    return Apportionment(std::move(seats), house);
}

void DivisorCriterion::check(std::int64_t up_to) const {
    Rational previous(-1);
    for (std::int64_t t = 0; t <= up_to; ++t) {
        const Rational d2 = squared(t);
        if (d2 < Rational(t * t) || d2 > Rational((t + 1) * (t + 1)))
            throw std::invalid_argument("criterion " + name + " leaves [t, t+1] at t=" + std::to_string(t));
        if (d2 < previous) throw std::invalid_argument("criterion " + name + " decreases at t=" + std::to_string(t));
        previous = d2;
    }
}

DivisorCriterion huntington_hill() {
    return {"huntington-hill", [](std::int64_t t) { return Rational(t * (t + 1)); }};
}

DivisorCriterion webster() {
    return {"webster", [](std::int64_t t) { return Rational((2 * t + 1) * (2 * t + 1), 4); }};
}

DivisorCriterion jefferson() {
    return {"jefferson", [](std::int64_t t) { return Rational((t + 1) * (t + 1)); }};
}

DivisorCriterion adams() {
    return {"adams", [](std::int64_t t) { return Rational(t * t); }};
}

Apportionment divisor(const PopulationProfile& profile, std::int64_t house, const DivisorCriterion& criterion) {
    require_house(house);
    criterion.check(house);
    const std::size_t n = profile.size();
    std::vector<std::int64_t> seats(n, 0);
    std::vector<Rational> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = criterion.squared(0);

    // true if state x's next value beats state y's.
    auto beats = [&](std::size_t x, std::size_t y) {
        const Rational& dx = next[x];
        const Rational& dy = next[y];
        const bool inf_x = dx.num() == 0;
        const bool inf_y = dy.num() == 0;
        if (inf_x != inf_y) return inf_x;
        if (inf_x) return profile[x] != profile[y] ? profile[x] > profile[y] : x < y;
        const int128 px = static_cast<int128>(profile[x]) * profile[x];
        const int128 py = static_cast<int128>(profile[y]) * profile[y];
        const int128 lhs = mul(mul(px, dy.num()), dx.den());
        const int128 rhs = mul(mul(py, dx.num()), dy.den());
        return lhs != rhs ? lhs > rhs : x < y;
    };
    auto worse = [&](std::size_t x, std::size_t y) { return beats(y, x); };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
    for (std::size_t i = 0; i < n; ++i) heap.push(i);
    for (std::int64_t k = 0; k < house; ++k) {
        const std::size_t i = heap.top();
        heap.pop();
        ++seats[i];
        next[i] = criterion.squared(seats[i]);
        heap.push(i);
    }
    return Apportionment(std::move(seats), house);
}

Apportionment grimmett_with(const PopulationProfile& profile, std::int64_t house, const std::vector<std::size_t>& order,
                            const Rational& offset) {
    require_house(house);
    const std::size_t n = profile.size();
    if (order.size() != n) throw std::invalid_argument("permutation has the wrong length");
    std::vector<bool> seen(n, false);
    for (std::size_t s : order) {
        if (s >= n || seen[s]) throw std::invalid_argument("order is not a permutation of the states");
        seen[s] = true;
    }
    if (offset < Rational(0) || offset >= Rational(1)) throw std::invalid_argument("offset must lie in [0, 1)");

    // ceil(U + S*h/P) with S*h = k*P + r, all in 128 bits.
    const int128 P = profile.total();
    const int128 un = offset.num();
    const int128 ud = offset.den();
    auto ceil_q = [&](int128 running) {
        const int128 scaled = running * house;
        const int128 k = scaled / P;
        const int128 top = un * P + (scaled % P) * ud;
        const int128 bottom = ud * P;
        return k + (top + bottom - 1) / bottom;
    };
    std::vector<std::int64_t> seats(n, 0);
    int128 running = 0;
    int128 before = ceil_q(0);
    for (std::size_t s : order) {
        running += profile[s];
        const int128 after = ceil_q(running);
        seats[s] = static_cast<std::int64_t>(after - before);
        before = after;
    }
    return Apportionment(std::move(seats), house);
}

Apportionment grimmett(const PopulationProfile& profile, std::int64_t house, std::uint64_t seed) {
    CounterRng rng(derive_seed(derive_seed(seed, "grimmett"), digest(profile.populations())));
    std::vector<std::size_t> order(profile.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = order.size() - 1; k > 0; --k) std::swap(order[k], order[rng.below(k + 1)]);
    const auto u = static_cast<std::int64_t>(rng() >> 11);
    return grimmett_with(profile, house, order, Rational(u, std::int64_t{1} << 53));
}

ArrivalStream::ArrivalStream(std::uint64_t key) : rng_(CounterRng(key)) {}

ArrivalStream ArrivalStream::fixed(std::vector<double> arrivals) {
    double last = 0.0;
    for (double x : arrivals) {
        if (!(x > last)) throw std::invalid_argument("arrival times must be positive and strictly increasing");
        last = x;
    }
    ArrivalStream s;
    s.arrivals_ = std::move(arrivals);
    return s;
}

double ArrivalStream::at(std::size_t k) {
    while (arrivals_.size() <= k) {
        if (!rng_) throw std::out_of_range("fixed arrival stream has only " + std::to_string(arrivals_.size()) + " arrivals");
        // u in (0, 1), so every gap is positive and finite.
        const double u = (static_cast<double>((*rng_)() >> 12) + 0.5) * 0x1.0p-52;
        const double gap = -std::log(u);
        const double last = arrivals_.empty() ? 0.0 : arrivals_.back();
        arrivals_.push_back(last + gap > last ? last + gap : std::nextafter(last, INFINITY));
    }
    return arrivals_[k];
}

ArrivalStream poisson_stream(std::uint64_t seed, std::size_t state) {
    return ArrivalStream(derive_seed(derive_seed(seed, "poisson"), static_cast<std::uint64_t>(state)));
}

Apportionment poisson_with(const PopulationProfile& profile, std::int64_t house, std::vector<ArrivalStream>& streams) {
    require_house(house);
    const std::size_t n = profile.size();
    if (streams.size() != n) throw std::invalid_argument("need one arrival stream per state");
    using Entry = std::tuple<double, std::size_t, std::size_t>;  // scaled time, state, arrival index
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (std::size_t i = 0; i < n; ++i) heap.emplace(streams[i].at(0) / static_cast<double>(profile[i]), i, 0);
    std::vector<std::int64_t> seats(n, 0);
    for (std::int64_t k = 0; k < house; ++k) {
        const auto [y, i, j] = heap.top();
        heap.pop();
        ++seats[i];
        if (k + 1 < house) heap.emplace(streams[i].at(j + 1) / static_cast<double>(profile[i]), i, j + 1);
    }
    return Apportionment(std::move(seats), house);
}

Apportionment poisson_method(const PopulationProfile& profile, std::int64_t house, std::uint64_t seed) {
    std::vector<ArrivalStream> streams;
    streams.reserve(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) streams.push_back(poisson_stream(seed, i));
    return poisson_with(profile, house, streams);
}

std::uint64_t profile_seed(std::uint64_t seed, const PopulationProfile& profile) {
    return derive_seed(derive_seed(seed, "cumulative"), digest(profile.populations()));
}

WeightedBipartiteInstance star_instance(const PopulationProfile& profile, std::int64_t steps) {
    if (steps < 1) throw std::invalid_argument("the star instance needs at least one step");
    std::vector<std::string> states;
    std::vector<BipartiteGraph::Edge> edges;
    std::vector<std::vector<Rational>> weights;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        states.push_back("s" + std::to_string(i + 1));
        edges.push_back({0, i});
        weights.emplace_back(static_cast<std::size_t>(steps), Rational(profile[i], profile.total()));
    }
    return WeightedBipartiteInstance(BipartiteGraph({"center"}, std::move(states), std::move(edges)),
                                     static_cast<std::size_t>(steps), std::move(weights));
}

SeatSequenceSampler::SeatSequenceSampler(const PopulationProfile& profile, std::optional<std::int64_t> horizon)
    : profile_(profile),
      horizon_(horizon.value_or(profile.total())),
      rounder_(star_instance(profile, horizon_)) {}

void SeatSequenceSampler::sample_into(std::uint64_t seed, std::vector<std::size_t>& out) {
    rounder_.run(profile_seed(seed, profile_));
    const std::size_t n = profile_.size();
    out.resize(static_cast<std::size_t>(horizon_));
    for (std::size_t t = 1; t <= out.size(); ++t) {
        std::size_t winner = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!rounder_.bit(i, t)) continue;
            if (winner != n) throw std::logic_error("two seats assigned at position " + std::to_string(t));
            winner = i;
        }
        if (winner == n) throw std::logic_error("no seat assigned at position " + std::to_string(t));
        out[t - 1] = winner;
    }
}

SeatSequence SeatSequenceSampler::sample(std::uint64_t seed) {
    std::vector<std::size_t> entries;
    sample_into(seed, entries);
    SeatSequence s(std::move(entries), profile_.size());
    if (!check_sequence_quota(profile_, s, horizon_)) throw std::logic_error("sampled seat sequence violates quota");
    return s;
}

SeatSequence sample_finite_seat_sequence(const PopulationProfile& profile, std::uint64_t seed) {
    return SeatSequenceSampler(profile).sample(seed);
}

HouseMonotoneMethod::HouseMonotoneMethod(std::uint64_t seed, std::optional<std::int64_t> max_house)
    : seed_(seed), max_house_(max_house) {
    if (max_house_ && *max_house_ < 1) throw std::invalid_argument("maximum house size must be positive");
}

const SeatSequence& HouseMonotoneMethod::sequence(const PopulationProfile& profile) {
    std::vector<std::int64_t> key(profile.populations().begin(), profile.populations().end());
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        SeatSequence s = SeatSequenceSampler(profile, max_house_).sample(seed_);
        it = cache_.emplace(std::move(key), max_house_ ? s : s.repeated()).first;
    }
    return it->second;
}

Apportionment HouseMonotoneMethod::apportion(const PopulationProfile& profile, std::int64_t house) {
    require_house(house);
    if (max_house_ && house > *max_house_)
        throw std::out_of_range("house size " + std::to_string(house) + " exceeds the configured maximum " +
                                std::to_string(*max_house_));
    return seat_sequence_prefix_allocation(sequence(profile), house);
}

Apportionment house_monotone_method(const PopulationProfile& profile, std::int64_t house, std::uint64_t seed) {
    return HouseMonotoneMethod(seed).apportion(profile, house);
}

}  // namespace apportion
