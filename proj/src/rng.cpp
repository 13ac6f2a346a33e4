#include "apportion/rng.hpp"

#include <stdexcept>

namespace apportion {

std::uint64_t digest(std::span<const std::int64_t> values) {
    std::uint64_t h = derive_seed(0x5EED5EED5EED5EEDULL, static_cast<std::uint64_t>(values.size()));
    for (std::int64_t v : values) h = derive_seed(h, static_cast<std::uint64_t>(v));
    return h;
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("CounterRng::below(0)");
    // Rejection on the top of the range keeps the draw exactly uniform.
    const std::uint64_t limit = max() - (max() % bound + 1) % bound;
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x > limit);
    return x % bound;
}

}  // namespace apportion
