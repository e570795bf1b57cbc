#include "tgk/rng.hpp"

#include <limits>

#include "tgk/distributions.hpp"

namespace tgk {

double Rng::normal() {
    return normal_quantile(uniform());
}

std::uint64_t Rng::below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

}  // namespace tgk
