#include "snl/random.hpp"

#include <algorithm>

namespace snl {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

std::uint64_t stable_hash(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out) {
    double total = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        out[k] = std::gamma_distribution<double>(alpha[k], 1.0)(rng);
        total += out[k];
    }
    if (total <= 0.0) {
        // all gammas underflowed (tiny concentrations); fall back to the largest alpha
        const auto best = std::max_element(alpha.begin(), alpha.end()) - alpha.begin();
        std::fill(out.begin(), out.end(), 0.0);
        out[static_cast<std::size_t>(best)] = 1.0;
        return;
    }
    for (auto& v : out) v /= total;
}

std::vector<double> dirichlet(Rng& rng, std::span<const double> alpha) {
    std::vector<double> out(alpha.size());
    dirichlet(rng, alpha, out);
    return out;
}

std::vector<Count> multinomial(Rng& rng, Count n, std::span<const double> probs) {
    std::vector<Count> out(probs.size(), 0);
    double remaining_p = 1.0;
    Count remaining_n = n;
    for (std::size_t k = 0; k + 1 < probs.size() && remaining_n > 0; ++k) {
        const double p = remaining_p > 0.0 ? std::clamp(probs[k] / remaining_p, 0.0, 1.0) : 0.0;
        const Count draw = std::binomial_distribution<Count>(remaining_n, p)(rng);
        out[k] = draw;
        remaining_n -= draw;
        remaining_p -= probs[k];
    }
    if (!probs.empty()) out.back() += remaining_n;
    return out;
}

}  // namespace snl
