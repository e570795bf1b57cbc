#include "tgk/profile.hpp"

#include <cmath>
#include <stdexcept>

#include "tgk/likelihood.hpp"
#include "tgk/rng.hpp"

namespace tgk {

std::optional<double> AlphaProfile::alpha_hat() const {
    std::optional<double> best;
    double best_value = 0.0;
    for (const AlphaProfileEntry& e : entries) {
        if (e.log_l_log && (!best || *e.log_l_log > best_value)) {
            best = e.alpha;
            best_value = *e.log_l_log;
        }
    }
    return best;
}

const AlphaProfileEntry* AlphaProfile::find(double alpha, double tol) const {
    for (const AlphaProfileEntry& e : entries) {
        if (std::fabs(e.alpha - alpha) <= tol) return &e;
    }
    return nullptr;
}

AlphaProfile alpha_profile(const Eigen::VectorXd& z, const std::vector<double>& alpha_grid,
                           const TrendModel& model, const ProfileConfig& config) {
    if (alpha_grid.empty()) throw std::invalid_argument("alpha_profile: empty grid");
    for (size_t i = 0; i < alpha_grid.size(); ++i) {
        if (!(alpha_grid[i] >= 0.0 && alpha_grid[i] <= 1.0)) {
            throw std::invalid_argument("alpha_profile: grid values must lie in [0,1]");
        }
        if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) {
            throw std::invalid_argument("alpha_profile: grid must be strictly increasing");
        }
    }

    AlphaProfile profile;
    profile.entries.resize(alpha_grid.size());

    parallel_for(alpha_grid.size(), [&](std::size_t i) {
        AlphaProfileEntry& entry = profile.entries[i];
        entry.alpha = alpha_grid[i];
        try {
            McmcConfig mcmc = config.mcmc;
            mcmc.seed = mix64(config.mcmc.seed) ^ mix64(i + 1);
            entry.draws = sample_posterior(z, entry.alpha, model, mcmc, config.posterior);
            entry.log_l_log = log_l_log(z, entry.alpha, entry.draws.draws, model,
                                        config.posterior.jitter);
            if (config.map_starts > 0) {
                const auto map = find_map(z, entry.alpha, model, config.map_starts, mcmc.seed,
                                          config.posterior);
                if (map) {
                    entry.log_l_map = map->log_lik;
                    entry.map_theta = map->theta;
                }
            }
        } catch (const std::exception& err) {
            entry.log_l_log.reset();
            entry.log_l_map.reset();
            entry.map_theta.reset();
            entry.draws = ThetaDraws{};
            entry.note = err.what();
        }
    }, config.exec);

    return profile;
}

GapStats heuristic_gap(const std::vector<AlphaProfileEntry>& window, int r) {
    GapStats stats;
    stats.predicted = 0.5 * r;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const AlphaProfileEntry& e : window) {
        if (e.log_l_log && e.log_l_map) {
            const double gap = *e.log_l_map - *e.log_l_log;
            sum += gap;
            sum_sq += gap * gap;
            ++stats.points;
        }
    }
    if (stats.points < 5) {
        throw std::invalid_argument("heuristic_gap: needs at least 5 grid points with both "
                                    "pseudo-likelihoods, got " + std::to_string(stats.points));
    }
    stats.mean = sum / stats.points;
    stats.sd = std::sqrt(std::max(0.0, sum_sq / stats.points - stats.mean * stats.mean));
    return stats;
}

std::vector<double> make_alpha_grid(double start, double stop, double step) {
    if (!(step > 0.0) || stop < start) {
        throw std::invalid_argument("make_alpha_grid: invalid grid spec");
    }
    std::vector<double> grid;
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    grid.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        // snap accumulated values (0.1 + 0.1 + ...) back onto tidy decimals
        grid.push_back(std::round((start + i * step) * 1e12) / 1e12);
    }
    return grid;
}

}  // namespace tgk
