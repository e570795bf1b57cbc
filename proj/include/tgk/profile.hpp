#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "tgk/parallel.hpp"
#include "tgk/posterior.hpp"

namespace tgk {

// One alpha grid point of the pseudo-likelihood scan. log_l_map is absent
// when the MAP search did not meet its convergence contract; a whole entry
// can be absent (both values empty, no draws) when the sampler failed for
// that alpha.
struct AlphaProfileEntry {
    double alpha = 0.0;
    std::optional<double> log_l_log;
    std::optional<double> log_l_map;
    std::optional<Eigen::VectorXd> map_theta;
    ThetaDraws draws;
    std::string note;  // failure reason when the entry is absent
};

struct AlphaProfile {
    std::vector<AlphaProfileEntry> entries;

    // Grid value maximizing log L^LOG; empty when no entry has a value.
    std::optional<double> alpha_hat() const;
    const AlphaProfileEntry* find(double alpha, double tol = 1e-9) const;
};

struct ProfileConfig {
    McmcConfig mcmc;
    PosteriorOptions posterior;
    int map_starts = 6;     // 0 disables the MAP pseudo-likelihood
    Exec exec = Exec::Parallel;
};

// Runs the sampler and both pseudo-likelihoods for every alpha in the grid.
// Per-alpha failures are recorded, not fatal. Each grid point draws its MCMC
// seed from a substream of mcmc.seed indexed by grid position, so results do
// not depend on the execution policy.
AlphaProfile alpha_profile(const Eigen::VectorXd& z, const std::vector<double>& alpha_grid,
                           const TrendModel& model, const ProfileConfig& config);

// Mean and standard deviation of log L^MAP - log L^LOG over the entries
// where both exist; the caller compares the mean against r/2.
struct GapStats {
    double mean = 0.0;
    double sd = 0.0;
    int points = 0;
    double predicted = 0.0;  // r/2
};

GapStats heuristic_gap(const std::vector<AlphaProfileEntry>& window, int r);

// Alpha grid helper: start + i*step up to stop (inclusive within 1e-9).
std::vector<double> make_alpha_grid(double start, double stop, double step);

}  // namespace tgk
