#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <variant>
#include <vector>

#include "tgk/parallel.hpp"
#include "tgk/predict.hpp"
#include "tgk/profile.hpp"

namespace tgk {

// Physical-unit marginals of the nuisance parameters. The model itself works
// on the unit cube; these map physical values to probability coordinates and
// back (probability integral transform).
struct UniformMarginal {
    double lo, hi;
};
struct NormalMarginal {
    double mean, variance;
};
// Normal truncated at zero, support [0, inf).
struct TruncatedNormalAtZeroMarginal {
    double mean, variance;
};

using Marginal = std::variant<UniformMarginal, NormalMarginal, TruncatedNormalAtZeroMarginal>;

double to_unit(const Marginal& marginal, double physical);
double from_unit(const Marginal& marginal, double u);

struct NuisanceDistribution {
    std::vector<Marginal> marginals;  // r - 1 entries, mutually independent
};

// n i.i.d. points in (0,1)^{r-1}: in unit coordinates the nuisance vector is
// uniform by construction. Deterministic under the seed.
Eigen::MatrixXd sample_nuisance(const NuisanceDistribution& dist, int n, std::uint64_t seed);

struct PodCurve {
    Eigen::VectorXd a_grid;
    Eigen::VectorXd pod_mean;
    std::vector<double> gammas;
    std::vector<Eigen::VectorXd> pod_gamma;  // one vector per gamma, aligned with a_grid
    int n_mc = 0;
    std::uint64_t seed = 0;
};

struct PodOptions {
    double a_step = 0.01;
    int n_mc = 1000;
    std::uint64_t seed = 0;
    // One shared nuisance sample across the whole a grid instead of a fresh
    // substream per grid point; useful for variance-reduced comparisons.
    bool common_random_numbers = false;
    double jitter = 0.0;
    TailOptions tail{};
    Exec exec = Exec::Parallel;
};

// POD curves for a fitted model at fixed alpha: for every a on the grid,
// n_mc nuisance draws (substream indexed by the grid position), SAFE for
// each via the predictive mixture, then the mean and the gamma-level counts.
PodCurve pod_curves(const TrendModel& model, const Eigen::VectorXd& z, double alpha,
                    const std::vector<Eigen::VectorXd>& draws, double s,
                    const std::vector<double>& gammas, const PodOptions& opt);

// Posterior-averaged-alpha POD: weights proportional to exp(log L^LOG) under
// a uniform prior on the grid (rectangle rule), restricted to the smallest
// contiguous window holding at least mass_cutoff of the mass. SAFE values
// are the weighted averages of the per-alpha SAFE values, on shared nuisance
// substreams so the fixed-alpha and averaged curves are comparable. A window
// that degenerates to a single point falls back to the fixed-alpha curve and
// sets *degenerate.
PodCurve pod_integrated_alpha(const TrendModel& model, const Eigen::VectorXd& z,
                              const AlphaProfile& profile, double s,
                              const std::vector<double>& gammas, double mass_cutoff,
                              const PodOptions& opt, bool* degenerate = nullptr);

}  // namespace tgk
