#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "tgk/config.hpp"
#include "tgk/design.hpp"
#include "tgk/pod.hpp"
#include "tgk/profile.hpp"

namespace tgk {

// Space-filling design: Latin hypercube with within-stratum jitter, best of
// `candidates` random layouts by the maximin criterion. Deterministic under
// the seed. Needs n >= 2.
DesignSet generate_design(int n, int r, std::uint64_t seed, int candidates = 50);

// Draws y ~ N(H beta, sigma2 * Sigma_theta) and returns the raw outputs
// z = C_alpha^{-1}(y), which are positive by construction.
Eigen::VectorXd simulate_truth(const DesignSet& design, TrendBasis basis,
                               const SyntheticTruth& truth);

// --- file formats -----------------------------------------------------------

void save_design(const std::string& path, const DesignSet& design);
DesignSet load_design(const std::string& path);

void save_observations(const std::string& path, const DesignSet& design,
                       const Eigen::VectorXd& z);
std::pair<DesignSet, Eigen::VectorXd> load_observations(const std::string& path);

void save_alpha_profile(const std::string& path, const AlphaProfile& profile);
void save_theta_draws(const std::string& dir, const ThetaDraws& draws);
ThetaDraws load_theta_draws(const std::string& dir, double alpha);

// Reads alpha_profile.csv and the per-alpha draw files back into a profile
// (values only; MCMC provenance fields are filled from the files present).
AlphaProfile load_alpha_profile(const std::string& dir);

void save_pod_curve(const std::string& path, const PodCurve& curve);

void save_predictions(const std::string& path, const Eigen::MatrixXd& points,
                      const Eigen::VectorXd& location, const Eigen::VectorXd& scale,
                      const Eigen::VectorXd& safe);

// --- orchestration ----------------------------------------------------------

struct FitResult {
    AlphaProfile profile;
    std::optional<double> alpha_hat;
};

// Full alpha scan; persists alpha_profile.csv and theta_draws_<alpha>.csv
// under out_dir (also when the scan ends with every entry failed).
FitResult run_fit(const RunConfig& config, const DesignSet& design, const Eigen::VectorXd& z,
                  const std::string& out_dir, Exec exec = Exec::Parallel);

// POD curves for the fitted state: pod_curve.csv at the fixed alpha_hat and,
// when `integrated`, pod_curve_integrated.csv from the posterior-averaged
// alpha. Both share the same seed so the curves are comparable.
void run_pod(const RunConfig& config, const DesignSet& design, const Eigen::VectorXd& z,
             const AlphaProfile& profile, const std::string& out_dir, bool integrated,
             Exec exec = Exec::Parallel);

}  // namespace tgk
