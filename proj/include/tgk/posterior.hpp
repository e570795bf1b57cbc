#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tgk/design.hpp"
#include "tgk/kernel.hpp"

namespace tgk {

// Which Fisher information is used for the Jeffreys-rule prior. Projected is
// I_ij = (1/2) tr(Q_i Q_j) with Q_k = (W'Sigma W)^{-1} W' dSigma/dtheta_k W,
// the information of the W-projected Gaussian model. Sigma2Integrated
// subtracts the tr(Q_i) tr(Q_j) / (n-p) cross term, which is the information
// after sigma2 is also marginalized. Both are supported; Projected is the
// default.
enum class FisherVariant { Projected, Sigma2Integrated };

struct PosteriorOptions {
    double jitter = 0.0;
    FisherVariant fisher = FisherVariant::Projected;
    bool flat_prior = false;  // diagnostic toggle: drop the Jeffreys factor
};

Eigen::MatrixXd fisher_information(const Eigen::VectorXd& theta, const TrendModel& model,
                                   FisherVariant variant = FisherVariant::Projected,
                                   double jitter = 0.0);

// (1/2) log det of the Fisher information; unnormalized. Throws
// SingularPriorError when the smallest eigenvalue is <= 1e-12.
double log_jeffreys_prior(const Eigen::VectorXd& theta, const TrendModel& model,
                          FisherVariant variant = FisherVariant::Projected,
                          double jitter = 0.0);

// Unnormalized log posterior density of theta (a density in theta itself):
// transformed integrated log-likelihood plus the Jeffreys log-prior.
double log_posterior(const Eigen::VectorXd& z, const Eigen::VectorXd& theta, double alpha,
                     const TrendModel& model, const PosteriorOptions& opt = {});

// Fused per-(z, alpha) evaluator for the samplers and optimizers. One
// Cholesky of Sigma per call serves the likelihood (via the determinant
// identity |W'Sigma W| = |Sigma| |H'Sigma^{-1}H| / |H'H| and the GLS residual
// form of the quadratic), the Jeffreys prior and the gradient projections.
// Agrees with the reference log_posterior to conditioning-limited roundoff;
// the tests pin the two paths together at 1e-8 relative.
class PosteriorEvaluator {
public:
    PosteriorEvaluator(const Eigen::VectorXd& z, double alpha, const TrendModel& model,
                       const PosteriorOptions& opt = {});
    ~PosteriorEvaluator();

    PosteriorEvaluator(const PosteriorEvaluator&) = delete;
    PosteriorEvaluator& operator=(const PosteriorEvaluator&) = delete;

    double log_lik(const Eigen::VectorXd& theta) const;   // integrated, transformed
    double log_post(const Eigen::VectorXd& theta) const;  // + Jeffreys prior

    const TrendModel& model() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct MapEstimate {
    Eigen::VectorXd theta;
    double log_post;
    double log_lik;  // transformed integrated log-likelihood at theta
};

// MAP of the theta posterior by multi-start Nelder-Mead in log theta inside
// the box theta in [0.05, 20]^r. Returns nothing when fewer than two starts
// converge or the two best terminal objectives disagree by more than 1e-4
// (the unreliable-MAP case the alpha profile records as absent).
std::optional<MapEstimate> find_map(const Eigen::VectorXd& z, double alpha,
                                    const TrendModel& model, int n_starts, std::uint64_t seed,
                                    const PosteriorOptions& opt = {});

// Coordinate space the random-walk proposals live in. LogTheta is the
// production setting; Theta exists to check that posterior expectations do
// not depend on the parametrization.
enum class ProposalSpace { LogTheta, Theta };

struct McmcConfig {
    int n_iterations = 9000;  // post burn-in sweeps
    int thin = 90;            // keep one sweep in `thin`
    int burn_in = 1000;       // adaptation happens here, then freezes
    std::uint64_t seed = 0;
    ProposalSpace space = ProposalSpace::LogTheta;
};

struct ThetaDraws {
    double alpha = 0.0;
    std::vector<Eigen::VectorXd> draws;
    int n_iterations = 0;
    int thin = 0;
    int burn_in = 0;
    std::uint64_t seed = 0;
    Eigen::VectorXd acceptance_rates;  // per coordinate, post burn-in
    std::vector<std::string> warnings;
};

// Core adaptive component-at-a-time random-walk Metropolis kernel, exposed
// so tests can run it against analytic targets. Proposals are Gaussian per
// coordinate; step sizes adapt towards acceptance 0.44 during burn-in, then
// freeze. Keeps every `thin`-th post burn-in sweep. -inf from the target
// rejects the proposal.
struct ChainResult {
    std::vector<Eigen::VectorXd> draws;
    Eigen::VectorXd acceptance_rates;
};

ChainResult run_random_walk(const std::function<double(const Eigen::VectorXd&)>& log_target,
                            const Eigen::VectorXd& start, int n_iterations, int thin,
                            int burn_in, std::uint64_t seed);

// Component-at-a-time random-walk Metropolis targeting the theta posterior.
// Proposals are Gaussian in log theta_k (including the volume Jacobian, so
// the stationary law is the posterior as a density in theta); step sizes are
// adapted towards acceptance 0.44 during burn-in and frozen afterwards.
// Deterministic given the seed. With n_iterations = 9000 and thin = 90 the
// sample has exactly 100 draws.
ThetaDraws sample_posterior(const Eigen::VectorXd& z, double alpha, const TrendModel& model,
                            const McmcConfig& config, const PosteriorOptions& opt = {});

}  // namespace tgk
