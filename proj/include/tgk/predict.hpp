#pragma once

#include <Eigen/Core>
#include <vector>

#include "tgk/design.hpp"

namespace tgk {

// Predictive law of the transformed output at one point for fixed theta,
// with beta and sigma2 marginalized under the 1/sigma2 prior: a
// non-standardized Student t with n - p degrees of freedom. scale is zero
// exactly at design points (the model interpolates).
struct StudentTPredictive {
    int dof;
    double location;  // transformed-output units
    double scale;     // transformed-output units
};

// Generalized-least-squares route (the authoritative formula):
//   beta_hat = (H'S^{-1}H)^{-1} H'S^{-1} y,  q2 = (y-H beta_hat)'S^{-1}(y-H beta_hat),
//   location = h0' beta_hat + s0' S^{-1} (y - H beta_hat),
//   scale^2  = q2/(n-p) * (1 - s0'S^{-1}s0 + u'(H'S^{-1}H)^{-1}u),  u = h0 - H'S^{-1}s0.
// q2 equals the projected form y'W(W'SW)^{-1}W'y; the tests hold the two
// routes together at 1e-9 relative.
StudentTPredictive predictive_at(const Eigen::VectorXd& y_t, const Eigen::VectorXd& theta,
                                 const TrendModel& model, const Eigen::VectorXd& x0,
                                 double jitter = 0.0);

// Orthonormalized-basis cross-check of predictive_at. The source this form
// was taken from inserts a factor "(P W)" in the definition of the
// correction row that has incompatible inner dimensions as printed; dropping
// the factor makes the formula coherent and, as the tests verify, exactly
// equal to the GLS route. Kept as a second algebraic path, not used in
// production.
StudentTPredictive predictive_at_projected(const Eigen::VectorXd& y_t,
                                           const Eigen::VectorXd& theta, const TrendModel& model,
                                           const Eigen::VectorXd& x0, double jitter = 0.0);

// Equal-weight mixture of per-draw predictives on the transformed scale.
struct PredictiveMixture {
    std::vector<StudentTPredictive> components;
    double alpha = 0.0;
};

// One component per theta draw applied to the sinh_log transform of z.
// Ill-conditioned draws are skipped and counted; more than skip_limit of
// them is an error.
PredictiveMixture predictive_mixture(const Eigen::VectorXd& z, double alpha,
                                     const std::vector<Eigen::VectorXd>& draws,
                                     const TrendModel& model, const Eigen::VectorXd& x0,
                                     double jitter = 0.0, int* skipped = nullptr,
                                     double skip_limit = 0.2);

struct TailOptions {
    // The exact Student tail is always available; the normal approximation
    // for large dof only applies when explicitly enabled here.
    bool normal_approx = false;
    double dof_threshold = 200.0;
};

double component_survival(const StudentTPredictive& c, double threshold_t,
                          const TailOptions& tail = {});

// SAFE(a, x): mixture probability that the raw output exceeds the detection
// threshold s; monotonicity of the transform turns it into Student tails at
// the transformed threshold.
double safe_prob(const PredictiveMixture& mixture, double s, const TailOptions& tail = {});

// Batch predictor: per-draw factorizations computed once and reused across
// many query points. Backbone of the POD grid loops.
class BatchPredictor {
public:
    BatchPredictor(const Eigen::VectorXd& y_t, const std::vector<Eigen::VectorXd>& draws,
                   const TrendModel& model, double jitter = 0.0, double skip_limit = 0.2);

    int components() const { return static_cast<int>(states_.size()); }
    int skipped() const { return skipped_; }
    int dof() const { return dof_; }

    // locations/scales get one row per query point, one column per kept draw.
    void predict(const Eigen::MatrixXd& points, Eigen::MatrixXd& locations,
                 Eigen::MatrixXd& scales) const;

    // Mean over components of P(T > threshold_t) for every query point.
    Eigen::VectorXd survival_mean(const Eigen::MatrixXd& points, double threshold_t,
                                  const TailOptions& tail = {}) const;

private:
    struct DrawState {
        Eigen::VectorXd theta;
        Eigen::MatrixXd chol_lower;     // L of Sigma
        Eigen::MatrixXd sigma_inv_h;    // Sigma^{-1} H
        Eigen::MatrixXd trend_normal;   // (H'Sigma^{-1}H) Cholesky lower factor
        Eigen::VectorXd beta;
        Eigen::VectorXd half_resid;     // L^{-1}(y - H beta)
        double q2;
    };

    const TrendModel& model_;
    Eigen::VectorXd y_t_;
    std::vector<DrawState> states_;
    int skipped_ = 0;
    int dof_ = 0;
};

}  // namespace tgk
