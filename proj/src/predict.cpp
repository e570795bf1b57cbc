#include "tgk/predict.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tgk/distributions.hpp"
#include "tgk/errors.hpp"
#include "tgk/kernel.hpp"
#include "tgk/linalg.hpp"
#include "tgk/transform.hpp"

namespace tgk {

namespace {

void check_query_point(const Eigen::VectorXd& x0, int r) {
    if (x0.size() != r) throw std::invalid_argument("predict: query point dimension mismatch");
    for (int k = 0; k < r; ++k) {
        if (!(x0[k] >= 0.0 && x0[k] <= 1.0)) {
            throw std::invalid_argument("predict: query coordinate " + std::to_string(k) +
                                        " outside [0,1]; the model does not extrapolate");
        }
    }
}

double nonnegative_scale_sq(double s2) {
    if (s2 < -1e-8) {
        throw std::runtime_error("predict: predictive variance came out negative (" +
                                 std::to_string(s2) + ")");
    }
    return s2 > 0.0 ? s2 : 0.0;
}

// The variance factor 1 - b'b + u'A^{-1}u is exactly zero at design points;
// what survives there is cancellation noise of order eps * (terms), so
// anything below the floor is snapped to the exact value.
double cancellation_floor(double factor, double magnitude) {
    return factor < 1e-12 * magnitude ? 0.0 : factor;
}

Eigen::MatrixXd correlation_with_jitter(const TrendModel& model, const Eigen::VectorXd& theta,
                                        double jitter) {
    Eigen::MatrixXd corr = correlation_matrix(model.design.points(), theta, Exec::Serial);
    if (jitter > 0.0) corr.diagonal().array() += jitter;
    return corr;
}

}  // namespace

StudentTPredictive predictive_at(const Eigen::VectorXd& y_t, const Eigen::VectorXd& theta,
                                 const TrendModel& model, const Eigen::VectorXd& x0,
                                 double jitter) {
    const int n = model.n();
    const int p = model.p();
    check_query_point(x0, model.r());
    if (y_t.size() != n) throw std::invalid_argument("predictive_at: observation size mismatch");

    // A query at an observed site has the exact predictive (y_i, 0); the
    // generic path below only reaches it up to conditioning-limited roundoff.
    for (int i = 0; i < n; ++i) {
        if ((model.design.points().row(i).transpose() - x0).cwiseAbs().maxCoeff() == 0.0) {
            return StudentTPredictive{n - p, y_t[i], 0.0};
        }
    }

    const CholeskyFactor chol = cholesky(correlation_with_jitter(model, theta, jitter),
                                         "correlation matrix");
    const Eigen::MatrixXd v = chol.solve(model.H);
    Eigen::MatrixXd a(p, p);
    a.noalias() = model.H.transpose() * v;
    const CholeskyFactor chol_a = cholesky(a, "trend normal matrix");
    const Eigen::VectorXd beta = chol_a.solve(Eigen::VectorXd(v.transpose() * y_t));
    const Eigen::VectorXd resid = y_t - model.H * beta;
    const Eigen::VectorXd half_resid = chol.half_solve(resid);
    const double q2 = half_resid.squaredNorm();

    const Eigen::VectorXd s0 = cross_correlation(model.design.points(), x0, theta);
    const Eigen::VectorXd half_s0 = chol.half_solve(s0);
    const Eigen::RowVectorXd h0 = basis_row(model.basis, x0);
    const Eigen::VectorXd u = h0.transpose() - v.transpose() * s0;

    StudentTPredictive out;
    out.dof = n - p;
    out.location = h0 * beta + half_s0.dot(half_resid);
    const double trend_term = chol_a.half_solve(u).squaredNorm();
    const double factor = cancellation_floor(1.0 - half_s0.squaredNorm() + trend_term,
                                             1.0 + half_s0.squaredNorm() + trend_term);
    out.scale = std::sqrt(nonnegative_scale_sq(q2 / out.dof * factor));
    return out;
}

StudentTPredictive predictive_at_projected(const Eigen::VectorXd& y_t,
                                           const Eigen::VectorXd& theta, const TrendModel& model,
                                           const Eigen::VectorXd& x0, double jitter) {
    const int n = model.n();
    const int p = model.p();
    check_query_point(x0, model.r());

    const Eigen::MatrixXd corr = correlation_with_jitter(model, theta, jitter);
    Eigen::MatrixXd projected(n - p, n - p);
    projected.noalias() = model.W.transpose() * corr * model.W;
    const CholeskyFactor chol = cholesky(projected, "projected correlation matrix");

    const Eigen::VectorXd half_y = chol.half_solve(Eigen::VectorXd(model.W.transpose() * y_t));
    const double q2 = half_y.squaredNorm();

    const Eigen::VectorXd s0 = cross_correlation(model.design.points(), x0, theta);
    const Eigen::RowVectorXd h0 = basis_row(model.basis, x0);
    // Row of basis values expressed against the orthonormalized trend.
    const Eigen::MatrixXd pth = model.P.transpose() * model.H;  // upper triangular
    const Eigen::RowVectorXd h0_ortho =
        pth.transpose().triangularView<Eigen::Lower>().solve(h0.transpose()).transpose();

    const double trend_value = h0_ortho * (model.P.transpose() * y_t);
    const Eigen::RowVectorXd correction_row =
        h0_ortho * (model.P.transpose() * corr) - s0.transpose();
    const Eigen::VectorXd half_c =
        chol.half_solve(Eigen::VectorXd(model.W.transpose() * correction_row.transpose()));

    const double prior_var = 1.0 + h0_ortho * (model.P.transpose() * corr * model.P) *
                                       h0_ortho.transpose() -
                             2.0 * h0_ortho * (model.P.transpose() * s0);

    StudentTPredictive out;
    out.dof = n - p;
    out.location = trend_value - half_c.dot(half_y);
    const double factor = cancellation_floor(prior_var - half_c.squaredNorm(),
                                             std::fabs(prior_var) + half_c.squaredNorm());
    out.scale = std::sqrt(nonnegative_scale_sq(q2 / out.dof * factor));
    return out;
}

PredictiveMixture predictive_mixture(const Eigen::VectorXd& z, double alpha,
                                     const std::vector<Eigen::VectorXd>& draws,
                                     const TrendModel& model, const Eigen::VectorXd& x0,
                                     double jitter, int* skipped, double skip_limit) {
    if (draws.empty()) throw std::invalid_argument("predictive_mixture: no theta draws");
    const TransformedObs t = transform_observations(alpha, z);
    PredictiveMixture mix;
    mix.alpha = alpha;
    int dropped = 0;
    for (const Eigen::VectorXd& theta : draws) {
        try {
            mix.components.push_back(predictive_at(t.values, theta, model, x0, jitter));
        } catch (const IllConditionedError&) {
            ++dropped;
        }
    }
    if (skipped != nullptr) *skipped = dropped;
    if (dropped > skip_limit * static_cast<double>(draws.size())) {
        throw std::runtime_error("predictive_mixture: " + std::to_string(dropped) + " of " +
                                 std::to_string(draws.size()) + " draws were ill-conditioned");
    }
    return mix;
}

double component_survival(const StudentTPredictive& c, double threshold_t,
                          const TailOptions& tail) {
    if (c.scale == 0.0) {
        if (c.location > threshold_t) return 1.0;
        if (c.location < threshold_t) return 0.0;
        return 0.5;
    }
    const double standardized = (threshold_t - c.location) / c.scale;
    if (tail.normal_approx && c.dof >= tail.dof_threshold) {
        return 1.0 - normal_cdf(standardized);
    }
    return student_t_survival(c.dof, standardized);
}

double safe_prob(const PredictiveMixture& mixture, double s, const TailOptions& tail) {
    if (!(s > 0.0)) throw std::invalid_argument("safe_prob: threshold must be positive");
    if (mixture.components.empty()) throw std::invalid_argument("safe_prob: empty mixture");
    const double threshold_t = sinh_log(mixture.alpha, s);
    double sum = 0.0;
    for (const StudentTPredictive& c : mixture.components) {
        sum += component_survival(c, threshold_t, tail);
    }
    return sum / static_cast<double>(mixture.components.size());
}

// ---------------------------------------------------------------------------
// BatchPredictor
// ---------------------------------------------------------------------------

BatchPredictor::BatchPredictor(const Eigen::VectorXd& y_t,
                               const std::vector<Eigen::VectorXd>& draws,
                               const TrendModel& model, double jitter, double skip_limit)
    : model_(model), y_t_(y_t), dof_(model.n() - model.p()) {
    if (draws.empty()) throw std::invalid_argument("BatchPredictor: no theta draws");
    states_.reserve(draws.size());
    for (const Eigen::VectorXd& theta : draws) {
        try {
            Eigen::MatrixXd corr = correlation_matrix(model.design.points(), theta, Exec::Serial);
            if (jitter > 0.0) corr.diagonal().array() += jitter;
            CholeskyFactor chol = cholesky(corr, "correlation matrix");
            DrawState st;
            st.theta = theta;
            st.sigma_inv_h = chol.solve(model.H);
            Eigen::MatrixXd a(model.p(), model.p());
            a.noalias() = model.H.transpose() * st.sigma_inv_h;
            CholeskyFactor chol_a = cholesky(a, "trend normal matrix");
            st.beta = chol_a.solve(Eigen::VectorXd(st.sigma_inv_h.transpose() * y_t));
            st.half_resid = chol.half_solve(Eigen::VectorXd(y_t - model.H * st.beta));
            st.q2 = st.half_resid.squaredNorm();
            st.chol_lower = std::move(chol.L);
            st.trend_normal = std::move(chol_a.L);
            states_.push_back(std::move(st));
        } catch (const IllConditionedError&) {
            ++skipped_;
        }
    }
    if (skipped_ > skip_limit * static_cast<double>(draws.size())) {
        throw std::runtime_error("BatchPredictor: " + std::to_string(skipped_) + " of " +
                                 std::to_string(draws.size()) + " draws were ill-conditioned");
    }
}

void BatchPredictor::predict(const Eigen::MatrixXd& points, Eigen::MatrixXd& locations,
                             Eigen::MatrixXd& scales) const {
    const int q = static_cast<int>(points.rows());
    const int n = model_.n();
    const int p = model_.p();
    for (int i = 0; i < q; ++i) check_query_point(points.row(i).transpose(), model_.r());

    // observed-site queries take the exact predictive (theta-independent)
    std::vector<int> design_match(static_cast<size_t>(q), -1);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < n; ++j) {
            if ((model_.design.points().row(j) - points.row(i)).cwiseAbs().maxCoeff() == 0.0) {
                design_match[static_cast<size_t>(i)] = j;
                break;
            }
        }
    }

    Eigen::MatrixXd h0(q, p);
    for (int i = 0; i < q; ++i) h0.row(i) = basis_row(model_.basis, points.row(i).transpose());

    locations.resize(q, components());
    scales.resize(q, components());

    const Eigen::MatrixXd& design = model_.design.points();
    Eigen::MatrixXd d2(n, q);
    Eigen::MatrixXd cross(n, q);
    for (int j = 0; j < components(); ++j) {
        const DrawState& st = states_[static_cast<size_t>(j)];
        d2.setZero();
        for (int k = 0; k < model_.r(); ++k) {
            const double inv_t = 1.0 / st.theta[k];
            d2.noalias() += ((design.col(k) * Eigen::RowVectorXd::Ones(q) -
                              Eigen::VectorXd::Ones(n) * points.col(k).transpose()) *
                             inv_t)
                                .cwiseAbs2();
        }
        matern52_from_scaled_sq(d2, cross);

        const Eigen::MatrixXd half_cross =
            st.chol_lower.triangularView<Eigen::Lower>().solve(cross);
        locations.col(j) = h0 * st.beta + half_cross.transpose() * st.half_resid;

        const Eigen::MatrixXd u = h0.transpose() - st.sigma_inv_h.transpose() * cross;  // p x q
        const Eigen::MatrixXd half_u = st.trend_normal.triangularView<Eigen::Lower>().solve(u);
        const double q2_over_dof = st.q2 / dof_;
        for (int i = 0; i < q; ++i) {
            const double cross_term = half_cross.col(i).squaredNorm();
            const double trend_term = half_u.col(i).squaredNorm();
            const double factor = cancellation_floor(1.0 - cross_term + trend_term,
                                                     1.0 + cross_term + trend_term);
            scales(i, j) = std::sqrt(nonnegative_scale_sq(q2_over_dof * factor));
        }
        for (int i = 0; i < q; ++i) {
            if (design_match[static_cast<size_t>(i)] >= 0) {
                locations(i, j) = y_t_[design_match[static_cast<size_t>(i)]];
                scales(i, j) = 0.0;
            }
        }
    }
}

Eigen::VectorXd BatchPredictor::survival_mean(const Eigen::MatrixXd& points, double threshold_t,
                                              const TailOptions& tail) const {
    Eigen::MatrixXd locations;
    Eigen::MatrixXd scales;
    predict(points, locations, scales);
    Eigen::VectorXd out(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < components(); ++j) {
            StudentTPredictive c{dof_, locations(i, j), scales(i, j)};
            sum += component_survival(c, threshold_t, tail);
        }
        out[i] = sum / components();
    }
    return out;
}

}  // namespace tgk
