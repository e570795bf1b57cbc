#pragma once

// Shared test machinery: independent oracles (dense likelihood evaluation,
// nested adaptive quadrature, finite differences, Kolmogorov-Smirnov) and
// random instance generators. Everything here deliberately avoids the
// library's Cholesky/projection code paths so the oracles stay independent
// of what they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tgk/design.hpp"
#include "tgk/kernel.hpp"
#include "tgk/rng.hpp"

namespace tgk_test {

inline tgk::DesignSet random_design(int n, int r, tgk::Rng& rng) {
    Eigen::MatrixXd pts(n, r);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < r; ++k) pts(i, k) = rng.uniform();
    }
    return tgk::DesignSet(std::move(pts));
}

inline Eigen::VectorXd random_theta(int r, tgk::Rng& rng, double lo = 0.2, double hi = 2.0) {
    Eigen::VectorXd theta(r);
    for (int k = 0; k < r; ++k) theta[k] = rng.uniform(lo, hi);
    return theta;
}

inline Eigen::VectorXd random_vector(int n, tgk::Rng& rng, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * rng.normal();
    return v;
}

// Random orthogonal matrix from the QR of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(int m, tgk::Rng& rng) {
    Eigen::MatrixXd g(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) g(i, j) = rng.normal();
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

// Dense evaluation of the full Gaussian log-likelihood with explicit inverse
// and determinant; no factorization reuse.
inline double naive_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                                   double sigma2, const Eigen::MatrixXd& h,
                                   const Eigen::MatrixXd& corr) {
    const int n = static_cast<int>(y.size());
    const Eigen::VectorXd resid = y - h * beta;
    const double quad = resid.dot(corr.inverse() * resid);
    return -0.5 * n * std::log(2.0 * M_PI * sigma2) - 0.5 * std::log(corr.determinant()) -
           0.5 * quad / sigma2;
}

// One-dimensional adaptive Simpson quadrature.
namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 40) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson(f, a, b, fa, fm, fb, whole, tol, depth);
}

// log of the double integral over beta in R^p (p = 1 only) and sigma2 in
// (0,inf) of the full likelihood times the 1/sigma2 prior, by nested
// adaptive quadrature in (beta, log sigma2). Integration ranges are located
// by scanning the integrand itself.
inline double quadrature_integrated_log_lik(const Eigen::VectorXd& y, const Eigen::MatrixXd& h,
                                            const Eigen::MatrixXd& corr) {
    if (h.cols() != 1) throw std::invalid_argument("quadrature oracle supports p = 1 only");

    // The substitution sigma2 = e^u makes the prior factor cancel:
    // integral f/sigma2 dsigma2 = integral f du.
    const auto log_joint = [&](double beta, double u) {
        return naive_log_likelihood(y, Eigen::VectorXd::Constant(1, beta), std::exp(u), h, corr);
    };

    // Coarse peak scan.
    double best = -std::numeric_limits<double>::infinity();
    double beta_star = 0.0;
    double u_star = 0.0;
    const double y_scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    for (int ib = -40; ib <= 40; ++ib) {
        for (int iu = -40; iu <= 20; ++iu) {
            const double beta = y_scale * ib / 10.0;
            const double u = iu / 4.0;
            const double v = log_joint(beta, u);
            if (v > best) {
                best = v;
                beta_star = beta;
                u_star = u;
            }
        }
    }
    // Local refinement by coordinate descent on a shrinking grid.
    double step_b = y_scale / 10.0;
    double step_u = 0.25;
    for (int it = 0; it < 60; ++it) {
        bool moved = false;
        for (const double db : {-step_b, step_b}) {
            if (log_joint(beta_star + db, u_star) > best) {
                best = log_joint(beta_star + db, u_star);
                beta_star += db;
                moved = true;
            }
        }
        for (const double du : {-step_u, step_u}) {
            if (log_joint(beta_star, u_star + du) > best) {
                best = log_joint(beta_star, u_star + du);
                u_star += du;
                moved = true;
            }
        }
        if (!moved) {
            step_b *= 0.5;
            step_u *= 0.5;
        }
        if (step_b < 1e-8 * y_scale && step_u < 1e-8) break;
    }
    const double shift = best;

    const auto inner = [&](double u) {
        // Width search: expand until the integrand is negligible at the ends.
        double w = 1e-3 * y_scale + std::exp(0.5 * u);
        while (log_joint(beta_star - w, u) - shift > -60.0 ||
               log_joint(beta_star + w, u) - shift > -60.0) {
            w *= 2.0;
            if (w > 1e12) break;
        }
        const auto f = [&](double beta) { return std::exp(log_joint(beta, u) - shift); };
        return adaptive_simpson(f, beta_star - w, beta_star + w, 1e-10);
    };

    double lo = u_star - 2.0;
    double hi = u_star + 2.0;
    while (inner(lo) > 1e-26) lo -= 2.0;
    while (inner(hi) > 1e-26) hi += 2.0;
    const double integral = adaptive_simpson(inner, lo, hi, 1e-9);
    return std::log(integral) + shift;
}

// Kolmogorov-Smirnov distance between a sample and a CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

inline MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd out;
    for (double x : v) out.mean += x;
    out.mean /= static_cast<double>(v.size());
    for (double x : v) out.sd += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(out.sd / static_cast<double>(v.size()));
    return out;
}

}  // namespace tgk_test
