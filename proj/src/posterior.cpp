#include "tgk/posterior.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "tgk/errors.hpp"
#include "tgk/likelihood.hpp"
#include "tgk/linalg.hpp"
#include "tgk/rng.hpp"
#include "tgk/transform.hpp"

namespace tgk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double trace_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a.array() * b.transpose().array()).sum();
}

Eigen::MatrixXd fisher_from_projections(const std::vector<Eigen::MatrixXd>& q,
                                        const Eigen::VectorXd& traces, int m,
                                        FisherVariant variant) {
    const int r = static_cast<int>(q.size());
    Eigen::MatrixXd info(r, r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j <= i; ++j) {
            double v = 0.5 * trace_product(q[static_cast<size_t>(i)], q[static_cast<size_t>(j)]);
            if (variant == FisherVariant::Sigma2Integrated) {
                v -= 0.5 * traces[i] * traces[j] / static_cast<double>(m);
            }
            info(i, j) = v;
            info(j, i) = v;
        }
    }
    return info;
}

double half_log_det_or_throw(const Eigen::MatrixXd& info) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
    if (eig.info() != Eigen::Success) {
        throw SingularPriorError("jeffreys prior: eigendecomposition failed");
    }
    if (eig.eigenvalues().minCoeff() <= 1e-12) {
        throw SingularPriorError("jeffreys prior: Fisher information is singular "
                                 "(an uninformative theta direction)");
    }
    return 0.5 * eig.eigenvalues().array().log().sum();
}

}  // namespace

Eigen::MatrixXd fisher_information(const Eigen::VectorXd& theta, const TrendModel& model,
                                   FisherVariant variant, double jitter) {
    const int r = model.r();
    const int m = model.n() - model.p();
    check_theta(theta, r);

    Eigen::MatrixXd corr = correlation_matrix(model.design.points(), theta, Exec::Serial);
    if (jitter > 0.0) corr.diagonal().array() += jitter;
    Eigen::MatrixXd projected(m, m);
    projected.noalias() = model.W.transpose() * corr * model.W;
    const CholeskyFactor chol = cholesky(projected, "projected correlation matrix");

    std::vector<Eigen::MatrixXd> q;
    q.reserve(static_cast<size_t>(r));
    Eigen::VectorXd traces(r);
    for (int k = 0; k < r; ++k) {
        const Eigen::MatrixXd grad = correlation_matrix_grad(model.design.points(), theta, k);
        Eigen::MatrixXd projected_grad(m, m);
        projected_grad.noalias() = model.W.transpose() * grad * model.W;
        Eigen::MatrixXd qk = chol.solve(projected_grad);
        traces[k] = qk.trace();
        q.push_back(std::move(qk));
    }
    return fisher_from_projections(q, traces, m, variant);
}

double log_jeffreys_prior(const Eigen::VectorXd& theta, const TrendModel& model,
                          FisherVariant variant, double jitter) {
    return half_log_det_or_throw(fisher_information(theta, model, variant, jitter));
}

double log_posterior(const Eigen::VectorXd& z, const Eigen::VectorXd& theta, double alpha,
                     const TrendModel& model, const PosteriorOptions& opt) {
    double value = transformed_integrated_log_likelihood(z, theta, alpha, model, opt.jitter);
    if (!opt.flat_prior) {
        value += log_jeffreys_prior(theta, model, opt.fisher, opt.jitter);
    }
    return value;
}

// ---------------------------------------------------------------------------
// Fused evaluator
// ---------------------------------------------------------------------------

struct PosteriorEvaluator::Impl {
    const TrendModel& model;
    PosteriorOptions opt;
    Eigen::VectorXd y_t;
    double log_jac;
    PairwiseDistances pd;
    double log_det_hth;
    double lik_const;  // data-independent part of the integrated likelihood

    Impl(const Eigen::VectorXd& z, double alpha, const TrendModel& m, const PosteriorOptions& o)
        : model(m), opt(o), pd(m.design.points()) {
        const TransformedObs t = transform_observations(alpha, z);
        y_t = t.values;
        log_jac = t.log_jacobian;
        const Eigen::MatrixXd hth = m.H.transpose() * m.H;
        log_det_hth = cholesky(hth, "H'H").log_det();
        const int dof = m.n() - m.p();
        lik_const = std::lgamma(0.5 * dof) - M_LN2 - 0.5 * dof * std::log(M_PI);
    }

    double eval(const Eigen::VectorXd& theta, bool want_prior) const {
        const int n = model.n();
        const int p = model.p();
        const int m = n - p;

        const Eigen::MatrixXd d2 = pd.scaled_sq(theta);
        Eigen::MatrixXd corr;
        Eigen::MatrixXd grad_factor;
        matern52_from_scaled_sq(d2, corr, want_prior ? &grad_factor : nullptr);
        if (opt.jitter > 0.0) corr.diagonal().array() += opt.jitter;

        const CholeskyFactor chol = cholesky(corr, "correlation matrix");
        Eigen::MatrixXd v = chol.solve(model.H);              // Sigma^{-1} H
        Eigen::MatrixXd a(p, p);
        a.noalias() = model.H.transpose() * v;                // H' Sigma^{-1} H
        const CholeskyFactor chol_a = cholesky(a, "trend normal matrix");
        const Eigen::VectorXd beta = chol_a.solve(Eigen::VectorXd(v.transpose() * y_t));
        const Eigen::VectorXd resid = y_t - model.H * beta;
        const double quad = chol.half_solve(resid).squaredNorm();
        if (!(quad > 0.0)) {
            throw std::runtime_error("posterior: projected quadratic form is not positive");
        }
        // |W'Sigma W| = |Sigma| |H'Sigma^{-1}H| / |H'H|
        const double log_det_proj = chol.log_det() + chol_a.log_det() - log_det_hth;
        double value = lik_const - 0.5 * log_det_proj - 0.5 * m * std::log(quad) + log_jac;

        if (want_prior && !opt.flat_prior) {
            // M = Sigma^{-1} - V A^{-1} V'; tr(Q_i Q_j) = tr(M dSigma_i M dSigma_j)
            const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
            Eigen::MatrixXd proj = chol.solve(identity);
            proj.noalias() -= v * chol_a.solve(Eigen::MatrixXd(v.transpose()));
            std::vector<Eigen::MatrixXd> t;
            t.reserve(static_cast<size_t>(model.r()));
            Eigen::VectorXd traces(model.r());
            for (int k = 0; k < model.r(); ++k) {
                const double inv_t3 = 1.0 / (theta[k] * theta[k] * theta[k]);
                Eigen::MatrixXd tk(n, n);
                tk.noalias() = proj * (grad_factor.cwiseProduct(pd.coord_sq(k)) * inv_t3);
                traces[k] = tk.trace();
                t.push_back(std::move(tk));
            }
            value += half_log_det_or_throw(fisher_from_projections(t, traces, m, opt.fisher));
        }
        return value;
    }
};

PosteriorEvaluator::PosteriorEvaluator(const Eigen::VectorXd& z, double alpha,
                                       const TrendModel& model, const PosteriorOptions& opt)
    : impl_(std::make_unique<Impl>(z, alpha, model, opt)) {}

PosteriorEvaluator::~PosteriorEvaluator() = default;

double PosteriorEvaluator::log_lik(const Eigen::VectorXd& theta) const {
    return impl_->eval(theta, false);
}

double PosteriorEvaluator::log_post(const Eigen::VectorXd& theta) const {
    return impl_->eval(theta, true);
}

const TrendModel& PosteriorEvaluator::model() const { return impl_->model; }

// ---------------------------------------------------------------------------
// MAP search
// ---------------------------------------------------------------------------

namespace {

constexpr double kLogThetaLo = -2.995732273553991;  // log 0.05
constexpr double kLogThetaHi = 2.995732273553991;   // log 20

// Nelder-Mead on f (minimized), hard +inf walls outside the box.
struct SimplexResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
};

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& start, double edge, int max_iter) {
    const int r = static_cast<int>(start.size());
    std::vector<Eigen::VectorXd> xs(static_cast<size_t>(r + 1), start);
    std::vector<double> fs(static_cast<size_t>(r + 1));
    for (int k = 0; k < r; ++k) xs[static_cast<size_t>(k + 1)][k] += edge;
    for (int i = 0; i <= r; ++i) fs[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);

    auto order = [&]() {
        std::vector<int> idx(static_cast<size_t>(r + 1));
        for (int i = 0; i <= r; ++i) idx[static_cast<size_t>(i)] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return fs[static_cast<size_t>(a)] < fs[static_cast<size_t>(b)]; });
        std::vector<Eigen::VectorXd> xs2;
        std::vector<double> fs2;
        for (int i : idx) {
            xs2.push_back(xs[static_cast<size_t>(i)]);
            fs2.push_back(fs[static_cast<size_t>(i)]);
        }
        xs.swap(xs2);
        fs.swap(fs2);
    };

    for (int it = 0; it < max_iter; ++it) {
        order();
        if (std::isfinite(fs[0]) && std::isfinite(fs.back()) &&
            fs.back() - fs[0] < 1e-9 * (1.0 + std::fabs(fs[0]))) {
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(r);
        for (int i = 0; i < r; ++i) centroid += xs[static_cast<size_t>(i)];
        centroid /= static_cast<double>(r);

        const Eigen::VectorXd reflected = centroid + (centroid - xs.back());
        const double fr = f(reflected);
        if (fr < fs[0]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs.back());
            const double fe = f(expanded);
            if (fe < fr) {
                xs.back() = expanded;
                fs.back() = fe;
            } else {
                xs.back() = reflected;
                fs.back() = fr;
            }
            continue;
        }
        if (fr < fs[static_cast<size_t>(r - 1)]) {
            xs.back() = reflected;
            fs.back() = fr;
            continue;
        }
        const Eigen::VectorXd contracted = centroid + 0.5 * (xs.back() - centroid);
        const double fc = f(contracted);
        if (fc < fs.back()) {
            xs.back() = contracted;
            fs.back() = fc;
            continue;
        }
        for (int i = 1; i <= r; ++i) {  // shrink towards the best vertex
            xs[static_cast<size_t>(i)] = xs[0] + 0.5 * (xs[static_cast<size_t>(i)] - xs[0]);
            fs[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);
        }
    }
    order();
    return SimplexResult{xs[0], fs[0]};
}

}  // namespace

std::optional<MapEstimate> find_map(const Eigen::VectorXd& z, double alpha,
                                    const TrendModel& model, int n_starts, std::uint64_t seed,
                                    const PosteriorOptions& opt) {
    if (n_starts < 4) throw std::invalid_argument("find_map: needs at least 4 starts");
    if (model.n() - model.p() < 2) {
        // With a single projected dimension the integrated likelihood is
        // exactly constant in theta (the determinant cancels against the
        // quadratic form), so a MAP would only ever locate the prior mode.
        return std::nullopt;
    }
    const int r = model.r();
    const PosteriorEvaluator ev(z, alpha, model, opt);

    const auto objective = [&](const Eigen::VectorXd& v) -> double {
        for (int k = 0; k < r; ++k) {
            if (v[k] < kLogThetaLo || v[k] > kLogThetaHi) {
                return std::numeric_limits<double>::infinity();
            }
        }
        try {
            const double lp = ev.log_post(v.array().exp());
            return std::isfinite(lp) ? -lp : std::numeric_limits<double>::infinity();
        } catch (const IllConditionedError&) {
        } catch (const SingularPriorError&) {
        } catch (const std::runtime_error&) {
        }
        return std::numeric_limits<double>::infinity();
    };

    // Latin hypercube start points in log theta.
    Rng rng(seed);
    Eigen::MatrixXd starts(n_starts, r);
    for (int k = 0; k < r; ++k) {
        std::vector<int> perm(static_cast<size_t>(n_starts));
        for (int i = 0; i < n_starts; ++i) perm[static_cast<size_t>(i)] = i;
        for (int i = n_starts - 1; i > 0; --i) {
            std::swap(perm[static_cast<size_t>(i)],
                      perm[static_cast<size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
        }
        for (int i = 0; i < n_starts; ++i) {
            const double u = (perm[static_cast<size_t>(i)] + rng.uniform()) / n_starts;
            starts(i, k) = kLogThetaLo + u * (kLogThetaHi - kLogThetaLo);
        }
    }

    std::vector<SimplexResult> results;
    for (int i = 0; i < n_starts; ++i) {
        SimplexResult res = nelder_mead(objective, starts.row(i).transpose(), 0.25, 500 * r);
        if (std::isfinite(res.f)) results.push_back(std::move(res));
    }
    if (results.size() < 2) return std::nullopt;
    std::sort(results.begin(), results.end(),
              [](const SimplexResult& a, const SimplexResult& b) { return a.f < b.f; });
    // Convergence contract: the two best terminal objectives must agree.
    if (results[1].f - results[0].f > 1e-4) return std::nullopt;

    MapEstimate est;
    est.theta = results[0].x.array().exp();
    est.log_post = -results[0].f;
    est.log_lik = ev.log_lik(est.theta);
    return est;
}

// ---------------------------------------------------------------------------
// Sampler
// ---------------------------------------------------------------------------

ChainResult run_random_walk(const std::function<double(const Eigen::VectorXd&)>& log_target,
                            const Eigen::VectorXd& start, int n_iterations, int thin,
                            int burn_in, std::uint64_t seed) {
    if (n_iterations < 1 || thin < 1 || burn_in < 0) {
        throw std::invalid_argument("run_random_walk: invalid schedule");
    }
    if (n_iterations % thin != 0) {
        throw std::invalid_argument("run_random_walk: n_iterations must be a multiple of thin");
    }
    const int r = static_cast<int>(start.size());
    Rng rng(seed);

    Eigen::VectorXd u = start;
    double lp = log_target(u);
    if (!std::isfinite(lp)) {
        throw std::invalid_argument("run_random_walk: start point has zero density");
    }

    Eigen::VectorXd step = Eigen::VectorXd::Constant(r, 0.5);
    Eigen::VectorXi batch_accepts = Eigen::VectorXi::Zero(r);
    Eigen::VectorXi post_accepts = Eigen::VectorXi::Zero(r);
    const int adapt_batch = 50;
    int batch_number = 0;

    ChainResult out;
    out.draws.reserve(static_cast<size_t>(n_iterations / thin));

    const int total = burn_in + n_iterations;
    for (int sweep = 1; sweep <= total; ++sweep) {
        for (int k = 0; k < r; ++k) {
            const double eps = step[k] * rng.normal();
            Eigen::VectorXd cand = u;
            cand[k] += eps;
            const double lp_cand = log_target(cand);
            if (std::log(rng.uniform()) < lp_cand - lp) {
                u = cand;
                lp = lp_cand;
                if (sweep <= burn_in) {
                    ++batch_accepts[k];
                } else {
                    ++post_accepts[k];
                }
            }
        }
        if (sweep <= burn_in && sweep % adapt_batch == 0) {
            ++batch_number;
            const double delta = std::min(0.5, 2.0 / std::sqrt(static_cast<double>(batch_number)));
            for (int k = 0; k < r; ++k) {
                const double rate = batch_accepts[k] / static_cast<double>(adapt_batch);
                step[k] *= std::exp(delta * (rate - 0.44));
                step[k] = std::clamp(step[k], 1e-3, 10.0);
            }
            batch_accepts.setZero();
        }
        if (sweep > burn_in && (sweep - burn_in) % thin == 0) {
            out.draws.push_back(u);
        }
    }
    out.acceptance_rates = post_accepts.cast<double>() / static_cast<double>(n_iterations);
    return out;
}

ThetaDraws sample_posterior(const Eigen::VectorXd& z, double alpha, const TrendModel& model,
                            const McmcConfig& config, const PosteriorOptions& opt) {
    const int r = model.r();
    const PosteriorEvaluator ev(z, alpha, model, opt);
    const bool log_space = config.space == ProposalSpace::LogTheta;

    // Log target density in the sampling coordinates; the volume Jacobian in
    // log space keeps the stationary law equal to the posterior on theta.
    const auto target = [&](const Eigen::VectorXd& u) -> double {
        Eigen::VectorXd theta = log_space ? u.array().exp().matrix() : u;
        if (!log_space) {
            for (int k = 0; k < r; ++k) {
                if (!(theta[k] > 0.0)) return kNegInf;
            }
        }
        try {
            double lp = ev.log_post(theta);
            if (log_space) lp += u.sum();
            return std::isfinite(lp) ? lp : kNegInf;
        } catch (const IllConditionedError&) {
        } catch (const SingularPriorError&) {
        } catch (const std::runtime_error&) {
        }
        return kNegInf;
    };

    // Starting point: theta = 1, with a deterministic fallback ladder.
    Eigen::VectorXd start;
    bool found = false;
    for (const double c : {1.0, 0.5, 2.0, 0.25, 4.0, 0.1}) {
        Eigen::VectorXd theta = Eigen::VectorXd::Constant(r, c);
        Eigen::VectorXd cand = log_space ? theta.array().log().matrix() : theta;
        if (std::isfinite(target(cand))) {
            start = cand;
            found = true;
            break;
        }
    }
    if (!found) throw std::runtime_error("sample_posterior: no valid starting point");

    ChainResult chain = run_random_walk(target, start, config.n_iterations, config.thin,
                                        config.burn_in, config.seed);

    ThetaDraws out;
    out.alpha = alpha;
    out.n_iterations = config.n_iterations;
    out.thin = config.thin;
    out.burn_in = config.burn_in;
    out.seed = config.seed;
    out.acceptance_rates = std::move(chain.acceptance_rates);
    out.draws.reserve(chain.draws.size());
    for (Eigen::VectorXd& u : chain.draws) {
        out.draws.push_back(log_space ? Eigen::VectorXd(u.array().exp()) : std::move(u));
    }
    if (out.acceptance_rates.sum() == 0.0) {
        throw std::runtime_error("sample_posterior: chain rejected every proposal");
    }
    for (int k = 0; k < r; ++k) {
        if (out.acceptance_rates[k] < 0.1 || out.acceptance_rates[k] > 0.8) {
            out.warnings.push_back("coordinate " + std::to_string(k) +
                                   " acceptance rate outside [0.1, 0.8]: " +
                                   std::to_string(out.acceptance_rates[k]));
        }
    }
    return out;
}

}  // namespace tgk
