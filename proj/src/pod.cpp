#include "tgk/pod.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "tgk/distributions.hpp"
#include "tgk/rng.hpp"
#include "tgk/transform.hpp"

namespace tgk {

namespace {

struct CdfVisitor {
    double x;

    double operator()(const UniformMarginal& m) const {
        if (!(m.lo < m.hi)) throw std::invalid_argument("uniform marginal: needs lo < hi");
        if (x < m.lo || x > m.hi) {
            throw std::domain_error("to_unit: value outside the uniform support");
        }
        return (x - m.lo) / (m.hi - m.lo);
    }
    double operator()(const NormalMarginal& m) const {
        if (!(m.variance > 0.0)) throw std::invalid_argument("normal marginal: variance <= 0");
        return normal_cdf((x - m.mean) / std::sqrt(m.variance));
    }
    double operator()(const TruncatedNormalAtZeroMarginal& m) const {
        if (!(m.variance > 0.0)) {
            throw std::invalid_argument("truncated normal marginal: variance <= 0");
        }
        if (x < 0.0) throw std::domain_error("to_unit: truncated normal support is [0, inf)");
        const double sigma = std::sqrt(m.variance);
        const double at_zero = normal_cdf(-m.mean / sigma);
        return (normal_cdf((x - m.mean) / sigma) - at_zero) / (1.0 - at_zero);
    }
};

}  // namespace

double to_unit(const Marginal& marginal, double physical) {
    return std::visit(CdfVisitor{physical}, marginal);
}

double from_unit(const Marginal& marginal, double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("from_unit: u must lie in (0,1)");
    if (const auto* m = std::get_if<UniformMarginal>(&marginal)) {
        if (!(m->lo < m->hi)) throw std::invalid_argument("uniform marginal: needs lo < hi");
        return m->lo + u * (m->hi - m->lo);
    }
    if (const auto* m = std::get_if<NormalMarginal>(&marginal)) {
        if (!(m->variance > 0.0)) throw std::invalid_argument("normal marginal: variance <= 0");
        return m->mean + std::sqrt(m->variance) * normal_quantile(u);
    }
    // Truncated normal: bisection on the CDF.
    const auto& m = std::get<TruncatedNormalAtZeroMarginal>(marginal);
    const double sigma = std::sqrt(m.variance);
    double lo = 0.0;
    double hi = std::max(m.mean, 0.0) + 10.0 * sigma;
    while (to_unit(marginal, hi) < u) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (to_unit(marginal, mid) < u) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-9 * (1.0 + std::fabs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

Eigen::MatrixXd sample_nuisance(const NuisanceDistribution& dist, int n, std::uint64_t seed) {
    const int dim = static_cast<int>(dist.marginals.size());
    Rng rng(seed);
    Eigen::MatrixXd points(n, dim);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < dim; ++k) points(i, k) = rng.uniform();
    }
    return points;
}

namespace {

std::vector<double> make_a_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("pod: invalid a_step");
    std::vector<double> grid;
    const int count = static_cast<int>(std::floor(1.0 / step + 1e-9)) + 1;
    grid.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) grid.push_back(i * step);
    return grid;
}

// Uniform nuisance block for grid index ia, prepended with the depth value.
Eigen::MatrixXd grid_points(double a, int n_mc, int r, std::uint64_t seed, std::uint64_t index,
                            bool common) {
    Rng rng = Rng::substream(seed, common ? 0 : index);
    Eigen::MatrixXd pts(n_mc, r);
    pts.col(0).setConstant(a);
    for (int i = 0; i < n_mc; ++i) {
        for (int k = 1; k < r; ++k) pts(i, k) = rng.uniform();
    }
    return pts;
}

PodCurve assemble_curve(const std::vector<double>& a_grid,
                        const std::vector<Eigen::VectorXd>& safe,
                        const std::vector<double>& gammas, const PodOptions& opt) {
    PodCurve curve;
    curve.n_mc = opt.n_mc;
    curve.seed = opt.seed;
    curve.gammas = gammas;
    const int g = static_cast<int>(a_grid.size());
    curve.a_grid = Eigen::Map<const Eigen::VectorXd>(a_grid.data(), g);
    curve.pod_mean.resize(g);
    curve.pod_gamma.assign(gammas.size(), Eigen::VectorXd(g));
    for (int ia = 0; ia < g; ++ia) {
        const Eigen::VectorXd& s = safe[static_cast<size_t>(ia)];
        curve.pod_mean[ia] = s.mean();
        for (size_t ig = 0; ig < gammas.size(); ++ig) {
            const double gamma = gammas[ig];
            const int count = static_cast<int>((s.array() >= gamma).count());
            curve.pod_gamma[ig][ia] = static_cast<double>(count) / s.size();
        }
    }
    return curve;
}

void check_gammas(const std::vector<double>& gammas) {
    for (double g : gammas) {
        if (!(g > 0.0 && g < 1.0)) {
            throw std::invalid_argument("pod: safety levels must lie in (0,1)");
        }
    }
}

}  // namespace

PodCurve pod_curves(const TrendModel& model, const Eigen::VectorXd& z, double alpha,
                    const std::vector<Eigen::VectorXd>& draws, double s,
                    const std::vector<double>& gammas, const PodOptions& opt) {
    if (!(s > 0.0)) throw std::invalid_argument("pod: detection threshold must be positive");
    check_gammas(gammas);
    const TransformedObs t = transform_observations(alpha, z);
    const BatchPredictor predictor(t.values, draws, model, opt.jitter);
    const double threshold_t = sinh_log(alpha, s);

    const std::vector<double> a_grid = make_a_grid(opt.a_step);
    std::vector<Eigen::VectorXd> safe(a_grid.size());
    parallel_for(a_grid.size(), [&](std::size_t ia) {
        const Eigen::MatrixXd pts = grid_points(a_grid[ia], opt.n_mc, model.r(), opt.seed, ia,
                                                opt.common_random_numbers);
        safe[ia] = predictor.survival_mean(pts, threshold_t, opt.tail);
    }, opt.exec);

    return assemble_curve(a_grid, safe, gammas, opt);
}

PodCurve pod_integrated_alpha(const TrendModel& model, const Eigen::VectorXd& z,
                              const AlphaProfile& profile, double s,
                              const std::vector<double>& gammas, double mass_cutoff,
                              const PodOptions& opt, bool* degenerate) {
    if (!(mass_cutoff > 0.0 && mass_cutoff <= 1.0)) {
        throw std::invalid_argument("pod: mass_cutoff must lie in (0,1]");
    }
    if (degenerate != nullptr) *degenerate = false;

    // Normalized posterior masses on the grid (uniform prior, equal spacing,
    // so the rectangle widths cancel).
    std::vector<double> log_l;
    std::vector<size_t> index;
    for (size_t i = 0; i < profile.entries.size(); ++i) {
        if (profile.entries[i].log_l_log) {
            log_l.push_back(*profile.entries[i].log_l_log);
            index.push_back(i);
        }
    }
    if (log_l.empty()) throw std::invalid_argument("pod: profile has no usable entries");
    const double peak = *std::max_element(log_l.begin(), log_l.end());
    std::vector<double> mass(log_l.size());
    double total = 0.0;
    for (size_t i = 0; i < log_l.size(); ++i) {
        mass[i] = std::exp(log_l[i] - peak);
        total += mass[i];
    }
    for (double& m : mass) m /= total;

    // Smallest contiguous window holding >= mass_cutoff.
    size_t best_lo = 0;
    size_t best_hi = mass.size() - 1;
    for (size_t lo = 0; lo < mass.size(); ++lo) {
        double acc = 0.0;
        for (size_t hi = lo; hi < mass.size(); ++hi) {
            acc += mass[hi];
            if (acc >= mass_cutoff - 1e-12) {
                if (hi - lo < best_hi - best_lo) {
                    best_lo = lo;
                    best_hi = hi;
                }
                break;
            }
        }
    }

    if (best_lo == best_hi) {
        if (degenerate != nullptr) *degenerate = true;
        const AlphaProfileEntry& e = profile.entries[index[best_lo]];
        return pod_curves(model, z, e.alpha, e.draws.draws, s, gammas, opt);
    }

    double window_mass = 0.0;
    for (size_t i = best_lo; i <= best_hi; ++i) window_mass += mass[i];

    if (!(s > 0.0)) throw std::invalid_argument("pod: detection threshold must be positive");
    check_gammas(gammas);

    struct Component {
        double weight;
        double threshold_t;
        std::unique_ptr<BatchPredictor> predictor;
    };
    std::vector<Component> comps;
    for (size_t i = best_lo; i <= best_hi; ++i) {
        const AlphaProfileEntry& e = profile.entries[index[i]];
        const TransformedObs t = transform_observations(e.alpha, z);
        comps.push_back(Component{
            mass[i] / window_mass, sinh_log(e.alpha, s),
            std::make_unique<BatchPredictor>(t.values, e.draws.draws, model, opt.jitter)});
    }

    const std::vector<double> a_grid = make_a_grid(opt.a_step);
    std::vector<Eigen::VectorXd> safe(a_grid.size());
    parallel_for(a_grid.size(), [&](std::size_t ia) {
        const Eigen::MatrixXd pts = grid_points(a_grid[ia], opt.n_mc, model.r(), opt.seed, ia,
                                                opt.common_random_numbers);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(opt.n_mc);
        for (const Component& c : comps) {
            acc += c.weight * c.predictor->survival_mean(pts, c.threshold_t, opt.tail);
        }
        safe[ia] = acc;
    }, opt.exec);

    return assemble_curve(a_grid, safe, gammas, opt);
}

}  // namespace tgk
