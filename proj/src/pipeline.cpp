#include "tgk/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "tgk/csv.hpp"
#include "tgk/kernel.hpp"
#include "tgk/likelihood.hpp"
#include "tgk/linalg.hpp"
#include "tgk/rng.hpp"
#include "tgk/transform.hpp"

namespace tgk {

DesignSet generate_design(int n, int r, std::uint64_t seed, int candidates) {
    if (n < 2) throw std::invalid_argument("generate_design: needs at least 2 points");
    if (r < 1) throw std::invalid_argument("generate_design: needs at least 1 dimension");
    if (candidates < 1) candidates = 1;

    Eigen::MatrixXd best;
    double best_score = -1.0;
    for (int c = 0; c < candidates; ++c) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(c));
        Eigen::MatrixXd pts(n, r);
        std::vector<int> perm(static_cast<size_t>(n));
        for (int k = 0; k < r; ++k) {
            for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
            for (int i = n - 1; i > 0; --i) {
                std::swap(perm[static_cast<size_t>(i)],
                          perm[static_cast<size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
            }
            for (int i = 0; i < n; ++i) {
                pts(i, k) = (perm[static_cast<size_t>(i)] + rng.uniform()) / n;
            }
        }
        double min_dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n && min_dist > 0.0; ++i) {
            for (int j = i + 1; j < n; ++j) {
                min_dist = std::min(min_dist, (pts.row(i) - pts.row(j)).squaredNorm());
            }
        }
        if (min_dist > best_score) {
            best_score = min_dist;
            best = std::move(pts);
        }
    }
    return DesignSet(std::move(best));
}

Eigen::VectorXd simulate_truth(const DesignSet& design, TrendBasis basis,
                               const SyntheticTruth& truth) {
    const Eigen::MatrixXd H = trend_matrix(design, basis);
    if (truth.beta.size() != H.cols()) {
        throw std::invalid_argument("simulate_truth: beta size does not match the basis");
    }
    const Eigen::MatrixXd corr = correlation_matrix(design.points(), truth.theta, Exec::Serial);
    const CholeskyFactor chol = cholesky(corr, "correlation matrix");

    Rng rng(truth.seed);
    Eigen::VectorXd noise(design.count());
    for (int i = 0; i < design.count(); ++i) noise[i] = rng.normal();

    const Eigen::VectorXd y = H * truth.beta + std::sqrt(truth.sigma2) * (chol.L * noise);
    Eigen::VectorXd z(design.count());
    for (int i = 0; i < design.count(); ++i) z[i] = sinh_log_inverse(truth.alpha, y[i]);
    return z;
}

// --- file formats -----------------------------------------------------------

namespace {

std::vector<std::string> point_header(int r) {
    std::vector<std::string> h{"a"};
    for (int k = 1; k < r; ++k) h.push_back("x" + std::to_string(k));
    return h;
}

std::filesystem::path join(const std::string& dir, const std::string& name) {
    return std::filesystem::path(dir) / name;
}

}  // namespace

void save_design(const std::string& path, const DesignSet& design) {
    CsvTable t;
    t.header = point_header(design.dim());
    for (int i = 0; i < design.count(); ++i) {
        std::vector<std::optional<double>> row;
        for (int k = 0; k < design.dim(); ++k) row.emplace_back(design.points()(i, k));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

DesignSet load_design(const std::string& path) {
    const CsvTable t = read_csv(path);
    Eigen::MatrixXd pts(t.rows.size(), t.header.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        for (size_t k = 0; k < t.header.size(); ++k) {
            if (!t.rows[i][k]) throw std::runtime_error("load_design: empty cell in " + path);
            pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = *t.rows[i][k];
        }
    }
    return DesignSet(std::move(pts));
}

void save_observations(const std::string& path, const DesignSet& design,
                       const Eigen::VectorXd& z) {
    if (z.size() != design.count()) {
        throw std::invalid_argument("save_observations: size mismatch");
    }
    CsvTable t;
    t.header = point_header(design.dim());
    t.header.push_back("z");
    for (int i = 0; i < design.count(); ++i) {
        std::vector<std::optional<double>> row;
        for (int k = 0; k < design.dim(); ++k) row.emplace_back(design.points()(i, k));
        row.emplace_back(z[i]);
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

std::pair<DesignSet, Eigen::VectorXd> load_observations(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header.size() < 2 || t.header.back() != "z") {
        throw std::runtime_error("load_observations: expected columns a, x1.., z in " + path);
    }
    const int r = static_cast<int>(t.header.size()) - 1;
    Eigen::MatrixXd pts(t.rows.size(), r);
    Eigen::VectorXd z(t.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        for (int k = 0; k < r; ++k) {
            if (!t.rows[i][static_cast<size_t>(k)]) {
                throw std::runtime_error("load_observations: empty cell in " + path);
            }
            pts(static_cast<Eigen::Index>(i), k) = *t.rows[i][static_cast<size_t>(k)];
        }
        if (!t.rows[i].back()) throw std::runtime_error("load_observations: empty output cell");
        z[static_cast<Eigen::Index>(i)] = *t.rows[i].back();
    }
    return {DesignSet(std::move(pts)), std::move(z)};
}

void save_alpha_profile(const std::string& path, const AlphaProfile& profile) {
    CsvTable t;
    t.header = {"alpha", "log_l_log", "log_l_map"};
    for (const AlphaProfileEntry& e : profile.entries) {
        t.rows.push_back({e.alpha, e.log_l_log, e.log_l_map});
    }
    write_csv(path, t);
}

void save_theta_draws(const std::string& dir, const ThetaDraws& draws) {
    CsvTable t;
    const int r = draws.draws.empty() ? 0 : static_cast<int>(draws.draws.front().size());
    for (int k = 0; k < r; ++k) t.header.push_back("theta" + std::to_string(k + 1));
    for (const Eigen::VectorXd& d : draws.draws) {
        std::vector<std::optional<double>> row;
        for (int k = 0; k < r; ++k) row.emplace_back(d[k]);
        t.rows.push_back(std::move(row));
    }
    write_csv(join(dir, "theta_draws_" + format_alpha(draws.alpha) + ".csv").string(), t);
}

ThetaDraws load_theta_draws(const std::string& dir, double alpha) {
    const auto path = join(dir, "theta_draws_" + format_alpha(alpha) + ".csv");
    const CsvTable t = read_csv(path.string());
    ThetaDraws out;
    out.alpha = alpha;
    for (const auto& row : t.rows) {
        Eigen::VectorXd d(row.size());
        for (size_t k = 0; k < row.size(); ++k) {
            if (!row[k]) throw std::runtime_error("load_theta_draws: empty cell");
            d[static_cast<Eigen::Index>(k)] = *row[k];
        }
        out.draws.push_back(std::move(d));
    }
    return out;
}

AlphaProfile load_alpha_profile(const std::string& dir) {
    const CsvTable t = read_csv(join(dir, "alpha_profile.csv").string());
    const int ca = t.column("alpha");
    const int cl = t.column("log_l_log");
    const int cm = t.column("log_l_map");
    if (ca < 0 || cl < 0 || cm < 0) {
        throw std::runtime_error("load_alpha_profile: missing columns in alpha_profile.csv");
    }
    AlphaProfile profile;
    for (const auto& row : t.rows) {
        AlphaProfileEntry e;
        if (!row[static_cast<size_t>(ca)]) {
            throw std::runtime_error("load_alpha_profile: empty alpha cell");
        }
        e.alpha = *row[static_cast<size_t>(ca)];
        e.log_l_log = row[static_cast<size_t>(cl)];
        e.log_l_map = row[static_cast<size_t>(cm)];
        if (e.log_l_log) {
            e.draws = load_theta_draws(dir, e.alpha);
        }
        profile.entries.push_back(std::move(e));
    }
    return profile;
}

void save_pod_curve(const std::string& path, const PodCurve& curve) {
    CsvTable t;
    t.header = {"a", "pod_mean"};
    for (double g : curve.gammas) {
        t.header.push_back("pod_" + std::to_string(static_cast<int>(std::lround(g * 100))));
    }
    for (Eigen::Index i = 0; i < curve.a_grid.size(); ++i) {
        std::vector<std::optional<double>> row{curve.a_grid[i], curve.pod_mean[i]};
        for (const Eigen::VectorXd& pg : curve.pod_gamma) row.emplace_back(pg[i]);
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

void save_predictions(const std::string& path, const Eigen::MatrixXd& points,
                      const Eigen::VectorXd& location, const Eigen::VectorXd& scale,
                      const Eigen::VectorXd& safe) {
    CsvTable t;
    t.header = point_header(static_cast<int>(points.cols()));
    t.header.push_back("location_transformed");
    t.header.push_back("scale_transformed");
    t.header.push_back("safe_prob");
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        std::vector<std::optional<double>> row;
        for (Eigen::Index k = 0; k < points.cols(); ++k) row.emplace_back(points(i, k));
        row.emplace_back(location[i]);
        row.emplace_back(scale[i]);
        row.emplace_back(safe[i]);
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

// --- orchestration ----------------------------------------------------------

FitResult run_fit(const RunConfig& config, const DesignSet& design, const Eigen::VectorXd& z,
                  const std::string& out_dir, Exec exec) {
    const TrendModel model = make_trend_model(design, config.basis);
    const std::vector<double> grid = make_alpha_grid(config.alpha_grid.start,
                                                     config.alpha_grid.stop,
                                                     config.alpha_grid.step);
    ProfileConfig pc;
    pc.mcmc = config.mcmc;
    pc.posterior = config.posterior;
    pc.map_starts = config.map_starts;
    pc.exec = exec;

    FitResult result;
    result.profile = alpha_profile(z, grid, model, pc);
    // Per-alpha failures are absent entries, not exceptions; the profile is
    // persisted before the heavier draw dumps so a failed dump still leaves
    // the scan on disk.
    save_alpha_profile(join(out_dir, "alpha_profile.csv").string(), result.profile);
    for (const AlphaProfileEntry& e : result.profile.entries) {
        if (!e.draws.draws.empty()) save_theta_draws(out_dir, e.draws);
    }
    result.alpha_hat = result.profile.alpha_hat();
    return result;
}

void run_pod(const RunConfig& config, const DesignSet& design, const Eigen::VectorXd& z,
             const AlphaProfile& profile, const std::string& out_dir, bool integrated,
             Exec exec) {
    const TrendModel model = make_trend_model(design, config.basis);
    const std::optional<double> alpha_hat = profile.alpha_hat();
    if (!alpha_hat) throw std::runtime_error("run_pod: profile has no usable entries");
    const AlphaProfileEntry* entry = profile.find(*alpha_hat);
    if (entry == nullptr || entry->draws.draws.empty()) {
        throw std::runtime_error("run_pod: no theta draws for the selected alpha");
    }

    PodOptions opt;
    opt.a_step = config.a_step;
    opt.n_mc = config.n_mc;
    opt.seed = config.seed;
    opt.common_random_numbers = config.common_random_numbers;
    opt.jitter = config.jitter;
    opt.tail = config.tail;
    opt.exec = exec;

    const PodCurve fixed = pod_curves(model, z, *alpha_hat, entry->draws.draws,
                                      config.threshold, config.gammas, opt);
    save_pod_curve(join(out_dir, "pod_curve.csv").string(), fixed);

    if (integrated) {
        bool degenerate = false;
        const PodCurve avg = pod_integrated_alpha(model, z, profile, config.threshold,
                                                  config.gammas, config.mass_cutoff, opt,
                                                  &degenerate);
        if (degenerate) {
            std::fprintf(stderr,
                         "notice: alpha posterior mass sits on a single grid point; the "
                         "averaged curve equals the fixed-alpha curve\n");
        }
        save_pod_curve(join(out_dir, "pod_curve_integrated.csv").string(), avg);
    }
}

}  // namespace tgk
