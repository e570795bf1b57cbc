// Command-line front end: design generation, synthetic simulation, physical
// to unit-cube preprocessing, the alpha scan, posterior sampling, batch
// prediction and POD curves. Every subcommand reads and writes only the
// files named in its help text and prints a one-line JSON summary to stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "tgk/config.hpp"
#include "tgk/csv.hpp"
#include "tgk/distributions.hpp"
#include "tgk/parallel.hpp"
#include "tgk/pipeline.hpp"
#include "tgk/pod.hpp"
#include "tgk/predict.hpp"
#include "tgk/transform.hpp"

namespace {

using nlohmann::json;

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

tgk::RunConfig load(const GlobalArgs& g) {
    tgk::RunConfig cfg = tgk::load_config(g.config_path);
    if (g.seed_set) {
        cfg.seed = g.seed;
        cfg.mcmc.seed = g.seed;
    }
    if (g.threads > 0) cfg.threads = g.threads;
    tgk::set_threads(cfg.threads);
    std::filesystem::create_directories(g.out_dir);
    return cfg;
}

void summary(const json& j) { std::cerr << j.dump() << "\n"; }

std::string out_path(const GlobalArgs& g, const std::string& name) {
    return (std::filesystem::path(g.out_dir) / name).string();
}

// Mixture moments reported in predictions.csv: the mean of the component
// locations and the mixture standard deviation by the law of total variance
// (needs dof >= 3; smaller dof falls back to the average scale parameter).
void mixture_moments(const std::vector<tgk::StudentTPredictive>& comps, double& location,
                     double& scale) {
    const double m = static_cast<double>(comps.size());
    double loc = 0.0;
    for (const auto& c : comps) loc += c.location;
    loc /= m;
    double var = 0.0;
    bool moments_exist = true;
    for (const auto& c : comps) {
        if (c.dof < 3) {
            moments_exist = false;
            break;
        }
        var += c.scale * c.scale * c.dof / (c.dof - 2.0) + (c.location - loc) * (c.location - loc);
    }
    location = loc;
    if (moments_exist) {
        scale = std::sqrt(var / m);
    } else {
        double s = 0.0;
        for (const auto& c : comps) s += c.scale;
        scale = s / m;
    }
}

int cmd_gen_design(const GlobalArgs& g) {
    const tgk::RunConfig cfg = load(g);
    const tgk::DesignSet design =
        tgk::generate_design(cfg.design.n, cfg.r, cfg.seed, cfg.design.maximin_candidates);
    const std::string path = out_path(g, "design.csv");
    tgk::save_design(path, design);
    summary({{"cmd", "gen-design"}, {"n", cfg.design.n}, {"r", cfg.r}, {"file", path}});
    return 0;
}

int cmd_simulate(const GlobalArgs& g) {
    const tgk::RunConfig cfg = load(g);
    if (!cfg.truth) {
        std::cerr << "simulate: config has no 'truth' section\n";
        return 1;
    }
    const tgk::DesignSet design = tgk::load_design(out_path(g, "design.csv"));
    const Eigen::VectorXd z = tgk::simulate_truth(design, cfg.basis, *cfg.truth);
    const std::string path = out_path(g, "observations.csv");
    tgk::save_observations(path, design, z);
    summary({{"cmd", "simulate"}, {"n", design.count()}, {"file", path}});
    return 0;
}

int cmd_preprocess(const GlobalArgs& g, const std::string& input) {
    const tgk::RunConfig cfg = load(g);
    if (!cfg.a_marginal) {
        std::cerr << "preprocess: config needs marginals.a\n";
        return 1;
    }
    if (static_cast<int>(cfg.nuisance.marginals.size()) != cfg.r - 1) {
        std::cerr << "preprocess: config needs " << cfg.r - 1 << " nuisance marginals\n";
        return 1;
    }
    const tgk::CsvTable raw = tgk::read_csv(input);
    if (static_cast<int>(raw.header.size()) != cfg.r + 1) {
        std::cerr << "preprocess: expected " << cfg.r + 1 << " columns (a, x1.., z)\n";
        return 1;
    }
    Eigen::MatrixXd pts(raw.rows.size(), cfg.r);
    Eigen::VectorXd z(raw.rows.size());
    for (size_t i = 0; i < raw.rows.size(); ++i) {
        const auto& row = raw.rows[i];
        pts(static_cast<Eigen::Index>(i), 0) = tgk::to_unit(*cfg.a_marginal, row[0].value());
        for (int k = 1; k < cfg.r; ++k) {
            pts(static_cast<Eigen::Index>(i), k) =
                tgk::to_unit(cfg.nuisance.marginals[static_cast<size_t>(k - 1)],
                             row[static_cast<size_t>(k)].value());
        }
        z[static_cast<Eigen::Index>(i)] = row.back().value();
    }
    const std::string path = out_path(g, "observations.csv");
    tgk::save_observations(path, tgk::DesignSet(std::move(pts)), z);
    summary({{"cmd", "preprocess"}, {"rows", raw.rows.size()}, {"file", path}});
    return 0;
}

int cmd_fit_alpha(const GlobalArgs& g) {
    const tgk::RunConfig cfg = load(g);
    const auto [design, z] = tgk::load_observations(out_path(g, "observations.csv"));
    const tgk::FitResult fit = tgk::run_fit(cfg, design, z, g.out_dir);
    json j{{"cmd", "fit-alpha"}, {"grid_points", fit.profile.entries.size()}};
    if (fit.alpha_hat) {
        j["alpha_hat"] = *fit.alpha_hat;
    } else {
        j["alpha_hat"] = nullptr;
    }
    summary(j);
    return fit.alpha_hat ? 0 : 1;
}

int cmd_sample_theta(const GlobalArgs& g, double alpha) {
    const tgk::RunConfig cfg = load(g);
    const auto [design, z] = tgk::load_observations(out_path(g, "observations.csv"));
    const tgk::TrendModel model = tgk::make_trend_model(design, cfg.basis);
    const tgk::ThetaDraws draws = tgk::sample_posterior(z, alpha, model, cfg.mcmc, cfg.posterior);
    tgk::save_theta_draws(g.out_dir, draws);
    json j{{"cmd", "sample-theta"},
           {"alpha", alpha},
           {"draws", draws.draws.size()},
           {"warnings", draws.warnings.size()}};
    summary(j);
    return 0;
}

int cmd_predict(const GlobalArgs& g, const std::string& points_path, double alpha_flag) {
    const tgk::RunConfig cfg = load(g);
    const auto [design, z] = tgk::load_observations(out_path(g, "observations.csv"));
    const tgk::TrendModel model = tgk::make_trend_model(design, cfg.basis);

    double alpha = alpha_flag;
    if (alpha < 0.0) {
        const tgk::AlphaProfile profile = tgk::load_alpha_profile(g.out_dir);
        const auto hat = profile.alpha_hat();
        if (!hat) {
            std::cerr << "predict: no alpha given and the profile has no usable entries\n";
            return 1;
        }
        alpha = *hat;
    }
    const tgk::ThetaDraws draws = tgk::load_theta_draws(g.out_dir, alpha);

    const tgk::CsvTable pts_table = tgk::read_csv(points_path);
    Eigen::MatrixXd points(pts_table.rows.size(), cfg.r);
    for (size_t i = 0; i < pts_table.rows.size(); ++i) {
        for (int k = 0; k < cfg.r; ++k) {
            points(static_cast<Eigen::Index>(i), k) =
                pts_table.rows[i][static_cast<size_t>(k)].value();
        }
    }

    Eigen::VectorXd location(points.rows());
    Eigen::VectorXd scale(points.rows());
    Eigen::VectorXd safe(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const tgk::PredictiveMixture mix = tgk::predictive_mixture(
            z, alpha, draws.draws, model, points.row(i).transpose(), cfg.jitter);
        mixture_moments(mix.components, location[i], scale[i]);
        safe[i] = tgk::safe_prob(mix, cfg.threshold, cfg.tail);
    }
    const std::string path = out_path(g, "predictions.csv");
    tgk::save_predictions(path, points, location, scale, safe);
    summary({{"cmd", "predict"}, {"alpha", alpha}, {"points", points.rows()}, {"file", path}});
    return 0;
}

int cmd_pod(const GlobalArgs& g, bool integrated) {
    const tgk::RunConfig cfg = load(g);
    const auto [design, z] = tgk::load_observations(out_path(g, "observations.csv"));
    const tgk::AlphaProfile profile = tgk::load_alpha_profile(g.out_dir);
    tgk::run_pod(cfg, design, z, profile, g.out_dir, integrated);
    json j{{"cmd", "pod"}, {"integrated", integrated}, {"file", out_path(g, "pod_curve.csv")}};
    if (profile.alpha_hat()) j["alpha_hat"] = *profile.alpha_hat();
    summary(j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trans-Gaussian Kriging surrogate with objective-Bayesian hyperparameter "
                 "integration and POD curves"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON run configuration")->required();
    app.add_option("--out", g.out_dir, "Directory for inputs and outputs (default .)");
    auto* seed_opt = app.add_option("--seed", g.seed, "Override the config seed");
    app.add_option("--threads", g.threads, "Worker threads (0 = auto)");

    app.add_subcommand("gen-design", "Write a space-filling design to design.csv");
    app.add_subcommand("simulate",
                       "Simulate synthetic outputs on design.csv into observations.csv");

    std::string preprocess_input;
    auto* pre = app.add_subcommand(
        "preprocess", "Map a physical-units CSV (a, x1.., z) onto the unit cube");
    pre->add_option("--input", preprocess_input, "Physical-units CSV")->required();

    app.add_subcommand("fit-alpha",
                       "Scan the alpha grid: alpha_profile.csv plus theta_draws_<alpha>.csv");

    double sample_alpha = 0.0;
    auto* st = app.add_subcommand("sample-theta", "Posterior draws for one alpha");
    st->add_option("--alpha", sample_alpha, "Transformation parameter")->required();

    std::string points_path;
    double predict_alpha = -1.0;
    auto* pr = app.add_subcommand("predict", "Batch predictions at points from a CSV");
    pr->add_option("--points", points_path, "CSV of query points (a, x1..)")->required();
    pr->add_option("--alpha", predict_alpha, "Fix alpha (default: profile argmax)");

    bool integrated = false;
    auto* pod = app.add_subcommand("pod", "POD curves at the fitted alpha");
    pod->add_flag("--integrated", integrated, "Also average POD over the alpha posterior");

    CLI11_PARSE(app, argc, argv);
    g.seed_set = seed_opt->count() > 0;

    try {
        if (app.got_subcommand("gen-design")) return cmd_gen_design(g);
        if (app.got_subcommand("simulate")) return cmd_simulate(g);
        if (app.got_subcommand("preprocess")) return cmd_preprocess(g, preprocess_input);
        if (app.got_subcommand("fit-alpha")) return cmd_fit_alpha(g);
        if (app.got_subcommand("sample-theta")) return cmd_sample_theta(g, sample_alpha);
        if (app.got_subcommand("predict")) return cmd_predict(g, points_path, predict_alpha);
        if (app.got_subcommand("pod")) return cmd_pod(g, integrated);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
