#include "tgk/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace tgk {

namespace {

using nlohmann::json;

Marginal parse_marginal(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "uniform") {
        return UniformMarginal{j.at("lo").get<double>(), j.at("hi").get<double>()};
    }
    if (type == "normal") {
        return NormalMarginal{j.at("mean").get<double>(), j.at("variance").get<double>()};
    }
    if (type == "truncated_normal_at_zero") {
        return TruncatedNormalAtZeroMarginal{j.at("mean").get<double>(),
                                             j.at("variance").get<double>()};
    }
    throw std::invalid_argument("config: unknown marginal type '" + type + "'");
}

Eigen::VectorXd parse_vector(const json& j) {
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

}  // namespace

TrendBasis parse_basis(const std::string& name) {
    if (name == "constant") return TrendBasis::Constant;
    if (name == "affine_a") return TrendBasis::AffineInA;
    if (name == "full_affine") return TrendBasis::FullAffine;
    throw std::invalid_argument("config: unknown basis '" + name +
                                "' (expected constant | affine_a | full_affine)");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json j;
    in >> j;

    RunConfig cfg;
    cfg.r = j.at("r").get<int>();
    if (cfg.r < 1) throw std::invalid_argument("config: r must be positive");
    if (j.contains("basis")) cfg.basis = parse_basis(j["basis"].get<std::string>());
    if (j.contains("alpha_grid")) {
        const json& g = j["alpha_grid"];
        cfg.alpha_grid.start = g.value("start", 0.0);
        cfg.alpha_grid.stop = g.value("stop", 1.0);
        cfg.alpha_grid.step = g.value("step", 0.01);
    }
    if (j.contains("mcmc")) {
        const json& m = j["mcmc"];
        cfg.mcmc.n_iterations = m.value("n_iterations", 9000);
        cfg.mcmc.thin = m.value("thin", 90);
        cfg.mcmc.burn_in = m.value("burn_in", 1000);
        if (cfg.mcmc.n_iterations <= 0 || cfg.mcmc.thin <= 0 || cfg.mcmc.burn_in < 0) {
            throw std::invalid_argument("config: mcmc counts must be positive");
        }
    }
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.mcmc.seed = cfg.seed;
    cfg.threshold = j.value("threshold", 200.0);
    if (!(cfg.threshold > 0.0)) throw std::invalid_argument("config: threshold must be positive");
    if (j.contains("gammas")) {
        cfg.gammas = j["gammas"].get<std::vector<double>>();
    }
    if (j.contains("pod")) {
        const json& p = j["pod"];
        cfg.a_step = p.value("a_step", 0.01);
        cfg.n_mc = p.value("n_mc", 1000);
        cfg.common_random_numbers = p.value("common_random_numbers", false);
        cfg.mass_cutoff = p.value("mass_cutoff", 0.999);
        if (cfg.n_mc <= 0) throw std::invalid_argument("config: pod.n_mc must be positive");
    }
    cfg.jitter = j.value("jitter", 0.0);
    if (cfg.jitter < 0.0) throw std::invalid_argument("config: jitter must be nonnegative");
    cfg.posterior.jitter = cfg.jitter;
    if (j.contains("model")) {
        const json& m = j["model"];
        const std::string fisher = m.value("fisher", std::string("projected"));
        if (fisher == "projected") {
            cfg.posterior.fisher = FisherVariant::Projected;
        } else if (fisher == "sigma2_integrated") {
            cfg.posterior.fisher = FisherVariant::Sigma2Integrated;
        } else {
            throw std::invalid_argument("config: unknown fisher variant '" + fisher + "'");
        }
        cfg.posterior.flat_prior = m.value("flat_prior", false);
        cfg.tail.normal_approx = m.value("normal_tail_approx", false);
        cfg.tail.dof_threshold = m.value("normal_tail_dof", 200.0);
        cfg.map_starts = m.value("map_starts", 6);
    }
    if (j.contains("marginals")) {
        const json& m = j["marginals"];
        if (m.contains("a")) cfg.a_marginal = parse_marginal(m["a"]);
        if (m.contains("x")) {
            for (const json& spec : m["x"]) {
                cfg.nuisance.marginals.push_back(parse_marginal(spec));
            }
        }
    }
    if (j.contains("truth")) {
        const json& t = j["truth"];
        SyntheticTruth truth;
        truth.beta = parse_vector(t.at("beta"));
        truth.sigma2 = t.at("sigma2").get<double>();
        truth.theta = parse_vector(t.at("theta"));
        truth.alpha = t.at("alpha").get<double>();
        truth.seed = t.value("seed", cfg.seed);
        if (!(truth.sigma2 > 0.0)) throw std::invalid_argument("config: truth.sigma2 <= 0");
        if (!(truth.alpha >= 0.0 && truth.alpha <= 1.0)) {
            throw std::invalid_argument("config: truth.alpha outside [0,1]");
        }
        for (Eigen::Index k = 0; k < truth.theta.size(); ++k) {
            if (!(truth.theta[k] > 0.0)) {
                throw std::invalid_argument("config: truth.theta must be positive");
            }
        }
        cfg.truth = std::move(truth);
    }
    if (j.contains("design")) {
        const json& d = j["design"];
        cfg.design.n = d.value("n", 100);
        cfg.design.maximin_candidates = d.value("maximin_candidates", 50);
    }
    cfg.threads = j.value("threads", 0);
    return cfg;
}

}  // namespace tgk
