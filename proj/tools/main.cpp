// erwlab: config-driven experiments on excited random walks and their
// branching encodings. Every subcommand reads one flat config file and
// writes CSV/text artifacts whose first line carries the tool version,
// config hash and seed; outputs are byte-identical for identical
// (config, seed) regardless of --workers.
//
// Exit codes: 0 ok, 1 verify disagreement, 2 bad config/usage, 3 verify
// refused (ellipticity).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "erw/branching.hpp"
#include "erw/coins.hpp"
#include "erw/config.hpp"
#include "erw/env.hpp"
#include "erw/parallel.hpp"
#include "erw/regime.hpp"
#include "erw/renewal.hpp"
#include "erw/stats.hpp"
#include "erw/tree.hpp"
#include "erw/walk.hpp"

namespace fs = std::filesystem;
using namespace erw;

namespace {

std::ofstream open_artifact(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    const fs::path p = fs::path(cfg.output_dir) / name;
    std::ofstream out(p, std::ios::binary); // fixed newline policy on every platform
    if (!out) throw std::runtime_error("cannot open output file " + p.string());
    out << cfg.header_line() << "\n";
    out.precision(17);
    return out;
}

int cmd_delta(const ExperimentConfig& cfg) {
    const EnvironmentLaw law = cfg.law();
    const double d = delta(law);
    const MigrationLaw fwd = nu_exact(law, Direction::forward, cfg.tail_cut);
    const MigrationLaw bwd = nu_exact(law, Direction::backward, cfg.tail_cut);
    auto out = open_artifact(cfg, "delta.txt");
    std::ostringstream body;
    body.precision(17);
    body << "delta=" << d << "\n";
    body << "theta_forward=" << theta(fwd) << "\n";
    body << "theta_backward=" << theta(bwd) << "\n";
    body << "ellipticity=" << (check_ellipticity(law) ? "ok" : "violated") << "\n";
    body << "common_depth=" << law.common_depth() << "\n";
    out << body.str();
    std::cout << body.str();
    return 0;
}

int cmd_walk(const ExperimentConfig& cfg, std::int64_t paths, int workers) {
    const EnvironmentLaw law = cfg.law();
    std::vector<WalkPath> ps(static_cast<std::size_t>(paths));
    parallel_for_index(paths, workers, [&](std::int64_t i) {
        CoinField field(law, replicate_seed(cfg.seed, static_cast<std::uint64_t>(i)));
        ps[static_cast<std::size_t>(i)] = run_walk(field, 0, cfg.horizon);
    });
    for (std::int64_t i = 0; i < paths; ++i) {
        auto out = open_artifact(cfg, "walk_" + std::to_string(i) + ".csv");
        out << "n,x\n";
        const auto& p = ps[static_cast<std::size_t>(i)];
        for (std::int64_t n = 0; n <= p.horizon(); ++n) out << n << "," << p.at(n) << "\n";
    }
    std::cout << "wrote " << paths << " path file(s) to " << cfg.output_dir << "\n";
    return 0;
}

int cmd_tree_roundtrip(const ExperimentConfig& cfg, int workers) {
    const EnvironmentLaw law = cfg.law();
    std::vector<std::int8_t> ok_paths(static_cast<std::size_t>(cfg.replicates), 0);
    std::vector<std::int8_t> ok_trees(static_cast<std::size_t>(cfg.replicates), 0);
    std::vector<std::int8_t> usable(static_cast<std::size_t>(cfg.replicates), 0);
    parallel_for_index(cfg.replicates, workers, [&](std::int64_t i) {
        const auto seed = replicate_seed(cfg.seed, static_cast<std::uint64_t>(i));
        CoinField field(law, seed);
        Excursion exc = run_right_excursion(field, cfg.horizon);
        if (exc.finite) {
            usable[static_cast<std::size_t>(i)] = 1;
            const auto tree = excursion_to_tree(exc.path);
            ok_paths[static_cast<std::size_t>(i)] =
                tree_to_excursion(tree).positions == exc.path.positions ? 1 : 0;
        }
        const auto t = sample_geometric_tree(seed);
        const auto back = excursion_to_tree(tree_to_excursion(t));
        ok_trees[static_cast<std::size_t>(i)] = back.child_counts == t.child_counts ? 1 : 0;
    });
    std::int64_t excursions = 0, pass_e = 0, pass_t = 0;
    for (std::int64_t i = 0; i < cfg.replicates; ++i) {
        excursions += usable[static_cast<std::size_t>(i)];
        pass_e += ok_paths[static_cast<std::size_t>(i)];
        pass_t += ok_trees[static_cast<std::size_t>(i)];
    }
    auto out = open_artifact(cfg, "tree_roundtrip.txt");
    std::ostringstream body;
    body << "finite_excursions=" << excursions << "\n"
         << "excursion_roundtrip_pass=" << pass_e << "\n"
         << "tree_samples=" << cfg.replicates << "\n"
         << "tree_roundtrip_pass=" << pass_t << "\n";
    out << body.str();
    std::cout << body.str();
    const bool all = pass_e == excursions && pass_t == cfg.replicates;
    return all ? 0 : 1;
}

int cmd_nu(const ExperimentConfig& cfg, const std::string& direction) {
    const EnvironmentLaw law = cfg.law();
    const Direction dir = direction == "backward" ? Direction::backward : Direction::forward;
    const MigrationLaw nu = nu_exact(law, dir, cfg.tail_cut);
    auto out = open_artifact(cfg, "nu_" + direction + ".csv");
    out << "k,prob\n";
    for (std::int64_t k = nu.min_value(); k <= nu.max_value(); ++k) out << k << "," << nu.pmf(k) << "\n";
    std::cout << "mean=" << nu.mean() << " theta=" << theta(nu) << " tail_mass=" << nu.tail_mass()
              << " tail_mean_bound=" << nu.tail_mean_bound() << "\n";
    return 0;
}

int cmd_branching(const ExperimentConfig& cfg, const std::string& direction, std::int64_t n_max,
                  int workers) {
    const EnvironmentLaw law = cfg.law();
    const Direction dir = direction == "backward" ? Direction::backward : Direction::forward;
    const MigrationLaw nu = nu_exact(law, dir, cfg.tail_cut);
    const auto curves =
        survival_progeny_curves(nu, n_max, cfg.replicates, cfg.seed, cfg.confidence, workers);
    auto out = open_artifact(cfg, "curves_" + direction + ".csv");
    out << "n,u,u_lo,u_hi,v,v_lo,v_hi\n";
    for (std::size_t i = 0; i < curves.grid.size(); ++i)
        out << curves.grid[i] << "," << curves.u[i] << "," << curves.u_lo[i] << "," << curves.u_hi[i]
            << "," << curves.v[i] << "," << curves.v_lo[i] << "," << curves.v_hi[i] << "\n";
    std::cout << "theta=" << theta(nu) << ", wrote " << curves.grid.size() << " rows\n";
    return 0;
}

int cmd_renewal(const ExperimentConfig& cfg, std::int64_t paths, std::int64_t bt_paths, int workers) {
    const EnvironmentLaw law = cfg.law();
    std::vector<RenewalReport> reports(static_cast<std::size_t>(paths));
    parallel_for_index(paths, workers, [&](std::int64_t i) {
        CoinField field(law, replicate_seed(cfg.seed, static_cast<std::uint64_t>(i)));
        const WalkPath path = run_walk(field, 0, cfg.horizon);
        reports[static_cast<std::size_t>(i)] = analyze_path(path, cfg.margin);
    });

    {
        auto out = open_artifact(cfg, "cycles.csv");
        out << "path_id,k,space,time,sum_d,identity_ok\n";
        for (std::int64_t i = 0; i < paths; ++i) {
            const auto& cs = reports[static_cast<std::size_t>(i)].cycles;
            for (std::size_t k = 0; k < cs.size(); ++k)
                out << i << "," << k << "," << cs[k].space << "," << cs[k].time << "," << cs[k].sum_d()
                    << "," << (cs[k].identity_ok ? 1 : 0) << "\n";
        }
    }

    const auto est = estimate_speed(reports, cfg.confidence);
    const auto survey = survey_backtracking(law, keyed_u64(cfg.seed, StreamDomain::replicate, 0xD1F),
                                            cfg.replicates, cfg.horizon, cfg.guard_level, workers);
    std::vector<Cycle> cycles;
    std::vector<std::int64_t> endpoints;
    for (const auto& r : reports) {
        cycles.insert(cycles.end(), r.cycles.begin(), r.cycles.end());
        endpoints.push_back(r.endpoint);
    }
    std::ostringstream body;
    body.precision(12);
    body << "cycles=" << est.cycles << "\n";
    body << "v_hat=" << est.v_hat << "\n";
    body << "v_ci=[" << est.ci_lo << "," << est.ci_hi << "]\n";
    body << "direct_endpoint_rate=" << est.direct_endpoint_rate << "\n";
    body << "mean_space=" << est.mean_space << "\n";
    body << "p_dinf=" << survey.p_dinf() << " (backtracked=" << survey.backtracked
         << " never=" << survey.never << " censored=" << survey.censored << ")\n";
    if (survey.p_dinf() > 0.0) body << "renewal_mean_check=" << est.mean_space * survey.p_dinf() << "\n";
    if (endpoints.size() >= 2 && !cycles.empty()) {
        const auto s2 = estimate_sigma2_clt(cycles, endpoints, cfg.horizon, est.v_hat, est.se);
        body << "sigma2_cycles=" << s2.sigma2_cycles << "\n";
        body << "sigma2_paths=" << s2.sigma2_paths << "\n";
    }
    {
        auto out = open_artifact(cfg, "renewal_report.txt");
        out << body.str();
    }
    std::cout << body.str();

    // B_t^n samples for external plotting.
    if (bt_paths > 0) {
        auto out = open_artifact(cfg, "bt_samples.csv");
        out << "t,value,path_id\n";
        const double n = static_cast<double>(cfg.horizon);
        for (std::int64_t i = 0; i < std::min<std::int64_t>(bt_paths, paths); ++i) {
            CoinField field(law, replicate_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            const WalkPath path = run_walk(field, 0, cfg.horizon);
            for (int step = 0; step <= 100; ++step) {
                const double t = static_cast<double>(step) / 100.0;
                const auto idx = static_cast<std::int64_t>(t * n);
                const double b = (static_cast<double>(path.at(idx)) -
                                  static_cast<double>(idx) * est.v_hat) /
                                 std::sqrt(n);
                out << t << "," << b << "," << i << "\n";
            }
        }
    }
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg, int workers) {
    const EnvironmentLaw law = cfg.law();
    if (!check_ellipticity(law)) {
        std::cerr << "verify refused: ellipticity violated\n";
        return 3;
    }
    VerifyBudget budget;
    budget.seed = cfg.seed;
    budget.margin = cfg.margin;
    budget.guard_level = cfg.guard_level;
    budget.confidence = cfg.confidence;
    budget.workers = workers;
    const RegimeVerdict verdict = verify_regime(law, budget);
    const std::string report = format_report(verdict);
    {
        auto out = open_artifact(cfg, "verdict.txt");
        out << report;
    }
    {
        auto out = open_artifact(cfg, "verdict.kv");
        out << format_machine_summary(verdict);
    }
    std::cout << report;
    return verdict.all_agree() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"excited random walk laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    int workers = default_workers();
    app.add_option("-c,--config", config_path, "experiment config file")->required();
    app.add_option("-w,--workers", workers, "worker threads (default: hardware)");

    auto* sc_delta = app.add_subcommand("delta", "print delta, theta forward/backward, ellipticity");
    auto* sc_walk = app.add_subcommand("walk", "simulate paths, write CSVs");
    std::int64_t walk_paths = 1;
    sc_walk->add_option("--paths", walk_paths, "number of paths");
    auto* sc_tree = app.add_subcommand("tree-roundtrip", "bijection property run");
    auto* sc_branching = app.add_subcommand("branching", "u_n / v_n survival curves");
    std::string direction = "forward";
    std::int64_t n_max = 1000;
    sc_branching->add_option("--direction", direction, "forward|backward");
    sc_branching->add_option("--n-max", n_max, "curve horizon");
    auto* sc_nu = app.add_subcommand("nu", "exact migration pmf CSV");
    std::string nu_direction = "forward";
    sc_nu->add_option("--direction", nu_direction, "forward|backward");
    auto* sc_renewal = app.add_subcommand("renewal", "cycle table, speed, sigma^2");
    std::int64_t renewal_paths = 32, bt_paths = 4;
    sc_renewal->add_option("--paths", renewal_paths, "paths to analyze");
    sc_renewal->add_option("--bt-paths", bt_paths, "paths sampled into bt_samples.csv");
    auto* sc_verify = app.add_subcommand("verify", "regime verdict vs theory");

    CLI11_PARSE(app, argc, argv);

    ExperimentConfig cfg;
    try {
        cfg = ExperimentConfig::parse_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sc_delta->parsed()) return cmd_delta(cfg);
        if (sc_walk->parsed()) return cmd_walk(cfg, walk_paths, workers);
        if (sc_tree->parsed()) return cmd_tree_roundtrip(cfg, workers);
        if (sc_branching->parsed()) return cmd_branching(cfg, direction, n_max, workers);
        if (sc_nu->parsed()) return cmd_nu(cfg, nu_direction);
        if (sc_renewal->parsed()) return cmd_renewal(cfg, renewal_paths, bt_paths, workers);
        if (sc_verify->parsed()) return cmd_verify(cfg, workers);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
