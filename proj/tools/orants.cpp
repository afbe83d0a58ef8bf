// orants: scenario generation, NBC training/evaluation, agent training, and
// paired agent-vs-baseline evaluation for the O-RAN traffic-steering stack.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "orants/dqn.hpp"
#include "orants/env.hpp"
#include "orants/harness.hpp"
#include "orants/nbc.hpp"
#include "orants/scenario.hpp"

namespace {

using namespace orants;

struct SeedOpts {
    std::uint64_t traffic = 1;
    std::uint64_t placement = 2;
    std::uint64_t agent = 3;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed-traffic", traffic, "traffic noise seed");
        cmd->add_option("--seed-placement", placement, "greedy placement seed");
        cmd->add_option("--seed-agent", agent, "agent training/evaluation seed");
    }

    Seeds seeds() const { return {traffic, placement, agent}; }
};

void write_auc_csv(const NbcModelSet& models, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Data, "cannot write " + path);
    out << "vnf_id,test_auc\n";
    for (std::size_t j = 0; j < models.test_auc.size(); ++j) {
        out << j << ",";
        if (std::isfinite(models.test_auc[j]))
            out << fmt_double(models.test_auc[j]);
        else
            out << "nan";
        out << "\n";
    }
}

void write_returns_csv(const std::vector<double>& returns, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Data, "cannot write " + path);
    out << "episode,return\n";
    for (std::size_t e = 0; e < returns.size(); ++e)
        out << e << "," << fmt_double(returns[e]) << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"O-RAN proactive traffic steering: simulator, NBC, and DQN agent"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a scenario file");
    std::string gen_preset = "paper";
    std::string gen_out = "scenario.txt";
    GenConfig gen_cfg;
    gen->add_option("--preset", gen_preset, "paper | tiny")->check(CLI::IsMember({"paper", "tiny"}));
    gen->add_option("--out", gen_out, "output scenario path");
    gen->add_option("--seed", gen_cfg.seed, "generation seed");
    gen->add_option("--servers", gen_cfg.servers, "server count");
    gen->add_option("--per-kind", gen_cfg.per_kind, "VNFs per kind (chains = per-kind)");
    gen->add_option("--light-chains", gen_cfg.light_chains, "low-load chains with absorber VNFs");
    gen->add_option("--backups-per-kind", gen_cfg.backups_per_kind, "backup VNFs per kind");

    // train-nbc
    auto* tnbc = app.add_subcommand("train-nbc", "fit per-VNF congestion classifiers");
    std::string tnbc_scenario, tnbc_outdir = "out";
    SeedOpts tnbc_seeds;
    tnbc->add_option("--scenario", tnbc_scenario, "scenario file")->required();
    tnbc->add_option("--out-dir", tnbc_outdir, "output directory");
    tnbc_seeds.attach(tnbc);

    // eval-nbc
    auto* enbc = app.add_subcommand("eval-nbc", "evaluate saved classifiers on a fresh day");
    std::string enbc_scenario, enbc_models, enbc_outdir = "out";
    SeedOpts enbc_seeds;
    enbc->add_option("--scenario", enbc_scenario, "scenario file")->required();
    enbc->add_option("--models", enbc_models, "model file from train-nbc")->required();
    enbc->add_option("--out-dir", enbc_outdir, "output directory");
    enbc_seeds.attach(enbc);

    // train-agent
    auto* tagent = app.add_subcommand("train-agent", "train the deep Q-learning agent");
    std::string tagent_scenario, tagent_models, tagent_outdir = "out";
    SeedOpts tagent_seeds;
    TrainConfig train_cfg;
    double sigma = 1.0;
    bool no_mask = false, no_target = false, progress = false;
    tagent->add_option("--scenario", tagent_scenario, "scenario file")->required();
    tagent->add_option("--models", tagent_models, "model file from train-nbc")->required();
    tagent->add_option("--out-dir", tagent_outdir, "output directory");
    tagent->add_option("--episodes", train_cfg.episodes, "training episodes");
    tagent->add_option("--lr", train_cfg.lr, "learning rate");
    tagent->add_option("--gamma", train_cfg.gamma, "discount factor");
    tagent->add_option("--sigma", sigma, "reward base scale");
    tagent->add_option("--eps-decay", train_cfg.eps_decay_per_episode, "epsilon decay per episode");
    tagent->add_option("--eps-end", train_cfg.eps_end, "epsilon floor");
    tagent->add_option("--batch", train_cfg.batch_size, "replay batch size");
    tagent->add_option("--warmup", train_cfg.warmup, "transitions before updates start");
    tagent->add_option("--capacity", train_cfg.replay_capacity, "replay capacity");
    tagent->add_option("--target-sync", train_cfg.target_sync_steps, "target sync period (steps)");
    tagent->add_flag("--no-mask", no_mask, "explore the raw action space");
    tagent->add_flag("--no-target", no_target, "learn without a target network");
    tagent->add_flag("--progress", progress, "print per-episode returns");
    tagent_seeds.attach(tagent);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "agent vs reactive baseline on paired traffic");
    std::string eval_scenario, eval_models, eval_ckpt, eval_outdir = "out";
    SeedOpts eval_seeds;
    double eval_sigma = 1.0;
    int cooldown = 0;
    eval->add_option("--scenario", eval_scenario, "scenario file")->required();
    eval->add_option("--models", eval_models, "model file from train-nbc")->required();
    eval->add_option("--checkpoint", eval_ckpt, "checkpoint from train-agent")->required();
    eval->add_option("--out-dir", eval_outdir, "output directory");
    eval->add_option("--sigma", eval_sigma, "reward base scale");
    eval->add_option("--cooldown", cooldown, "baseline steering cooldown (minutes)");
    eval_seeds.attach(eval);

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        Scenario sc = gen_preset == "tiny" ? tiny_scenario() : gen_scenario(gen_cfg);
        save_scenario(sc, gen_out);
        std::cout << "wrote " << gen_out << ": " << sc.graph.n_servers << " servers, "
                  << sc.n_vnfs() << " VNFs, " << sc.n_chains() << " chains\n";
        return 0;
    }

    if (tnbc->parsed()) {
        Scenario sc = load_scenario(tnbc_scenario);
        std::filesystem::create_directories(tnbc_outdir);
        NbcTrainOutput out = train_nbc_models(sc, tnbc_seeds.seeds());
        save_models(out.models, tnbc_outdir + "/models.json");
        write_telemetry_csv(out.day, tnbc_outdir + "/telemetry.csv");
        write_delay_csv(out.day.queuing_delay_ms, sc.n_vnfs(), tnbc_outdir + "/training_delays.csv");
        write_auc_csv(out.models, tnbc_outdir + "/auc.csv");
        std::cout << "wrote " << tnbc_outdir << "/models.json";
        if (std::isfinite(out.models.mean_test_auc))
            std::cout << " (mean test AUC " << fmt_double(out.models.mean_test_auc) << ")";
        std::cout << "\n";
        return 0;
    }

    if (enbc->parsed()) {
        Scenario sc = load_scenario(enbc_scenario);
        NbcModelSet models = load_models(enbc_models);
        if (models.n_vnfs() != sc.n_vnfs())
            throw Error(ErrorCategory::Checkpoint,
                        "model file covers " + std::to_string(models.n_vnfs()) +
                            " VNFs but the scenario has " + std::to_string(sc.n_vnfs()));
        std::filesystem::create_directories(enbc_outdir);

        Deployment dep = make_deployment(sc, enbc_seeds.placement);
        DayResult day = simulate_day(dep, sc.profiles, sc.traffic_params(), enbc_seeds.traffic,
                                     nullptr, sc.steering_config());
        const int v = sc.n_vnfs();
        const int lead = models.lead_minutes;
        NbcModelSet scored = models;
        double auc_sum = 0.0;
        int auc_count = 0;
        for (int j = 0; j < v; ++j) {
            scored.test_auc[static_cast<std::size_t>(j)] =
                std::numeric_limits<double>::quiet_NaN();
            if (!models.models[static_cast<std::size_t>(j)]) continue;
            std::vector<std::pair<double, int>> scores;
            int start = (kMinutesPerDay - lead) * 7 / 10;
            for (int t = start; t + lead < kMinutesPerDay; ++t) {
                const TelemetryRecord& now = day.telemetry[static_cast<std::size_t>(t) * v + static_cast<std::size_t>(j)];
                const TelemetryRecord& ahead =
                    day.telemetry[static_cast<std::size_t>(t + lead) * v + static_cast<std::size_t>(j)];
                scores.emplace_back(posterior(*models.models[static_cast<std::size_t>(j)],
                                              telemetry_features(now)),
                                    ahead.congested);
            }
            bool pos = false, neg = false;
            for (auto& [s, l] : scores) (l == 1 ? pos : neg) = true;
            if (pos && neg) {
                double a = auc(scores);
                scored.test_auc[static_cast<std::size_t>(j)] = a;
                auc_sum += a;
                ++auc_count;
            }
        }
        write_auc_csv(scored, enbc_outdir + "/auc.csv");
        if (auc_count == 0) throw Error(ErrorCategory::Data, "no VNF had both classes in the test window");
        std::cout << "mean test AUC over " << auc_count << " VNFs: "
                  << fmt_double(auc_sum / auc_count) << "\n";
        return 0;
    }

    if (tagent->parsed()) {
        Scenario sc = load_scenario(tagent_scenario);
        NbcModelSet models = load_models(tagent_models);
        std::filesystem::create_directories(tagent_outdir);
        train_cfg.use_action_mask = !no_mask;
        train_cfg.use_target_net = !no_target;
        train_cfg.seed = tagent_seeds.agent;
        if (progress)
            train_cfg.on_episode = [](int ep, double ret, double eps, double loss) {
                std::fprintf(stderr, "episode %d: return %.1f (eps %.3f, loss %.3f)\n", ep, ret,
                             eps, loss);
            };

        EnvConfig env_cfg;
        env_cfg.reward.sigma = sigma;
        env_cfg.traffic_seed = tagent_seeds.traffic;
        env_cfg.placement_seed = tagent_seeds.placement;
        OranEnv env(sc, nbc_provider(models), env_cfg);
        FeatureEncoder encoder(sc.n_vnfs(), sc.n_chains());
        TrainResult result = train(env, encoder, train_cfg);

        Checkpoint ck;
        ck.net = result.net;
        ck.encoder_cfg = encoder.config();
        ck.n_vnfs = sc.n_vnfs();
        ck.n_chains = sc.n_chains();
        ck.hyperparameters = train_config_json(train_cfg);
        ck.hyperparameters["sigma"] = sigma;
        ck.episode_return = result.episode_return;
        ck.convergence_episode = result.convergence_episode;
        save_checkpoint(ck, tagent_outdir + "/checkpoint.json");
        write_returns_csv(result.episode_return, tagent_outdir + "/returns.csv");
        std::cout << "wrote " << tagent_outdir << "/checkpoint.json";
        if (result.convergence_episode >= 0)
            std::cout << " (converged at episode " << result.convergence_episode + 1 << ")";
        std::cout << "\n";
        return 0;
    }

    if (eval->parsed()) {
        Scenario sc = load_scenario(eval_scenario);
        NbcModelSet models = load_models(eval_models);
        Checkpoint ck = load_checkpoint(eval_ckpt);
        EvalConfig cfg;
        cfg.reward.sigma = eval_sigma;
        cfg.reactive.cooldown_minutes = cooldown;
        ComparisonReport report = run_evaluation(sc, models, ck, eval_seeds.seeds(), eval_outdir, cfg);
        std::cout << "baseline mean delay: " << fmt_double(report.baseline_mean_ms) << " ms\n";
        std::cout << "agent mean delay:    " << fmt_double(report.agent_mean_ms) << " ms\n";
        std::cout << "improvement:         " << fmt_double(report.improvement_pct) << " %\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const orants::Error& e) {
        std::cerr << "error[" << orants::category_name(e.category()) << "]: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
}
