// morl_cli: command-line front end for the experiment harness.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "morl/morl.hpp"

namespace {

using namespace morl;

struct EnvOptions {
    std::string file;
    std::size_t states = 20, actions = 5, horizon = 10, objectives = 15;
    std::uint64_t env_seed = 7;

    void add(CLI::App* app) {
        app->add_option("--env", file, "model file (momdp 1 format); overrides the random-model flags");
        app->add_option("--states", states, "random model: states");
        app->add_option("--actions", actions, "random model: actions");
        app->add_option("--horizon", horizon, "random model: horizon");
        app->add_option("--objectives", objectives, "random model: objectives");
        app->add_option("--env-seed", env_seed, "random model: generator seed");
    }

    Momdp build() const {
        Momdp m = file.empty() ? random_momdp(states, actions, horizon, objectives, env_seed) : load_momdp(file);
        if (auto rep = validate(m); !rep.ok())
            throw std::runtime_error("invalid model: " + rep.violations.front().message);
        return m;
    }
};

std::vector<double> parse_weights(const std::string& s) {
    std::vector<double> w;
    std::stringstream ss(s);
    for (std::string cell; std::getline(ss, cell, ',');) w.push_back(std::stod(cell));
    return w;
}

// Runs `body` with `out` as a file, or stdout when the path is empty or "-".
template <class F>
void with_output(const std::string& path, F&& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    body(f);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective episodic RL lab"};
    app.require_subcommand(1);

    // online -------------------------------------------------------------
    auto* online = app.add_subcommand("online", "run one online agent and write its episode log");
    EnvOptions online_env;
    online_env.add(online);
    std::string agent = "mo-ucbvi", adversary = "iid", online_out, fixed_w;
    std::size_t episodes = 5000;
    std::uint64_t seed = 0;
    double scale = 0.1, delta = 0.1;
    online->add_option("--agent", agent, "mo-ucbvi | mo-ucbvi-bernstein | best-in-hindsight | q-learning");
    online->add_option("--adversary", adversary, "iid | fixed | greedy | oracle");
    online->add_option("--w", fixed_w, "preference for --adversary fixed, comma separated");
    online->add_option("--episodes,-K", episodes, "number of episodes");
    online->add_option("--seed", seed, "cell seed");
    online->add_option("--scale", scale, "bonus scale");
    online->add_option("--delta", delta, "confidence parameter");
    online->add_option("--out", online_out, "CSV path (default stdout)");

    // pfe-explore --------------------------------------------------------
    auto* explore_cmd = app.add_subcommand("pfe-explore", "reward-free exploration; writes a history file");
    EnvOptions explore_env;
    explore_env.add(explore_cmd);
    std::string explore_out;
    std::size_t explore_k = 5000;
    std::uint64_t explore_seed = 0;
    double explore_scale = 0.1;
    explore_cmd->add_option("--episodes,-K", explore_k, "exploration episodes");
    explore_cmd->add_option("--seed", explore_seed, "exploration seed");
    explore_cmd->add_option("--scale", explore_scale, "bonus scale");
    explore_cmd->add_option("--out", explore_out, "history path (default stdout)");

    // plan ----------------------------------------------------------------
    auto* plan_cmd = app.add_subcommand("plan", "plan for a preference from a history");
    EnvOptions plan_env;
    plan_env.add(plan_cmd);
    std::string plan_history, plan_w;
    double plan_scale = 0.1;
    plan_cmd->add_option("--history", plan_history, "history file")->required();
    plan_cmd->add_option("--w", plan_w, "preference, comma separated")->required();
    plan_cmd->add_option("--scale", plan_scale, "bonus scale");

    // pac-eval ------------------------------------------------------------
    auto* pac_cmd = app.add_subcommand("pac-eval", "worst planning error over the preference grid");
    EnvOptions pac_env;
    pac_env.add(pac_cmd);
    std::string pac_history;
    std::size_t pac_resolution = 4;
    double pac_scale = 0.1;
    pac_cmd->add_option("--history", pac_history, "history file")->required();
    pac_cmd->add_option("--resolution", pac_resolution, "lattice resolution of the grid");
    pac_cmd->add_option("--scale", pac_scale, "bonus scale");

    // hard-instance -------------------------------------------------------
    auto* hard_cmd = app.add_subcommand("hard-instance", "build a lower-bound instance");
    FullInstanceParams hp;
    std::string hard_out;
    std::uint64_t hard_seed = 0;
    hard_cmd->add_option("--leaves", hp.leaves, "number of leaves (power of two)");
    hard_cmd->add_option("--objectives", hp.objectives, "JL dimension (0 = default for the leaf count)");
    hard_cmd->add_option("--actions", hp.actions, "actions");
    hard_cmd->add_option("--horizon", hp.horizon, "horizon");
    hard_cmd->add_option("--eps", hp.eps, "transition boost");
    hard_cmd->add_option("--jl-eps", hp.jl_eps, "JL distortion");
    hard_cmd->add_option("--seed", hard_seed, "construction seed");
    hard_cmd->add_option("--out", hard_out, "write the model to this file");

    // run -----------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "config-driven experiment");
    std::string run_config, run_preset, run_out;
    std::optional<double> run_scale;
    std::optional<std::uint64_t> run_seed;
    std::optional<std::size_t> run_episodes;
    auto* cfg_opt = run_cmd->add_option("--config", run_config, "config file");
    run_cmd->add_option("--preset", run_preset, "figure1 | figure2 | figure3 | pfe-scaling")->excludes(cfg_opt);
    run_cmd->add_option("--out", run_out, "output directory");
    run_cmd->add_option("--scale", run_scale, "override bonus scale");
    run_cmd->add_option("--seed", run_seed, "override master seed");
    run_cmd->add_option("--episodes,-K", run_episodes, "override episode count");

    // plot-data -----------------------------------------------------------
    auto* plot_cmd = app.add_subcommand("plot-data", "merge episode logs into a long-format table");
    std::vector<std::string> plot_inputs;
    std::string plot_out;
    plot_cmd->add_option("logs", plot_inputs, "episode log CSVs")->required();
    plot_cmd->add_option("--out", plot_out, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*online) {
            const Momdp env = online_env.build();
            const std::size_t d = env.num_objectives();
            PreferenceSource src = adversary == "fixed"    ? PreferenceSource::fixed(Preference(parse_weights(fixed_w)))
                                   : adversary == "greedy" ? PreferenceSource::greedy(env)
                                   : adversary == "oracle" ? PreferenceSource::oracle(env)
                                   : adversary == "iid"
                                       ? PreferenceSource::iid(d, derive_seed(seed, {kPreferenceStream}))
                                       : throw std::invalid_argument("unknown adversary " + adversary);
            Rng rng(derive_seed(seed, {kAgentStream}));
            EpisodeLog log;
            if (agent == "best-in-hindsight") {
                if (src.adaptive()) throw std::invalid_argument("best-in-hindsight needs a non-adaptive adversary");
                log = run_best_in_hindsight(env, src.take(episodes));
            } else if (agent == "q-learning") {
                log = run_q_learning(env, src, episodes, QLearningParams::with_scale(scale), rng);
            } else if (agent == "mo-ucbvi" || agent == "mo-ucbvi-bernstein") {
                const auto v = agent == "mo-ucbvi" ? OnlineVariant::Hoeffding : OnlineVariant::Bernstein;
                log = run_online(env, src, episodes, v, BonusParams::for_model(env, episodes, delta, scale), rng);
            } else {
                throw std::invalid_argument("unknown agent " + agent);
            }
            log.seed = seed;
            with_output(online_out, [&](std::ostream& os) { write_episode_log_csv(os, log); });
            std::cerr << log.agent << " final regret " << log.final_regret() << '\n';
        } else if (*explore_cmd) {
            const Momdp env = explore_env.build();
            Rng rng(derive_seed(explore_seed, {kExplorationStream}));
            const auto res = explore(env, explore_k, PfeParams{0.1, explore_scale}, rng);
            with_output(explore_out, [&](std::ostream& os) { write_history(os, res.history); });
            std::cerr << "explored " << res.history.size() << " episodes; final optimistic root value "
                      << (res.root_values.empty() ? 0.0 : res.root_values.back()) << '\n';
        } else if (*plan_cmd) {
            const Momdp env = plan_env.build();
            const auto history = load_history(plan_history);
            const Preference w(parse_weights(plan_w));
            const PfeParams params{0.1, plan_scale};
            const auto mix = plan(history, env, w, params);
            const double v_star = optimal_value(env, w).values.V(0, env.initial_state);
            const double v_mix = mixture_value(env, mix, w);
            std::cout << "members " << mix.members.size() << "\nv_star " << v_star << "\nv_mixture " << v_mix
                      << "\nerror " << v_star - v_mix << '\n';
        } else if (*pac_cmd) {
            const Momdp env = pac_env.build();
            const auto history = load_history(pac_history);
            const auto grid = default_pac_grid(env.num_objectives(), pac_resolution);
            const double e = pac_error(env, history, PfeParams{0.1, pac_scale}, grid);
            std::cout << "grid_points " << grid.size() << "\npac_error " << e << '\n';
        } else if (*hard_cmd) {
            Rng rng(hard_seed);
            const auto inst = full_instance(hp, rng);
            std::cout << "leaves " << inst.leaves << "\njl_rows " << inst.jl.A.rows << "\njl_achieved_eps "
                      << inst.jl.achieved_eps << "\nstates " << inst.mdp.num_states() << "\nobjectives "
                      << inst.mdp.num_objectives() << '\n';
            if (!hard_out.empty()) save_momdp(hard_out, inst.mdp);
        } else if (*run_cmd) {
            std::vector<ExperimentConfig> cfgs;
            if (!run_config.empty()) cfgs.push_back(load_config(run_config));
            else if (!run_preset.empty()) cfgs = preset(run_preset);
            else throw std::invalid_argument("run needs --config or --preset");
            for (auto& c : cfgs) {
                if (run_scale) c.scale = *run_scale;
                if (run_seed) c.master_seed = *run_seed;
                if (run_episodes) c.episodes = *run_episodes;
                if (!run_out.empty()) c.out_dir = run_out;
                if (c.out_dir.empty()) c.out_dir = "results";
                const auto res = run_experiment(c);
                for (const auto& log : res.logs)
                    std::cout << log.agent << " seed " << log.seed << " final regret " << log.final_regret() << '\n';
                for (const auto& r : res.pfe)
                    std::cout << "pfe seed " << r.seed << " K " << r.episodes << " pac_error " << r.pac_error << '\n';
            }
        } else if (*plot_cmd) {
            std::vector<EpisodeLog> logs;
            for (const auto& p : plot_inputs) {
                std::ifstream f(p);
                if (!f) throw std::runtime_error("cannot open " + p);
                logs.push_back(read_episode_log_csv(f));
            }
            with_output(plot_out, [&](std::ostream& os) { emit_plot_data(os, logs); });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
