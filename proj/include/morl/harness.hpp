#pragma once

// Seeded experiment runner.
//
// A run is a grid of cells (agent x seed). Every cell owns its generators:
//   preference stream  derive_seed(master, {kPreferenceStream, seed index})
//   agent stream       derive_seed(master, {kAgentStream, agent index, seed index})
//   exploration (pfe)  derive_seed(master, {kExplorationStream, budget, seed index})
// so all agents of one seed face the same preference sequence and appending
// an agent or a seed leaves existing cells untouched. Cells run in parallel;
// outputs are written per cell and the summary last, in grid order.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "morl/generators.hpp"
#include "morl/hard_instances.hpp"
#include "morl/io.hpp"
#include "morl/online.hpp"
#include "morl/pfe.hpp"

namespace morl {

inline constexpr std::uint64_t kPreferenceStream = 0x70726566;
inline constexpr std::uint64_t kAgentStream = 0x6167656e;
inline constexpr std::uint64_t kExplorationStream = 0x6578706c;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnvironmentSpec {
    std::string kind = "random"; ///< random | file | two-state | basic | full
    std::size_t states = 20;
    std::size_t actions = 5;
    std::size_t horizon = 10;
    std::size_t objectives = 15;
    std::uint64_t seed = 7;
    std::string file;
    double eps = 0.2;
    std::size_t leaves = 2;
    double jl_eps = 0.25;
};

struct AdversarySpec {
    std::string kind = "iid"; ///< iid | fixed | cyclic | greedy | oracle
    std::vector<double> weights; ///< fixed: w; cyclic: concatenated cycle
    std::size_t resolution = 10; ///< oracle lattice resolution
};

struct ExperimentConfig {
    std::string kind = "online"; ///< online | pfe
    EnvironmentSpec env;
    std::vector<std::string> agents{"mo-ucbvi"};
    AdversarySpec adversary;
    std::size_t episodes = 5000;
    std::vector<std::uint64_t> seeds{0};
    std::uint64_t master_seed = 2021;
    double scale = 0.1;
    double delta = 0.1;
    std::vector<std::size_t> pfe_budgets{5000, 20000};
    std::size_t pac_resolution = 4;
    std::string label_suffix;
    std::string out_dir;
    std::size_t threads = 0; ///< 0 = hardware concurrency

    void validate() const;
};

inline const std::vector<std::string>& known_agents() {
    static const std::vector<std::string> names{"mo-ucbvi", "mo-ucbvi-bernstein",
                                                "best-in-hindsight", "q-learning"};
    return names;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (auto t = trim(item); !t.empty()) out.push_back(t);
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("bad value for '" + key + "': " + v);
    return out;
}

template <class T>
std::vector<T> parse_numbers(const std::string& key, const std::string& v) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(parse_number<T>(key, item));
    return out;
}

} // namespace detail

inline void ExperimentConfig::validate() const {
    if (kind != "online" && kind != "pfe") throw ConfigError("kind must be online or pfe");
    const std::vector<std::string> envs{"random", "file", "two-state", "basic", "full"};
    if (std::find(envs.begin(), envs.end(), env.kind) == envs.end())
        throw ConfigError("unknown env '" + env.kind + "'");
    if (env.kind == "file" && env.file.empty()) throw ConfigError("env=file needs env.file");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    auto sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ConfigError("seeds must be distinct");
    if (!(scale > 0.0)) throw ConfigError("scale must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    if (kind == "online") {
        if (agents.empty()) throw ConfigError("agents must not be empty");
        for (const auto& a : agents)
            if (std::find(known_agents().begin(), known_agents().end(), a) == known_agents().end())
                throw ConfigError("unknown agent '" + a + "'");
        const std::vector<std::string> advs{"iid", "fixed", "cyclic", "greedy", "oracle"};
        if (std::find(advs.begin(), advs.end(), adversary.kind) == advs.end())
            throw ConfigError("unknown adversary '" + adversary.kind + "'");
        const bool adaptive = adversary.kind == "greedy" || adversary.kind == "oracle";
        if (adaptive && std::find(agents.begin(), agents.end(), "best-in-hindsight") != agents.end())
            throw ConfigError("best-in-hindsight needs a non-adaptive adversary");
        if ((adversary.kind == "fixed" || adversary.kind == "cyclic") && adversary.weights.empty())
            throw ConfigError("adversary." + adversary.kind + " needs adversary.weights");
    } else {
        if (pfe_budgets.empty()) throw ConfigError("pfe.budgets must not be empty");
        if (pac_resolution == 0) throw ConfigError("pfe.resolution must be positive");
    }
}

/// Parses the flat `key = value` format ('#' starts a comment). Unknown keys
/// are errors.
inline ExperimentConfig parse_config(std::istream& is) {
    using detail::parse_number;
    ExperimentConfig c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto val = detail::trim(line.substr(eq + 1));

        if (key == "kind") c.kind = val;
        else if (key == "env") c.env.kind = val;
        else if (key == "env.states") c.env.states = parse_number<std::size_t>(key, val);
        else if (key == "env.actions") c.env.actions = parse_number<std::size_t>(key, val);
        else if (key == "env.horizon") c.env.horizon = parse_number<std::size_t>(key, val);
        else if (key == "env.objectives") c.env.objectives = parse_number<std::size_t>(key, val);
        else if (key == "env.seed") c.env.seed = parse_number<std::uint64_t>(key, val);
        else if (key == "env.file") c.env.file = val;
        else if (key == "env.eps") c.env.eps = parse_number<double>(key, val);
        else if (key == "env.leaves") c.env.leaves = parse_number<std::size_t>(key, val);
        else if (key == "env.jl_eps") c.env.jl_eps = parse_number<double>(key, val);
        else if (key == "agents") c.agents = detail::split_list(val);
        else if (key == "adversary") c.adversary.kind = val;
        else if (key == "adversary.weights") c.adversary.weights = detail::parse_numbers<double>(key, val);
        else if (key == "adversary.resolution") c.adversary.resolution = parse_number<std::size_t>(key, val);
        else if (key == "episodes") c.episodes = parse_number<std::size_t>(key, val);
        else if (key == "seeds") c.seeds = detail::parse_numbers<std::uint64_t>(key, val);
        else if (key == "master_seed") c.master_seed = parse_number<std::uint64_t>(key, val);
        else if (key == "scale") c.scale = parse_number<double>(key, val);
        else if (key == "delta") c.delta = parse_number<double>(key, val);
        else if (key == "pfe.budgets") c.pfe_budgets = detail::parse_numbers<std::size_t>(key, val);
        else if (key == "pfe.resolution") c.pac_resolution = parse_number<std::size_t>(key, val);
        else if (key == "label_suffix") c.label_suffix = val;
        else if (key == "out") c.out_dir = val;
        else if (key == "threads") c.threads = parse_number<std::size_t>(key, val);
        else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path);
    return parse_config(f);
}

inline EnvironmentSpec random_environment(std::size_t S, std::size_t A, std::size_t H, std::size_t d,
                                          std::uint64_t seed) {
    EnvironmentSpec e;
    e.states = S;
    e.actions = A;
    e.horizon = H;
    e.objectives = d;
    e.seed = seed;
    return e;
}

/// Named presets. `figure3` expands to one config per objective count.
inline std::vector<ExperimentConfig> preset(const std::string& name) {
    ExperimentConfig base;
    base.env = random_environment(20, 5, 10, 15, 7);
    base.episodes = 5000;
    base.scale = 0.1;
    if (name == "figure1") {
        base.agents = {"mo-ucbvi", "best-in-hindsight"};
        return {base};
    }
    if (name == "figure2") {
        base.agents = {"mo-ucbvi", "q-learning"};
        return {base};
    }
    if (name == "figure3") {
        std::vector<ExperimentConfig> out;
        for (std::size_t d : {1, 5, 15, 20, 30}) {
            auto c = base;
            c.env.objectives = d;
            c.agents = {"mo-ucbvi"};
            c.label_suffix = "-d" + std::to_string(d);
            out.push_back(c);
        }
        return out;
    }
    if (name == "pfe-scaling") {
        base.kind = "pfe";
        base.env = random_environment(6, 3, 5, 3, 42);
        base.seeds = {0, 1, 2, 3, 4};
        base.pfe_budgets = {5000, 20000};
        base.pac_resolution = 4;
        return {base};
    }
    throw ConfigError("unknown preset '" + name + "'");
}

inline std::vector<std::string> preset_names() {
    return {"figure1", "figure2", "figure3", "pfe-scaling"};
}

inline Momdp build_environment(const EnvironmentSpec& e, std::uint64_t master) {
    if (e.kind == "random") return random_momdp(e.states, e.actions, e.horizon, e.objectives, e.seed);
    if (e.kind == "file") return load_momdp(e.file);
    if (e.kind == "two-state") return two_state_momdp();
    Rng rng(derive_seed(master, {e.seed}));
    if (e.kind == "basic") return basic_instance(e.objectives, e.actions, e.eps, rng).mdp;
    if (e.kind == "full") {
        FullInstanceParams p;
        p.leaves = e.leaves;
        p.objectives = e.objectives;
        p.actions = e.actions;
        p.horizon = e.horizon;
        p.eps = e.eps;
        p.jl_eps = e.jl_eps;
        return full_instance(p, rng).mdp;
    }
    throw ConfigError("unknown env '" + e.kind + "'");
}

namespace detail {

inline std::vector<Preference> split_preferences(const std::vector<double>& flat, std::size_t d) {
    if (flat.empty() || flat.size() % d != 0)
        throw ConfigError("adversary.weights must hold whole preference vectors of size " +
                          std::to_string(d));
    std::vector<Preference> out;
    for (std::size_t i = 0; i < flat.size(); i += d)
        out.emplace_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(i),
                                             flat.begin() + static_cast<std::ptrdiff_t>(i + d)));
    return out;
}

inline PreferenceSource make_source(const AdversarySpec& a, const Momdp& env, std::uint64_t seed) {
    const std::size_t d = env.num_objectives();
    if (a.kind == "iid") return PreferenceSource::iid(d, seed);
    if (a.kind == "fixed") return PreferenceSource::fixed(split_preferences(a.weights, d).at(0));
    if (a.kind == "cyclic") return PreferenceSource::cyclic(split_preferences(a.weights, d));
    if (a.kind == "greedy") return PreferenceSource::greedy(env);
    if (a.kind == "oracle") return PreferenceSource::oracle(env, a.resolution);
    throw ConfigError("unknown adversary '" + a.kind + "'");
}

/// Runs `jobs(i)` for i < n on up to `threads` workers.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    job(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

/// Runs one online cell.
inline EpisodeLog run_cell(const ExperimentConfig& cfg, const Momdp& env, std::size_t agent_index,
                           std::size_t seed_index) {
    const std::string& agent = cfg.agents.at(agent_index);
    const std::uint64_t pref_seed = derive_seed(cfg.master_seed, {kPreferenceStream, seed_index});
    Rng rng(derive_seed(cfg.master_seed, {kAgentStream, agent_index, seed_index}));

    PreferenceSource src = detail::make_source(cfg.adversary, env, pref_seed);
    if (!src.adaptive()) src = PreferenceSource::cyclic(src.take(std::max<std::size_t>(cfg.episodes, 1)));

    EpisodeLog log;
    if (agent == "best-in-hindsight") {
        const auto prefs = src.take(cfg.episodes);
        log = run_best_in_hindsight(env, prefs);
    } else if (agent == "q-learning") {
        log = run_q_learning(env, src, cfg.episodes, QLearningParams::with_scale(cfg.scale), rng);
    } else {
        const auto variant = agent == "mo-ucbvi" ? OnlineVariant::Hoeffding : OnlineVariant::Bernstein;
        log = run_online(env, src, cfg.episodes, variant,
                         BonusParams::for_model(env, cfg.episodes, cfg.delta, cfg.scale), rng);
    }
    log.agent = agent + cfg.label_suffix;
    log.seed = cfg.seeds.at(seed_index);
    return log;
}

struct PfeRecord {
    std::uint64_t seed = 0;
    std::size_t episodes = 0;
    double pac_error = 0.0;
};

struct ExperimentResult {
    std::vector<EpisodeLog> logs;         ///< online: agent-major, then seed
    std::vector<PfeRecord> pfe;           ///< pfe: budget-major, then seed
    std::vector<std::filesystem::path> files;
};

inline std::string cell_file_name(const EpisodeLog& log) {
    return log.agent + "_seed" + std::to_string(log.seed) + ".csv";
}

inline void write_summary_csv(std::ostream& os, const std::vector<EpisodeLog>& logs) {
    os << "agent,seed,episodes,final_regret\n";
    const auto old = os.precision(17);
    for (const auto& l : logs) os << l.agent << ',' << l.seed << ',' << l.size() << ',' << l.final_regret() << '\n';
    os.precision(old);
}

inline void write_pfe_csv(std::ostream& os, const std::vector<PfeRecord>& recs) {
    os << "seed,episodes,pac_error\n";
    const auto old = os.precision(17);
    for (const auto& r : recs) os << r.seed << ',' << r.episodes << ',' << r.pac_error << '\n';
    os.precision(old);
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Momdp env = build_environment(cfg.env, cfg.master_seed);
    if (auto rep = validate(env); !rep.ok())
        throw ConfigError("environment is invalid: " + rep.violations.front().message);

    ExperimentResult res;
    const std::size_t nseeds = cfg.seeds.size();
    if (cfg.kind == "online") {
        res.logs.resize(cfg.agents.size() * nseeds);
        detail::parallel_for(res.logs.size(), cfg.threads, [&](std::size_t i) {
            res.logs[i] = run_cell(cfg, env, i / nseeds, i % nseeds);
        });
    } else {
        const PfeParams params{cfg.delta, cfg.scale};
        const auto grid = default_pac_grid(env.num_objectives(), cfg.pac_resolution);
        res.pfe.resize(cfg.pfe_budgets.size() * nseeds);
        detail::parallel_for(res.pfe.size(), cfg.threads, [&](std::size_t i) {
            const std::size_t K = cfg.pfe_budgets[i / nseeds], si = i % nseeds;
            Rng rng(derive_seed(cfg.master_seed, {kExplorationStream, K, si}));
            const auto ex = explore(env, K, params, rng);
            res.pfe[i] = {cfg.seeds[si], K, pac_error(env, ex.history, params, grid)};
        });
    }

    if (!cfg.out_dir.empty()) {
        const std::filesystem::path dir(cfg.out_dir);
        std::filesystem::create_directories(dir);
        auto write = [&](const std::filesystem::path& p, auto&& body) {
            std::ofstream f(p);
            if (!f) throw std::runtime_error("cannot write " + p.string());
            body(f);
            res.files.push_back(p);
        };
        for (const auto& log : res.logs)
            write(dir / cell_file_name(log), [&](std::ostream& os) { write_episode_log_csv(os, log); });
        if (cfg.kind == "online")
            write(dir / ("summary" + cfg.label_suffix + ".csv"),
                  [&](std::ostream& os) { write_summary_csv(os, res.logs); });
        else
            write(dir / "pfe_summary.csv", [&](std::ostream& os) { write_pfe_csv(os, res.pfe); });
    }
    return res;
}

/// Long-format plot table
///   episode,agent,seed,regret_cum,agent_mean,agent_min,agent_max
/// where the last three columns aggregate regret_cum over the seeds of the
/// same agent at that episode. All logs must have the same length.
inline void emit_plot_data(std::ostream& os, const std::vector<EpisodeLog>& logs) {
    if (logs.empty()) throw std::invalid_argument("emit_plot_data: no logs");
    const std::size_t K = logs.front().size();
    for (const auto& l : logs)
        if (l.size() != K) throw std::invalid_argument("emit_plot_data: logs have mismatched lengths");

    std::vector<std::string> agents;
    for (const auto& l : logs)
        if (std::find(agents.begin(), agents.end(), l.agent) == agents.end()) agents.push_back(l.agent);

    os << "episode,agent,seed,regret_cum,agent_mean,agent_min,agent_max\n";
    const auto old = os.precision(17);
    for (const auto& agent : agents) {
        std::vector<const EpisodeLog*> group;
        for (const auto& l : logs)
            if (l.agent == agent) group.push_back(&l);
        for (std::size_t k = 0; k < K; ++k) {
            double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto* l : group) {
                const double r = l->records[k].regret_cum;
                sum += r;
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            const double mean = sum / static_cast<double>(group.size());
            for (const auto* l : group)
                os << l->records[k].episode << ',' << agent << ',' << l->seed << ','
                   << l->records[k].regret_cum << ',' << mean << ',' << lo << ',' << hi << '\n';
        }
    }
    os.precision(old);
}

} // namespace morl
