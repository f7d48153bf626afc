#pragma once

// Online multi-objective agents with exact expected-regret accounting.

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>

#include "morl/optimistic_planning.hpp"
#include "morl/preference_sources.hpp"

namespace morl {

enum class OnlineVariant { Hoeffding, Bernstein };

struct EpisodeRecord {
    std::size_t episode = 0;
    std::size_t preference_id = 0;
    std::vector<double> preference;
    double v_star = 0.0;
    double v_pi = 0.0;
    double regret_cum = 0.0;
};

struct EpisodeLog {
    std::string agent;
    std::uint64_t seed = 0;
    std::vector<EpisodeRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    double final_regret() const { return records.empty() ? 0.0 : records.back().regret_cum; }
    /// Cumulative regret after `k` episodes.
    double regret_at(std::size_t k) const { return k == 0 ? 0.0 : records.at(k - 1).regret_cum; }
};

/// Partial sums of V*_1 - V^{π^k}_1. Gaps within round-off of zero count as
/// zero, so the series is nonnegative and nondecreasing.
inline std::vector<double> cumulative_regret(const EpisodeLog& log) {
    std::vector<double> out;
    out.reserve(log.records.size());
    double total = 0.0;
    for (const auto& r : log.records) {
        total += std::max(0.0, r.v_star - r.v_pi);
        out.push_back(total);
    }
    return out;
}

/// Appends exact per-episode records to a log. V* is cached per distinct
/// preference, and distinct preferences are numbered in order of appearance.
class RegretRecorder {
public:
    RegretRecorder(const Momdp& env, std::string agent, std::uint64_t seed = 0)
        : env_(env) {
        log_.agent = std::move(agent);
        log_.seed = seed;
    }

    void record(const Preference& w, const DeterministicPolicy& pi) {
        auto [it, inserted] = cache_.try_emplace(w, Entry{cache_.size(), 0.0});
        if (inserted)
            it->second.v_star = optimal_value(env_, w).values.V(0, env_.initial_state);
        EpisodeRecord r;
        r.episode = log_.records.size() + 1;
        r.preference_id = it->second.id;
        r.preference.assign(w.weights().begin(), w.weights().end());
        r.v_star = it->second.v_star;
        r.v_pi = policy_value(env_, pi, w).V(0, env_.initial_state);
        total_ += std::max(0.0, r.v_star - r.v_pi);
        r.regret_cum = total_;
        log_.records.push_back(std::move(r));
    }

    EpisodeLog take() { return std::move(log_); }

private:
    struct Entry {
        std::size_t id;
        double v_star;
    };
    const Momdp& env_;
    std::map<Preference, Entry> cache_;
    EpisodeLog log_;
    double total_ = 0.0;
};

inline const char* agent_name(OnlineVariant v) {
    return v == OnlineVariant::Hoeffding ? "mo-ucbvi" : "mo-ucbvi-bernstein";
}

/// Runs MO-UCBVI for K episodes against `src`.
///
/// Each episode: rebuild the empirical model from the history, receive w^k,
/// plan optimistically, act greedily for one episode, extend the history.
/// Regret is logged in expectation via exact DP on the true model.
template <class G>
EpisodeLog run_online(const Momdp& env, PreferenceSource& src, std::size_t episodes,
                      OnlineVariant variant, const BonusParams& params, G& rng) {
    params.validate();
    if (!validate(env).ok()) throw std::invalid_argument("run_online: invalid model");
    if (src.dimension() != env.num_objectives())
        throw std::invalid_argument("run_online: preference dimension mismatch");

    RegretRecorder rec(env, agent_name(variant));
    VisitCounts counts(env.num_states(), env.num_actions(), env.stationary() ? 1 : env.horizon());
    const std::size_t H = env.horizon();

    for (std::size_t k = 0; k < episodes; ++k) {
        const TransitionKernel model = empirical_transitions(counts);
        StateActionTable bonus;
        if (variant == OnlineVariant::Hoeffding) bonus = hoeffding_bonus_table(counts, params);

        AgentView view = [&](const Preference& w) {
            if (variant == OnlineVariant::Hoeffding)
                return ucb_q(model, scalarize(env.rewards, w), bonus, H).policy;
            return bernstein_plan(model, scalarize(env.rewards, w), counts, params).policy;
        };
        const Preference w = src.next(&view);
        const DeterministicPolicy pi = view(w);
        counts.update(sample_episode(env, pi, w, rng));
        rec.record(w, pi);
    }
    return rec.take();
}

/// Policy maximizing Σ_k V^π_1(x1; w^k): by linearity in w, the optimal
/// policy for the mean preference.
inline DeterministicPolicy best_in_hindsight_policy(const Momdp& env,
                                                    std::span<const Preference> prefs) {
    if (prefs.empty()) throw std::invalid_argument("best_in_hindsight_policy: no preferences");
    std::vector<double> mean(prefs.front().size(), 0.0);
    for (const auto& w : prefs) {
        if (w.size() != mean.size())
            throw std::invalid_argument("best_in_hindsight_policy: mixed dimensions");
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += w[j];
    }
    for (double& v : mean) v /= static_cast<double>(prefs.size());
    return optimal_value(env, Preference::normalized(std::move(mean))).policy;
}

/// Plays the best-in-hindsight policy on a fixed preference sequence.
inline EpisodeLog run_best_in_hindsight(const Momdp& env, std::span<const Preference> prefs) {
    RegretRecorder rec(env, "best-in-hindsight");
    if (prefs.empty()) return rec.take();
    const auto pi = best_in_hindsight_policy(env, prefs);
    for (const auto& w : prefs) rec.record(w, pi);
    return rec.take();
}

/// Optimistic tabular Q-learning (Hoeffding form) on the scalarized reward of
/// each episode's preference.
struct QLearningParams {
    double bonus_constant = 0.1;
    double delta = 0.1;

    /// c_q = 0.1 * scale.
    static QLearningParams with_scale(double scale) { return {0.1 * scale, 0.1}; }
};

template <class G>
EpisodeLog run_q_learning(const Momdp& env, PreferenceSource& src, std::size_t episodes,
                          const QLearningParams& params, G& rng) {
    if (!(params.bonus_constant >= 0.0) || !(params.delta > 0.0 && params.delta < 1.0))
        throw std::invalid_argument("run_q_learning: invalid parameters");
    if (!validate(env).ok()) throw std::invalid_argument("run_q_learning: invalid model");
    if (src.dimension() != env.num_objectives())
        throw std::invalid_argument("run_q_learning: preference dimension mismatch");

    const std::size_t S = env.num_states(), A = env.num_actions(), H = env.horizon();
    const double cap = static_cast<double>(H);
    const double iota = std::log(static_cast<double>(S * A * H * std::max<std::size_t>(episodes, 1)) /
                                 params.delta);
    StateActionTable q(H, S, A, cap);
    StateActionTable n(H, S, A, 0.0);
    std::vector<double> v((H + 1) * S, cap);
    std::fill(v.begin() + static_cast<std::ptrdiff_t>(H * S), v.end(), 0.0);

    RegretRecorder rec(env, "q-learning");
    auto greedy = [&] {
        DeterministicPolicy pi(H, S);
        for (std::size_t h = 0; h < H; ++h)
            for (std::size_t x = 0; x < S; ++x) pi(h, x) = greedy_action(q, h, x);
        return pi;
    };

    for (std::size_t k = 0; k < episodes; ++k) {
        const DeterministicPolicy pi = greedy();
        AgentView view = [&pi](const Preference&) { return pi; };
        const Preference w = src.next(&view);
        const Trajectory t = sample_episode(env, pi, w, rng);
        for (std::size_t h = 0; h < H; ++h) {
            const auto [x, a] = t.steps[h];
            const double visits = (n(h, x, a) += 1.0);
            const double alpha = (cap + 1.0) / (cap + visits);
            const double bonus = params.bonus_constant * std::sqrt(cap * cap * cap * iota / visits);
            const double next = h + 1 < H ? v[(h + 1) * S + t.steps[h + 1].state] : 0.0;
            const double target = scalarize(env.rewards.at(h, x, a), w) + next + bonus;
            q(h, x, a) = (1.0 - alpha) * q(h, x, a) + alpha * target;
            v[h * S + x] = std::min(cap, q(h, x, greedy_action(q, h, x)));
        }
        rec.record(w, pi);
    }
    return rec.take();
}

// ---------------------------------------------------------------------------
// CSV: episode,agent,seed,preference_id,v_star,v_pi,regret_cum

inline constexpr const char* kEpisodeLogHeader =
    "episode,agent,seed,preference_id,v_star,v_pi,regret_cum";

inline void write_episode_log_csv(std::ostream& os, const EpisodeLog& log, bool header = true) {
    if (header) os << kEpisodeLogHeader << '\n';
    const auto old = os.precision(17);
    for (const auto& r : log.records)
        os << r.episode << ',' << log.agent << ',' << log.seed << ',' << r.preference_id << ','
           << r.v_star << ',' << r.v_pi << ',' << r.regret_cum << '\n';
    os.precision(old);
}

/// Parses one log (preferences themselves are not stored in the CSV).
inline EpisodeLog read_episode_log_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kEpisodeLogHeader)
        throw std::runtime_error("episode log: missing or unexpected header");
    EpisodeLog log;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 7) throw std::runtime_error("episode log: expected 7 columns: " + line);
        if (first) {
            log.agent = f[1];
            log.seed = std::stoull(f[2]);
            first = false;
        }
        EpisodeRecord r;
        r.episode = std::stoull(f[0]);
        r.preference_id = std::stoull(f[3]);
        r.v_star = std::stod(f[4]);
        r.v_pi = std::stod(f[5]);
        r.regret_cum = std::stod(f[6]);
        log.records.push_back(std::move(r));
    }
    return log;
}

} // namespace morl
