#pragma once

// Exact finite-horizon dynamic programming and episode simulation.

#include <random>

#include "morl/momdp.hpp"

namespace morl {

/// Σ_y p(y) v(y). Every backward induction in the library goes through this
/// so that identical inputs produce bit-identical values.
inline double expectation(std::span<const double> p, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t y = 0; y < p.size(); ++y) s += p[y] * v[y];
    return s;
}

/// Lowest-index argmax.
inline std::size_t greedy_action(const StateActionTable& q, std::size_t h, std::size_t x) {
    std::size_t best = 0;
    double best_q = q(h, x, 0);
    for (std::size_t a = 1; a < q.num_actions(); ++a)
        if (q(h, x, a) > best_q) {
            best_q = q(h, x, a);
            best = a;
        }
    return best;
}

/// Evaluates a fixed policy on a scalar reward table under kernel `P`.
inline ValueTables policy_value(const TransitionKernel& P, const StateActionTable& reward,
                                const DeterministicPolicy& pi) {
    const std::size_t S = P.num_states(), A = P.num_actions(), H = pi.horizon();
    ValueTables t(H, S, A);
    for (std::size_t h = H; h-- > 0;) {
        auto next = t.V(h + 1);
        for (std::size_t x = 0; x < S; ++x) {
            for (std::size_t a = 0; a < A; ++a)
                t.Q(h, x, a) = reward(h, x, a) + expectation(P.row(h, x, a), next);
            t.V(h, x) = t.Q(h, x, pi(h, x));
        }
    }
    return t;
}

/// Exact V^π and Q^π for preference w.
inline ValueTables policy_value(const Momdp& m, const DeterministicPolicy& pi,
                                const Preference& w) {
    check_policy(m, pi);
    return policy_value(m.transitions, scalarize(m.rewards, w), pi);
}

struct OptimalSolution {
    ValueTables values;
    DeterministicPolicy policy;
};

/// Optimal Bellman recursion on a scalar reward table.
inline OptimalSolution optimal_value(const TransitionKernel& P, const StateActionTable& reward,
                                     std::size_t horizon) {
    const std::size_t S = P.num_states(), A = P.num_actions(), H = horizon;
    OptimalSolution sol{ValueTables(H, S, A), DeterministicPolicy(H, S)};
    auto& t = sol.values;
    for (std::size_t h = H; h-- > 0;) {
        auto next = t.V(h + 1);
        for (std::size_t x = 0; x < S; ++x) {
            for (std::size_t a = 0; a < A; ++a)
                t.Q(h, x, a) = reward(h, x, a) + expectation(P.row(h, x, a), next);
            const std::size_t best = greedy_action(t.q, h, x);
            sol.policy(h, x) = best;
            t.V(h, x) = t.Q(h, x, best);
        }
    }
    return sol;
}

/// Exact V*, Q* and the greedy optimal policy (ties to the lowest action).
inline OptimalSolution optimal_value(const Momdp& m, const Preference& w) {
    return optimal_value(m.transitions, scalarize(m.rewards, w), m.horizon());
}

/// Σ_i weight_i · V^{π_i}_1(x1; w).
inline double mixture_value(const Momdp& m, const MixturePolicy& mix, const Preference& w) {
    if (mix.members.empty() || mix.members.size() != mix.weights.size())
        throw std::invalid_argument("mixture_value: malformed mixture");
    const auto reward = scalarize(m.rewards, w);
    double total = 0.0;
    for (std::size_t i = 0; i < mix.members.size(); ++i) {
        check_policy(m, mix.members[i]);
        total += mix.weights[i] *
                 policy_value(m.transitions, reward, mix.members[i]).V(0, m.initial_state);
    }
    return total;
}

/// Draws y ~ row by inverse CDF. Falls back to the last state with positive
/// mass when rounding leaves the uniform draw above the cumulative sum.
template <class Rng>
std::size_t sample_next_state(std::span<const double> row, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double cum = 0.0;
    std::size_t last = 0;
    for (std::size_t y = 0; y < row.size(); ++y) {
        if (row[y] <= 0.0) continue;
        cum += row[y];
        last = y;
        if (u < cum) return y;
    }
    return last;
}

/// Runs π for one episode from the initial state; states and actions only.
template <class Rng>
std::vector<Step> rollout(const Momdp& m, const DeterministicPolicy& pi, Rng& rng) {
    std::vector<Step> steps;
    steps.reserve(m.horizon());
    std::size_t x = m.initial_state;
    for (std::size_t h = 0; h < m.horizon(); ++h) {
        const std::size_t a = pi(h, x);
        steps.push_back({x, a});
        if (h + 1 < m.horizon()) x = sample_next_state(m.transitions.row(h, x, a), rng);
    }
    return steps;
}

/// One episode of Protocol-style interaction under preference w.
template <class Rng>
Trajectory sample_episode(const Momdp& m, const DeterministicPolicy& pi, const Preference& w,
                          Rng& rng) {
    check_policy(m, pi);
    if (w.size() != m.num_objectives())
        throw std::invalid_argument("sample_episode: preference dimension mismatch");
    Trajectory t{rollout(m, pi, rng), 0.0, w};
    for (std::size_t h = 0; h < t.steps.size(); ++h)
        t.scalar_return += scalarize(m.rewards.at(h, t.steps[h].state, t.steps[h].action), w);
    return t;
}

} // namespace morl
