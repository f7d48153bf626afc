#pragma once

// Exploration bonuses and optimistic / pessimistic backward induction.

#include "morl/dynamic_programming.hpp"
#include "morl/model_estimation.hpp"

namespace morl {

/// Constants entering the confidence bonuses.
///
/// iota = log(6 H^2 S A K / (delta * eps)); `scale` multiplies every bonus.
struct BonusParams {
    std::size_t d_eff = 1;
    std::size_t horizon = 1;
    std::size_t states = 1;
    std::size_t actions = 1;
    std::size_t episodes = 1;
    double delta = 0.1;
    double eps = 1.0;
    double scale = 1.0;
    /// Overrides the computed log factor when set.
    std::optional<double> iota_override;

    /// d_eff = min{d, S}, eps = 1/K.
    static BonusParams for_model(const Momdp& m, std::size_t episodes, double delta = 0.1,
                                 double scale = 1.0) {
        BonusParams p;
        p.d_eff = std::min(m.num_objectives(), m.num_states());
        p.horizon = m.horizon();
        p.states = m.num_states();
        p.actions = m.num_actions();
        p.episodes = std::max<std::size_t>(episodes, 1);
        p.delta = delta;
        p.eps = 1.0 / static_cast<double>(p.episodes);
        p.scale = scale;
        p.validate();
        return p;
    }

    double iota() const {
        if (iota_override) return *iota_override;
        const double H = static_cast<double>(horizon);
        return std::log(6.0 * H * H * static_cast<double>(states) *
                        static_cast<double>(actions) * static_cast<double>(episodes) /
                        (delta * eps));
    }

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("BonusParams: delta");
        if (!(eps > 0.0)) throw std::invalid_argument("BonusParams: eps");
        if (!(scale > 0.0)) throw std::invalid_argument("BonusParams: scale");
        if (d_eff == 0 || horizon == 0 || states == 0 || actions == 0 || episodes == 0)
            throw std::invalid_argument("BonusParams: counts must be positive");
        if (!(iota() > 0.0)) throw std::invalid_argument("BonusParams: iota must be positive");
    }
};

/// scale * (2 eps + sqrt(d_eff H^2 iota / (2n))); H when n = 0.
inline double hoeffding_bonus(double n, const BonusParams& p) {
    const double H = static_cast<double>(p.horizon);
    if (n <= 0.0) return H;
    return p.scale *
           (2.0 * p.eps + std::sqrt(static_cast<double>(p.d_eff) * H * H * p.iota() / (2.0 * n)));
}

/// Hoeffding bonus for every (x,a), laid out like the counts.
inline StateActionTable hoeffding_bonus_table(const VisitCounts& c, const BonusParams& p) {
    StateActionTable b = visit_table(c);
    for (std::size_t l = 0; l < b.num_layers(); ++l)
        for (std::size_t x = 0; x < b.num_states(); ++x)
            for (std::size_t a = 0; a < b.num_actions(); ++a) b(l, x, a) = hoeffding_bonus(b(l, x, a), p);
    return b;
}

/// Clipped optimistic backward induction:
/// Q_h = min{H, r_h + b + P̂_h V_{h+1}}, V_h = max_a Q_h, V_{H} = 0.
inline OptimalSolution ucb_q(const TransitionKernel& P, const StateActionTable& reward,
                             const StateActionTable& bonus, std::size_t horizon) {
    const std::size_t S = P.num_states(), A = P.num_actions(), H = horizon;
    const double cap = static_cast<double>(H);
    OptimalSolution sol{ValueTables(H, S, A), DeterministicPolicy(H, S)};
    auto& t = sol.values;
    for (std::size_t h = H; h-- > 0;) {
        auto next = t.V(h + 1);
        for (std::size_t x = 0; x < S; ++x) {
            for (std::size_t a = 0; a < A; ++a) {
                const double b = bonus(h, x, a);
                if (b < 0.0) throw std::invalid_argument("ucb_q: negative bonus");
                t.Q(h, x, a) = std::min(cap, reward(h, x, a) + b + expectation(P.row(h, x, a), next));
            }
            const std::size_t best = greedy_action(t.q, h, x);
            sol.policy(h, x) = best;
            t.V(h, x) = t.Q(h, x, best);
        }
    }
    return sol;
}

inline OptimalSolution ucb_q(const TransitionKernel& P, const RewardTensor& r,
                             const Preference& w, const StateActionTable& bonus) {
    return ucb_q(P, scalarize(r, w), bonus, r.horizon());
}

/// Σ_y P(y) (V(y) - PV)^2.
inline double one_step_variance(std::span<const double> p, std::span<const double> v) {
    const double mean = expectation(p, v);
    double s = 0.0;
    for (std::size_t y = 0; y < p.size(); ++y) {
        const double dev = v[y] - mean;
        s += p[y] * dev * dev;
    }
    return s;
}

/// Upper and lower value estimates of the Bernstein variant.
struct BernsteinTables {
    ValueTables upper;
    ValueTables lower;
    DeterministicPolicy policy;
};

/// Interleaved upper/lower backward induction with variance-aware bonuses.
///
/// At step h the bonuses use the empirical standard deviations of the step-
/// (h+1) estimates:
///   b = scale (2 eps + sqrt(2 d_eff iota / N) (σ(V̄) + σ(V̄ - V̲)) + 7 d_eff H iota / (3N))
///   a = same with σ(V̲) in place of σ(V̄)
/// and both equal H when N = 0. The upper estimate is clipped at H, the lower
/// at 0, and V̲_h(x) follows the greedy action of Q̄.
inline BernsteinTables bernstein_plan(const TransitionKernel& P, const StateActionTable& reward,
                                      const VisitCounts& counts, const BonusParams& p) {
    const std::size_t S = P.num_states(), A = P.num_actions(), H = p.horizon;
    const double cap = static_cast<double>(H);
    const double iota = p.iota();
    const double d_eff = static_cast<double>(p.d_eff);

    BernsteinTables out{ValueTables(H, S, A), ValueTables(H, S, A), DeterministicPolicy(H, S)};
    auto& up = out.upper;
    auto& lo = out.lower;
    std::vector<double> gap(S);

    for (std::size_t h = H; h-- > 0;) {
        auto up_next = up.V(h + 1);
        auto lo_next = lo.V(h + 1);
        for (std::size_t y = 0; y < S; ++y) gap[y] = up_next[y] - lo_next[y];

        for (std::size_t x = 0; x < S; ++x) {
            for (std::size_t a = 0; a < A; ++a) {
                auto row = P.row(h, x, a);
                const double n = static_cast<double>(counts.n_sa(h, x, a));
                double b_up = cap, b_lo = cap;
                if (n > 0.0) {
                    const double root = std::sqrt(2.0 * d_eff * iota / n);
                    const double sd_gap = std::sqrt(one_step_variance(row, gap));
                    const double lower_order = 7.0 * d_eff * cap * iota / (3.0 * n);
                    b_up = p.scale * (2.0 * p.eps +
                                      root * (std::sqrt(one_step_variance(row, up_next)) + sd_gap) +
                                      lower_order);
                    b_lo = p.scale * (2.0 * p.eps +
                                      root * (std::sqrt(one_step_variance(row, lo_next)) + sd_gap) +
                                      lower_order);
                }
                up.Q(h, x, a) = std::min(cap, reward(h, x, a) + b_up + expectation(row, up_next));
                lo.Q(h, x, a) = std::max(0.0, reward(h, x, a) - b_lo + expectation(row, lo_next));
            }
            const std::size_t best = greedy_action(up.q, h, x);
            out.policy(h, x) = best;
            up.V(h, x) = up.Q(h, x, best);
            lo.V(h, x) = lo.Q(h, x, best);
        }
    }
    return out;
}

inline BernsteinTables bernstein_plan(const TransitionKernel& P, const RewardTensor& r,
                                      const Preference& w, const VisitCounts& counts,
                                      const BonusParams& p) {
    return bernstein_plan(P, scalarize(r, w), counts, p);
}

} // namespace morl
