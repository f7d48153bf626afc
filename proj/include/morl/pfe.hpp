#pragma once

// Preference-free exploration: zero-preference optimistic exploration, then
// preference-conditioned planning from the recorded history alone.

#include "morl/dynamic_programming.hpp"
#include "morl/optimistic_planning.hpp"
#include "morl/preference_sources.hpp"

namespace morl {

enum class ExplorationBonusForm {
    /// c = 3 H^2 S iota / N + 2b
    Refined,
    /// c = H^2 S / (2N) + 2b
    Simple,
};

struct PfeParams {
    double delta = 0.1;
    double scale = 1.0;
    ExplorationBonusForm form = ExplorationBonusForm::Refined;
    /// Plan on every `stride`-th history prefix.
    std::size_t stride = 1;

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("PfeParams: delta");
        if (!(scale > 0.0)) throw std::invalid_argument("PfeParams: scale");
        if (stride == 0) throw std::invalid_argument("PfeParams: stride");
    }

    BonusParams bonus(const Momdp& m, std::size_t episodes) const {
        return BonusParams::for_model(m, episodes, delta, scale);
    }
};

/// Exploration bonus for N visits. Equals H at N = 0; otherwise at least
/// twice the planning bonus hoeffding_bonus(n, p).
inline double exploration_bonus(double n, const BonusParams& p, ExplorationBonusForm form) {
    const double H = static_cast<double>(p.horizon);
    if (n <= 0.0) return H;
    const double S = static_cast<double>(p.states);
    const double extra = form == ExplorationBonusForm::Refined ? 3.0 * H * H * S * p.iota() / n
                                                                : H * H * S / (2.0 * n);
    const double c = p.scale * extra + 2.0 * hoeffding_bonus(n, p);
    if (!(c >= 2.0 * hoeffding_bonus(n, p)))
        throw std::logic_error("exploration_bonus: planning bonus not dominated");
    return c;
}

struct ExplorationResult {
    HistoryBuffer history;
    /// Zero-preference optimistic root value V̄^k_1(x1) per episode.
    std::vector<double> root_values;
};

/// Runs K episodes of reward-free optimistic exploration.
template <class G>
ExplorationResult explore(const Momdp& env, std::size_t episodes, const PfeParams& params, G& rng) {
    params.validate();
    if (!validate(env).ok()) throw std::invalid_argument("explore: invalid model");
    const std::size_t S = env.num_states(), A = env.num_actions(), H = env.horizon();
    const BonusParams bp = params.bonus(env, episodes);
    const StateActionTable zero(1, S, A, 0.0);

    ExplorationResult out{HistoryBuffer(S, A, H, !env.stationary()), {}};
    out.root_values.reserve(episodes);
    for (std::size_t k = 0; k < episodes; ++k) {
        const auto& counts = out.history.counts();
        const TransitionKernel model = empirical_transitions(counts);
        StateActionTable bonus = visit_table(counts);
        for (std::size_t l = 0; l < bonus.num_layers(); ++l)
            for (std::size_t x = 0; x < S; ++x)
                for (std::size_t a = 0; a < A; ++a)
                    bonus(l, x, a) = exploration_bonus(bonus(l, x, a), bp, params.form);

        const auto sol = ucb_q(model, zero, bonus, H);
        out.root_values.push_back(sol.values.V(0, env.initial_state));
        out.history.append(Trajectory{rollout(env, sol.policy, rng), 0.0, std::nullopt});
    }
    return out;
}

namespace detail {

inline void check_history(const HistoryBuffer& history, const Momdp& env) {
    if (history.empty()) throw std::invalid_argument("plan: empty history");
    if (history.num_states() != env.num_states() || history.num_actions() != env.num_actions() ||
        history.horizon() != env.horizon())
        throw std::invalid_argument("plan: history does not match the model");
    if (history.per_step() == env.stationary())
        throw std::invalid_argument("plan: history and model disagree on stationarity");
}

inline DeterministicPolicy plan_member(const VisitCounts& counts, const StateActionTable& reward,
                                       const BonusParams& bp) {
    return ucb_q(empirical_transitions(counts), reward, hoeffding_bonus_table(counts, bp), bp.horizon).policy;
}

} // namespace detail

/// Uniform mixture of the greedy policies planned on each history prefix
/// (episodes 0..k-1 for k = 0, stride, 2*stride, ...). Uses only the history
/// and the known rewards.
inline MixturePolicy plan(const HistoryBuffer& history, const Momdp& env, const Preference& w,
                          const PfeParams& params) {
    params.validate();
    detail::check_history(history, env);

    const BonusParams bp = params.bonus(env, history.size());
    const StateActionTable reward = scalarize(env.rewards, w);

    std::vector<DeterministicPolicy> members;
    VisitCounts counts(env.num_states(), env.num_actions(), history.per_step() ? env.horizon() : 1);
    for (std::size_t k = 0; k < history.size(); ++k) {
        if (k % params.stride == 0) members.push_back(detail::plan_member(counts, reward, bp));
        counts.update(history.episodes()[k]);
    }
    return MixturePolicy::uniform(std::move(members));
}

/// Same, from an explicit sequence of prefix counts N^1..N^K (one mixture
/// member per entry, `stride` ignored). Lets synthetic counts stand in for a
/// history.
inline MixturePolicy plan(std::span<const VisitCounts> prefixes, const Momdp& env, const Preference& w,
                          const PfeParams& params) {
    params.validate();
    if (prefixes.empty()) throw std::invalid_argument("plan: no prefix counts");
    const BonusParams bp = params.bonus(env, prefixes.size());
    const StateActionTable reward = scalarize(env.rewards, w);
    std::vector<DeterministicPolicy> members;
    for (const auto& c : prefixes) {
        if (c.num_states() != env.num_states() || c.num_actions() != env.num_actions() ||
            c.stationary() != env.stationary())
            throw std::invalid_argument("plan: counts do not match the model");
        members.push_back(detail::plan_member(c, reward, bp));
    }
    return MixturePolicy::uniform(std::move(members));
}

/// Default PAC grid: simplex vertices plus the lattice of step 1/resolution.
inline std::vector<Preference> default_pac_grid(std::size_t d, std::size_t resolution = 4) {
    return simplex_lattice(d, resolution);
}

namespace detail {

inline void check_grid(const Momdp& env, std::span<const Preference> grid) {
    if (grid.empty()) throw std::invalid_argument("pac_error: empty grid");
    const std::size_t d = env.num_objectives();
    for (std::size_t i = 0; i < d; ++i) {
        const auto e = Preference::vertex(d, i);
        if (std::find(grid.begin(), grid.end(), e) == grid.end())
            throw std::invalid_argument("pac_error: grid must contain every simplex vertex");
    }
}

template <class Data>
std::vector<double> pac_errors_impl(const Momdp& env, const Data& data, const PfeParams& params,
                                    std::span<const Preference> grid) {
    check_grid(env, grid);
    std::vector<double> out;
    out.reserve(grid.size());
    for (const auto& w : grid) {
        const double v_star = optimal_value(env, w).values.V(0, env.initial_state);
        out.push_back(v_star - mixture_value(env, plan(data, env, w, params), w));
    }
    return out;
}

} // namespace detail

/// Planning error V*_1(x1; w) - V^{mixture}_1(x1; w) for every grid point.
inline std::vector<double> pac_errors(const Momdp& env, const HistoryBuffer& history,
                                      const PfeParams& params, std::span<const Preference> grid) {
    return detail::pac_errors_impl(env, history, params, grid);
}

inline std::vector<double> pac_errors(const Momdp& env, std::span<const VisitCounts> prefixes,
                                      const PfeParams& params, std::span<const Preference> grid) {
    return detail::pac_errors_impl(env, prefixes, params, grid);
}

/// Worst planning error over the grid.
inline double pac_error(const Momdp& env, const HistoryBuffer& history, const PfeParams& params,
                        std::span<const Preference> grid) {
    const auto e = pac_errors(env, history, params, grid);
    return *std::max_element(e.begin(), e.end());
}

inline double pac_error(const Momdp& env, std::span<const VisitCounts> prefixes, const PfeParams& params,
                        std::span<const Preference> grid) {
    const auto e = pac_errors(env, prefixes, params, grid);
    return *std::max_element(e.begin(), e.end());
}

/// Order-level episode budget
///   (d∧S) H^3 S A iota / eps^2 + H^2 S^2 A iota^2 / eps,  iota = log(HSA/(delta eps)),
/// with unit leading constants, rounded up.
inline std::uint64_t sample_complexity(std::size_t d, std::size_t S, std::size_t A, std::size_t H,
                                       double eps, double delta) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("sample_complexity: eps and delta must lie in (0,1)");
    if (d == 0 || S == 0 || A == 0 || H == 0)
        throw std::invalid_argument("sample_complexity: sizes must be positive");
    const double dS = static_cast<double>(std::min(d, S));
    const double s = static_cast<double>(S), a = static_cast<double>(A), h = static_cast<double>(H);
    const double iota = std::log(h * s * a / (delta * eps));
    const double k = dS * h * h * h * s * a * iota / (eps * eps) + h * h * s * s * a * iota * iota / eps;
    return static_cast<std::uint64_t>(std::ceil(k));
}

} // namespace morl
