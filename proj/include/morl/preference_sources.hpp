#pragma once

// Preference sources for the online protocol: fixed, iid, cyclic and a greedy
// adversary that probes the agent's would-be plan for each candidate.

#include <functional>
#include <variant>

#include "morl/dynamic_programming.hpp"
#include "morl/random.hpp"

namespace morl {

/// All points of the simplex whose coordinates are multiples of 1/resolution.
/// Vertices come first, in coordinate order.
inline std::vector<Preference> simplex_lattice(std::size_t d, std::size_t resolution) {
    if (d == 0 || resolution == 0) throw std::invalid_argument("simplex_lattice: empty");
    std::vector<Preference> out;
    for (std::size_t i = 0; i < d; ++i) out.push_back(Preference::vertex(d, i));

    std::vector<std::size_t> parts(d, 0);
    const double step = 1.0 / static_cast<double>(resolution);
    auto emit = [&] {
        std::size_t nonzero = 0;
        for (auto k : parts) nonzero += k > 0;
        if (nonzero < 2) return;
        std::vector<double> w(d);
        for (std::size_t j = 0; j < d; ++j) w[j] = static_cast<double>(parts[j]) * step;
        out.push_back(Preference::normalized(std::move(w)));
    };
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t left) {
        if (j + 1 == d) {
            parts[j] = left;
            emit();
            return;
        }
        for (std::size_t k = 0; k <= left; ++k) {
            parts[j] = k;
            rec(j + 1, left - k);
        }
    };
    rec(0, resolution);
    return out;
}

/// The agent's plan for a candidate preference, queried without side effects.
using AgentView = std::function<DeterministicPolicy(const Preference&)>;

class PreferenceSource {
public:
    struct Fixed {
        Preference w;
    };
    struct Iid {
        std::size_t dim;
        Rng rng;
    };
    struct Cyclic {
        std::vector<Preference> cycle;
        std::size_t next = 0;
    };
    /// Picks the candidate maximizing V*_1(x1; w) - V^{π_w}_1(x1; w), where
    /// π_w is the agent's plan for w. Needs the true model.
    struct Greedy {
        const Momdp* env;
        std::vector<Preference> candidates;
        std::vector<double> v_star;
    };

    static PreferenceSource fixed(Preference w) { return PreferenceSource(Fixed{std::move(w)}); }

    static PreferenceSource iid(std::size_t dim, std::uint64_t seed) {
        if (dim == 0) throw std::invalid_argument("iid source: zero dimension");
        return PreferenceSource(Iid{dim, Rng(seed)});
    }

    static PreferenceSource cyclic(std::vector<Preference> cycle) {
        if (cycle.empty()) throw std::invalid_argument("cyclic source: empty cycle");
        return PreferenceSource(Cyclic{std::move(cycle), 0});
    }

    /// Cycles through the d simplex vertices.
    static PreferenceSource vertices(std::size_t dim) {
        std::vector<Preference> c;
        for (std::size_t i = 0; i < dim; ++i) c.push_back(Preference::vertex(dim, i));
        return cyclic(std::move(c));
    }

    /// Greedy adversary; `candidates` defaults to the simplex vertices.
    static PreferenceSource greedy(const Momdp& env, std::vector<Preference> candidates = {}) {
        if (candidates.empty())
            for (std::size_t i = 0; i < env.num_objectives(); ++i)
                candidates.push_back(Preference::vertex(env.num_objectives(), i));
        Greedy g{&env, std::move(candidates), {}};
        for (const auto& w : g.candidates) {
            if (w.size() != env.num_objectives())
                throw std::invalid_argument("greedy source: candidate dimension mismatch");
            g.v_star.push_back(optimal_value(env, w).values.V(0, env.initial_state));
        }
        return PreferenceSource(std::move(g));
    }

    /// Greedy adversary over a dense simplex lattice ("oracle mode").
    static PreferenceSource oracle(const Momdp& env, std::size_t resolution = 10) {
        return greedy(env, simplex_lattice(env.num_objectives(), resolution));
    }

    bool adaptive() const noexcept { return std::holds_alternative<Greedy>(state_); }

    std::size_t dimension() const {
        return std::visit(
            [](const auto& s) -> std::size_t {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Fixed>) return s.w.size();
                else if constexpr (std::is_same_v<T, Iid>) return s.dim;
                else if constexpr (std::is_same_v<T, Cyclic>) return s.cycle.front().size();
                else return s.env->num_objectives();
            },
            state_);
    }

    /// Next preference. Adaptive sources require `view`.
    Preference next(const AgentView* view = nullptr) {
        return std::visit(
            [view](auto& s) -> Preference {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Fixed>) {
                    return s.w;
                } else if constexpr (std::is_same_v<T, Iid>) {
                    return Preference::normalized(flat_dirichlet(s.dim, s.rng));
                } else if constexpr (std::is_same_v<T, Cyclic>) {
                    Preference w = s.cycle[s.next];
                    s.next = (s.next + 1) % s.cycle.size();
                    return w;
                } else {
                    if (view == nullptr || !*view)
                        throw std::invalid_argument("greedy source needs an agent view");
                    std::size_t best = 0;
                    double best_gap = -1.0;
                    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
                        const auto pi = (*view)(s.candidates[i]);
                        const double gap =
                            s.v_star[i] -
                            policy_value(*s.env, pi, s.candidates[i]).V(0, s.env->initial_state);
                        if (gap > best_gap) {
                            best_gap = gap;
                            best = i;
                        }
                    }
                    return s.candidates[best];
                }
            },
            state_);
    }

    /// Draws `k` preferences from a non-adaptive source.
    std::vector<Preference> take(std::size_t k) {
        if (adaptive()) throw std::logic_error("take: adaptive source needs an agent");
        std::vector<Preference> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) out.push_back(next());
        return out;
    }

private:
    using State = std::variant<Fixed, Iid, Cyclic, Greedy>;
    explicit PreferenceSource(State s) : state_(std::move(s)) {}
    State state_;
};

} // namespace morl
