#pragma once

// Lower-bound constructions: near-isometric sign matrices, the two-step basic
// hard instance and the binary-tree full instance built on top of it.

#include <bit>

#include "morl/momdp.hpp"
#include "morl/random.hpp"

namespace morl {

/// Column-major d x n matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double operator()(std::size_t i, std::size_t j) const { return data[j * rows + i]; }
    double& operator()(std::size_t i, std::size_t j) { return data[j * rows + i]; }
    std::span<const double> column(std::size_t j) const { return {data.data() + j * rows, rows}; }
};

struct JlCheck {
    double achieved_eps = 0.0;
    bool pass = false;
};

/// max_i ||AᵀA e_i - e_i||_∞, and whether it is at most `target_eps`.
inline JlCheck verify_jl(const Matrix& A, double target_eps) {
    double worst = 0.0;
    for (std::size_t i = 0; i < A.cols; ++i) {
        const auto ci = A.column(i);
        for (std::size_t k = 0; k < A.cols; ++k) {
            const auto ck = A.column(k);
            double g = 0.0;
            for (std::size_t r = 0; r < A.rows; ++r) g += ck[r] * ci[r];
            worst = std::max(worst, std::abs(g - (i == k ? 1.0 : 0.0)));
        }
    }
    return {worst, worst <= target_eps};
}

/// ceil(200 ln(n+1) / eps^2).
inline std::size_t jl_dimension(std::size_t n, double eps) {
    return static_cast<std::size_t>(
        std::ceil(200.0 * std::log(static_cast<double>(n) + 1.0) / (eps * eps)));
}

struct JlMatrix {
    Matrix A;
    double achieved_eps = 0.0;
    double target_eps = 0.0;
    std::size_t attempts = 0;
};

class JlConstructionError : public std::runtime_error {
public:
    JlConstructionError(const std::string& what, double best)
        : std::runtime_error(what), best_achieved_eps(best) {}
    double best_achieved_eps;
};

/// Random ±1/sqrt(d) matrix with near-orthonormal columns. `dim` = 0 selects
/// jl_dimension(n, eps). Resamples until verify_jl passes; throws
/// JlConstructionError carrying the best achieved value after `max_retries`.
template <class G>
JlMatrix jl_matrix(std::size_t n, double eps, G& rng, std::size_t max_retries = 10,
                   std::size_t dim = 0) {
    if (n == 0) throw std::invalid_argument("jl_matrix: n must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("jl_matrix: eps must lie in (0,1)");
    if (max_retries == 0) throw std::invalid_argument("jl_matrix: max_retries must be positive");
    const std::size_t d = dim == 0 ? jl_dimension(n, eps) : dim;
    const double entry = 1.0 / std::sqrt(static_cast<double>(d));
    std::bernoulli_distribution coin(0.5);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t attempt = 1; attempt <= max_retries; ++attempt) {
        Matrix A(d, n);
        for (double& v : A.data) v = coin(rng) ? entry : -entry;
        const auto check = verify_jl(A, eps);
        best = std::min(best, check.achieved_eps);
        if (check.pass) return {std::move(A), check.achieved_eps, eps, attempt};
    }
    throw JlConstructionError("jl_matrix: verification failed after " +
                                  std::to_string(max_retries) + " attempts (best eps " +
                                  std::to_string(best) + ")",
                              best);
}

// ---------------------------------------------------------------------------

/// Two-step instance: state 0 is the start, states 1..d absorb. Objective j
/// pays 1 in state j+1. Every action moves to a uniform absorbing state,
/// except one "good" action whose row puts (1+eps)/d on one boosted state and
/// 1/d - eps/(d(d-1)) on the others.
struct BasicInstance {
    Momdp mdp;
    std::size_t good_action = 0;
    std::size_t boosted_state = 0;
};

namespace detail {

/// Writes the start-state row of a basic instance into `row` (length d,
/// indexed by absorbing state) for action `a`.
inline void basic_row(std::span<double> row, std::size_t a, std::size_t good_action,
                      std::size_t boosted, double eps) {
    const double d = static_cast<double>(row.size());
    std::fill(row.begin(), row.end(), 1.0 / d);
    if (a != good_action || eps == 0.0) return;
    for (std::size_t i = 0; i < row.size(); ++i)
        row[i] = i == boosted ? (1.0 + eps) / d : 1.0 / d - eps / (d * (d - 1.0));
}

} // namespace detail

template <class G>
BasicInstance basic_instance(std::size_t d, std::size_t actions, double eps, G& rng) {
    if (d < 2) throw std::invalid_argument("basic_instance: need at least 2 objectives");
    if (actions == 0) throw std::invalid_argument("basic_instance: need at least 1 action");
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("basic_instance: eps in [0,1]");

    std::uniform_int_distribution<std::size_t> pick_a(0, actions - 1), pick_i(0, d - 1);
    BasicInstance out{Momdp{TransitionKernel(d + 1, actions), RewardTensor(2, d + 1, actions, d), 0},
                      pick_a(rng), 0};
    out.boosted_state = 1 + pick_i(rng);
    auto& m = out.mdp;

    std::vector<double> row(d);
    for (std::size_t a = 0; a < actions; ++a) {
        detail::basic_row(row, a, out.good_action, out.boosted_state - 1, eps);
        std::copy(row.begin(), row.end(), m.transitions.row(0, 0, a).begin() + 1);
        for (std::size_t i = 1; i <= d; ++i) m.transitions.row(0, i, a)[i] = 1.0;
    }
    for (std::size_t h = 0; h < 2; ++h)
        for (std::size_t i = 1; i <= d; ++i)
            for (std::size_t a = 0; a < actions; ++a) m.rewards.at(h, i, a)[i - 1] = 1.0;
    return out;
}

// ---------------------------------------------------------------------------

/// Binary tree of depth log2(n) whose n leaves each lead into their own basic
/// instance over d shared absorbing states.
///
/// States: tree node (s, l), s < 2^l, has index 2^l - 1 + s; absorbing state
/// i < d has index 2n - 1 + i. Action 0 keeps the position (s -> s), any other
/// action moves to s + 2^l.
///
/// Objectives (3d in total, all in {0,1}): for sign-matrix row j, objective 2j
/// pays 1 at leaf s when A(j,s) > 0 and objective 2j+1 when A(j,s) < 0;
/// objective 2d + i pays 1 at absorbing state i. The leaf preference for s
/// puts 1/(2d) on the objective matching the sign of A(j,s) for every j and
/// 1/(2d) on every absorbing objective, so its scalarized reward at leaf s' is
/// (1 + (AᵀA)(s,s')) / 4. `leaf_signal` undoes that affine map.
struct FullInstance {
    Momdp mdp;
    JlMatrix jl;
    std::size_t leaves = 0;
    std::size_t depth = 0;
    /// Leaf preference for each leaf s.
    std::vector<Preference> leaf_preferences;
    /// L1 mass removed when normalizing a leaf preference onto the simplex.
    double preference_scale = 2.0;
    std::vector<std::size_t> good_actions;
    std::vector<std::size_t> boosted_states;

    std::size_t tree_state(std::size_t s, std::size_t layer) const {
        return (std::size_t{1} << layer) - 1 + s;
    }
    std::size_t leaf_state(std::size_t s) const { return tree_state(s, depth); }
    std::size_t absorbing_state(std::size_t i) const { return 2 * leaves - 1 + i; }

    /// Maps a scalarized leaf reward back to (AᵀA)(s,s').
    double leaf_signal(double scalar_reward) const {
        return 2.0 * preference_scale * scalar_reward - 1.0;
    }

    /// Deterministic policy that reaches leaf s at step `depth`.
    DeterministicPolicy path_to_leaf(std::size_t s) const {
        DeterministicPolicy pi(mdp.horizon(), mdp.num_states());
        for (std::size_t l = 0; l < depth; ++l) {
            const std::size_t go_right = (s >> l) & 1U;
            for (std::size_t pos = 0; pos < (std::size_t{1} << l); ++pos)
                pi(l, tree_state(pos, l)) = go_right;
        }
        return pi;
    }
};

struct FullInstanceParams {
    std::size_t leaves = 2;
    std::size_t objectives = 0; ///< d; 0 selects jl_dimension(leaves, jl_eps)
    std::size_t actions = 2;
    std::size_t horizon = 4;
    double eps = 0.1;
    double jl_eps = 0.25;
    std::size_t jl_retries = 10;
};

template <class G>
FullInstance full_instance(const FullInstanceParams& p, G& rng) {
    const std::size_t n = p.leaves;
    if (n == 0 || !std::has_single_bit(n))
        throw std::invalid_argument("full_instance: leaves must be a power of two");
    const std::size_t depth = static_cast<std::size_t>(std::countr_zero(n));
    if (p.horizon < 2 * (depth + 1))
        throw std::invalid_argument("full_instance: horizon must be at least 2(log2 n + 1)");
    if (p.actions < 2) throw std::invalid_argument("full_instance: need at least 2 actions");
    if (!(p.eps >= 0.0 && p.eps <= 1.0)) throw std::invalid_argument("full_instance: eps in [0,1]");

    FullInstance out;
    out.jl = jl_matrix(n, p.jl_eps, rng, p.jl_retries, p.objectives);
    const std::size_t d = out.jl.A.rows;
    if (d < 2) throw std::invalid_argument("full_instance: need at least 2 objectives");
    out.leaves = n;
    out.depth = depth;
    const std::size_t S = 2 * n - 1 + d, A = p.actions, H = p.horizon;
    out.mdp = Momdp{TransitionKernel(S, A), RewardTensor(H, S, A, 3 * d), 0};
    auto& m = out.mdp;

    for (std::size_t l = 0; l < depth; ++l)
        for (std::size_t s = 0; s < (std::size_t{1} << l); ++s)
            for (std::size_t a = 0; a < A; ++a) {
                const std::size_t child = a == 0 ? s : s + (std::size_t{1} << l);
                m.transitions.row(0, out.tree_state(s, l), a)[out.tree_state(child, l + 1)] = 1.0;
            }

    std::uniform_int_distribution<std::size_t> pick_a(0, A - 1), pick_i(0, d - 1);
    std::vector<double> row(d);
    for (std::size_t s = 0; s < n; ++s) {
        out.good_actions.push_back(pick_a(rng));
        out.boosted_states.push_back(pick_i(rng));
        for (std::size_t a = 0; a < A; ++a) {
            detail::basic_row(row, a, out.good_actions.back(), out.boosted_states.back(), p.eps);
            auto dst = m.transitions.row(0, out.leaf_state(s), a);
            std::copy(row.begin(), row.end(), dst.begin() + static_cast<std::ptrdiff_t>(2 * n - 1));
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t a = 0; a < A; ++a)
            m.transitions.row(0, out.absorbing_state(i), a)[out.absorbing_state(i)] = 1.0;

    for (std::size_t h = 0; h < H; ++h)
        for (std::size_t a = 0; a < A; ++a) {
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t j = 0; j < d; ++j)
                    m.rewards.at(h, out.leaf_state(s), a)[2 * j + (out.jl.A(j, s) > 0.0 ? 0 : 1)] = 1.0;
            for (std::size_t i = 0; i < d; ++i)
                m.rewards.at(h, out.absorbing_state(i), a)[2 * d + i] = 1.0;
        }

    const double mass = 1.0 / (out.preference_scale * static_cast<double>(d));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> w(3 * d, 0.0);
        for (std::size_t j = 0; j < d; ++j) w[2 * j + (out.jl.A(j, s) > 0.0 ? 0 : 1)] = mass;
        for (std::size_t i = 0; i < d; ++i) w[2 * d + i] = mass;
        out.leaf_preferences.push_back(Preference::normalized(std::move(w)));
    }
    return out;
}

} // namespace morl
