#pragma once

// Finite-horizon multi-objective MDP model and the small value types shared by
// every algorithm in the library.
//
// Conventions used throughout:
//   * steps are 0-based, h = 0..H-1; value tables carry an extra layer h = H
//     that is identically zero;
//   * transition and reward tables are dense and row-major;
//   * a table with a single layer is stationary and is broadcast over h.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morl {

/// Tolerance used by the probability-simplex checks.
inline constexpr double kSimplexTolerance = 1e-9;

/// Dense transition kernel P[layer][x][a][y].
///
/// One layer means the kernel is stationary; otherwise there is one layer per
/// step and `row(h, ...)` selects layer h.
class TransitionKernel {
public:
    TransitionKernel() = default;
    TransitionKernel(std::size_t states, std::size_t actions, std::size_t layers = 1)
        : states_(states), actions_(actions), layers_(layers),
          data_(layers * states * actions * states, 0.0) {
        if (layers == 0) throw std::invalid_argument("TransitionKernel: zero layers");
    }

    std::size_t num_states() const noexcept { return states_; }
    std::size_t num_actions() const noexcept { return actions_; }
    std::size_t num_layers() const noexcept { return layers_; }
    bool stationary() const noexcept { return layers_ == 1; }

    std::span<const double> row(std::size_t h, std::size_t x, std::size_t a) const {
        return {data_.data() + offset(h, x, a), states_};
    }
    std::span<double> row(std::size_t h, std::size_t x, std::size_t a) {
        return {data_.data() + offset(h, x, a), states_};
    }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    friend bool operator==(const TransitionKernel&, const TransitionKernel&) = default;

private:
    std::size_t offset(std::size_t h, std::size_t x, std::size_t a) const noexcept {
        const std::size_t layer = layers_ == 1 ? 0 : h;
        return ((layer * states_ + x) * actions_ + a) * states_;
    }

    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::size_t layers_ = 1;
    std::vector<double> data_;
};

/// Vector rewards r[h][x][a][j], j < num_objectives.
class RewardTensor {
public:
    RewardTensor() = default;
    RewardTensor(std::size_t horizon, std::size_t states, std::size_t actions,
                 std::size_t objectives)
        : horizon_(horizon), states_(states), actions_(actions), objectives_(objectives),
          data_(horizon * states * actions * objectives, 0.0) {}

    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t num_states() const noexcept { return states_; }
    std::size_t num_actions() const noexcept { return actions_; }
    std::size_t num_objectives() const noexcept { return objectives_; }

    std::span<const double> at(std::size_t h, std::size_t x, std::size_t a) const {
        return {data_.data() + offset(h, x, a), objectives_};
    }
    std::span<double> at(std::size_t h, std::size_t x, std::size_t a) {
        return {data_.data() + offset(h, x, a), objectives_};
    }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    friend bool operator==(const RewardTensor&, const RewardTensor&) = default;

private:
    std::size_t offset(std::size_t h, std::size_t x, std::size_t a) const noexcept {
        return ((h * states_ + x) * actions_ + a) * objectives_;
    }

    std::size_t horizon_ = 0;
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::size_t objectives_ = 0;
    std::vector<double> data_;
};

/// Episodic multi-objective MDP with deterministic, known vector rewards.
struct Momdp {
    TransitionKernel transitions;
    RewardTensor rewards;
    std::size_t initial_state = 0;

    std::size_t num_states() const noexcept { return transitions.num_states(); }
    std::size_t num_actions() const noexcept { return transitions.num_actions(); }
    std::size_t horizon() const noexcept { return rewards.horizon(); }
    std::size_t num_objectives() const noexcept { return rewards.num_objectives(); }
    bool stationary() const noexcept { return transitions.stationary(); }

    friend bool operator==(const Momdp&, const Momdp&) = default;
};

/// A point of the probability simplex in R^d.
class Preference {
public:
    /// Throws std::invalid_argument unless every entry is in [0,1] and the
    /// entries sum to one within kSimplexTolerance.
    explicit Preference(std::vector<double> weights) : w_(std::move(weights)) {
        if (auto err = check(w_)) throw std::invalid_argument("Preference: " + *err);
    }

    /// Rescales a nonnegative vector onto the simplex.
    static Preference normalized(std::vector<double> weights) {
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        if (!(total > 0.0)) throw std::invalid_argument("Preference: zero mass");
        for (double& v : weights) v /= total;
        return Preference(std::move(weights));
    }

    static Preference vertex(std::size_t d, std::size_t i) {
        std::vector<double> w(d, 0.0);
        w.at(i) = 1.0;
        return Preference(std::move(w));
    }

    static Preference uniform(std::size_t d) {
        return Preference(std::vector<double>(d, 1.0 / static_cast<double>(d)));
    }

    /// Empty optional when `w` is a valid simplex point, else a description.
    static std::optional<std::string> check(std::span<const double> w) {
        if (w.empty()) return "empty vector";
        double total = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (!(w[j] >= 0.0 && w[j] <= 1.0)) {
                std::ostringstream os;
                os << "entry " << j << " = " << w[j] << " outside [0,1]";
                return os.str();
            }
            total += w[j];
        }
        if (std::abs(total - 1.0) > kSimplexTolerance) {
            std::ostringstream os;
            os << "entries sum to " << total;
            return os.str();
        }
        return std::nullopt;
    }

    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t j) const { return w_[j]; }
    std::span<const double> weights() const noexcept { return w_; }

    friend bool operator==(const Preference&, const Preference&) = default;
    friend auto operator<=>(const Preference&, const Preference&) = default;

private:
    std::vector<double> w_;
};

/// <w, r>. Throws std::invalid_argument on a dimension mismatch.
inline double scalarize(std::span<const double> reward, const Preference& w) {
    if (reward.size() != w.size())
        throw std::invalid_argument("scalarize: reward has dimension " +
                                    std::to_string(reward.size()) + ", preference " +
                                    std::to_string(w.size()));
    double s = 0.0;
    for (std::size_t j = 0; j < reward.size(); ++j) s += w[j] * reward[j];
    return s;
}

/// Dense table t[layer][x][a]. Like TransitionKernel, a single layer is
/// broadcast over steps; used for scalar rewards, bonuses and Q-functions.
class StateActionTable {
public:
    StateActionTable() = default;
    StateActionTable(std::size_t layers, std::size_t states, std::size_t actions,
                     double fill = 0.0)
        : layers_(layers), states_(states), actions_(actions),
          data_(layers * states * actions, fill) {}

    std::size_t num_layers() const noexcept { return layers_; }
    std::size_t num_states() const noexcept { return states_; }
    std::size_t num_actions() const noexcept { return actions_; }

    double operator()(std::size_t h, std::size_t x, std::size_t a) const {
        return data_[offset(h, x, a)];
    }
    double& operator()(std::size_t h, std::size_t x, std::size_t a) {
        return data_[offset(h, x, a)];
    }

    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const StateActionTable&, const StateActionTable&) = default;

private:
    std::size_t offset(std::size_t h, std::size_t x, std::size_t a) const noexcept {
        const std::size_t layer = layers_ == 1 ? 0 : h;
        return (layer * states_ + x) * actions_ + a;
    }

    std::size_t layers_ = 0;
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> data_;
};

/// Scalarized reward table ⟨w, r_h(x,a)⟩ with one layer per step.
inline StateActionTable scalarize(const RewardTensor& r, const Preference& w) {
    if (r.num_objectives() != w.size())
        throw std::invalid_argument("scalarize: preference dimension mismatch");
    StateActionTable out(r.horizon(), r.num_states(), r.num_actions());
    for (std::size_t h = 0; h < r.horizon(); ++h)
        for (std::size_t x = 0; x < r.num_states(); ++x)
            for (std::size_t a = 0; a < r.num_actions(); ++a)
                out(h, x, a) = scalarize(r.at(h, x, a), w);
    return out;
}

/// Per-step state -> action map.
class DeterministicPolicy {
public:
    DeterministicPolicy() = default;
    DeterministicPolicy(std::size_t horizon, std::size_t states, std::size_t action = 0)
        : horizon_(horizon), states_(states), actions_(horizon * states, action) {}

    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t num_states() const noexcept { return states_; }

    std::size_t operator()(std::size_t h, std::size_t x) const {
        return actions_[h * states_ + x];
    }
    std::size_t& operator()(std::size_t h, std::size_t x) { return actions_[h * states_ + x]; }

    const std::vector<std::size_t>& data() const noexcept { return actions_; }

    friend bool operator==(const DeterministicPolicy&, const DeterministicPolicy&) = default;

private:
    std::size_t horizon_ = 0;
    std::size_t states_ = 0;
    std::vector<std::size_t> actions_;
};

/// Distribution over deterministic policies.
struct MixturePolicy {
    std::vector<DeterministicPolicy> members;
    std::vector<double> weights;

    static MixturePolicy uniform(std::vector<DeterministicPolicy> members) {
        if (members.empty()) throw std::invalid_argument("MixturePolicy: no members");
        MixturePolicy m;
        m.weights.assign(members.size(), 1.0 / static_cast<double>(members.size()));
        m.members = std::move(members);
        return m;
    }
};

struct Step {
    std::size_t state = 0;
    std::size_t action = 0;
    friend bool operator==(const Step&, const Step&) = default;
};

/// One H-step episode. `preference` is empty for reward-free rollouts.
struct Trajectory {
    std::vector<Step> steps;
    double scalar_return = 0.0;
    std::optional<Preference> preference;
};

/// V[h][x] for h = 0..H (V[H] = 0) and Q[h][x][a] for h = 0..H-1.
struct ValueTables {
    std::size_t horizon = 0;
    std::size_t states = 0;
    std::vector<double> v;
    StateActionTable q;

    ValueTables() = default;
    ValueTables(std::size_t horizon_, std::size_t states_, std::size_t actions_)
        : horizon(horizon_), states(states_), v((horizon_ + 1) * states_, 0.0),
          q(horizon_, states_, actions_) {}

    double V(std::size_t h, std::size_t x) const { return v[h * states + x]; }
    double& V(std::size_t h, std::size_t x) { return v[h * states + x]; }
    double Q(std::size_t h, std::size_t x, std::size_t a) const { return q(h, x, a); }
    double& Q(std::size_t h, std::size_t x, std::size_t a) { return q(h, x, a); }

    std::span<const double> V(std::size_t h) const { return {v.data() + h * states, states}; }
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    enum class Kind { Shape, RowSum, NegativeProbability, RewardRange, IndexRange };
    Kind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    std::size_t count(Violation::Kind k) const {
        return static_cast<std::size_t>(
            std::count_if(violations.begin(), violations.end(),
                          [k](const Violation& v) { return v.kind == k; }));
    }
};

/// Lists every violated model invariant. Never throws.
inline ValidationReport validate(const Momdp& m) {
    ValidationReport rep;
    auto add = [&rep](Violation::Kind k, std::string msg) {
        rep.violations.push_back({k, std::move(msg)});
    };
    const auto& P = m.transitions;
    const auto& R = m.rewards;
    const std::size_t S = P.num_states(), A = P.num_actions(), H = R.horizon();

    if (S == 0 || A == 0 || H == 0 || R.num_objectives() == 0)
        add(Violation::Kind::Shape, "empty dimension");
    if (R.num_states() != S || R.num_actions() != A)
        add(Violation::Kind::Shape, "reward tensor shape disagrees with transitions");
    if (!P.stationary() && P.num_layers() != H)
        add(Violation::Kind::Shape, "non-stationary kernel needs one layer per step");
    if (m.initial_state >= S)
        add(Violation::Kind::IndexRange,
            "initial state " + std::to_string(m.initial_state) + " out of range");
    if (!rep.ok() && rep.count(Violation::Kind::Shape) > 0) return rep;

    for (std::size_t l = 0; l < P.num_layers(); ++l)
        for (std::size_t x = 0; x < S; ++x)
            for (std::size_t a = 0; a < A; ++a) {
                auto row = P.row(l, x, a);
                double total = 0.0;
                bool negative = false;
                for (double p : row) {
                    negative |= p < 0.0;
                    total += p;
                }
                const std::string where = "(layer " + std::to_string(l) + ", x " +
                                          std::to_string(x) + ", a " + std::to_string(a) + ")";
                if (negative)
                    add(Violation::Kind::NegativeProbability, "negative probability at " + where);
                if (!(std::abs(total - 1.0) <= kSimplexTolerance)) {
                    std::ostringstream os;
                    os << "row " << where << " sums to " << total;
                    add(Violation::Kind::RowSum, os.str());
                }
            }

    for (std::size_t h = 0; h < H; ++h)
        for (std::size_t x = 0; x < S; ++x)
            for (std::size_t a = 0; a < A; ++a) {
                auto r = R.at(h, x, a);
                for (std::size_t j = 0; j < r.size(); ++j)
                    if (!(r[j] >= 0.0 && r[j] <= 1.0)) {
                        std::ostringstream os;
                        os << "reward (h " << h << ", x " << x << ", a " << a << ", j " << j
                           << ") = " << r[j] << " outside [0,1]";
                        add(Violation::Kind::RewardRange, os.str());
                    }
            }
    return rep;
}

/// Checks that a policy's shape and action indices match the model.
inline void check_policy(const Momdp& m, const DeterministicPolicy& pi) {
    if (pi.horizon() != m.horizon() || pi.num_states() != m.num_states())
        throw std::invalid_argument("policy shape does not match the model");
    for (std::size_t a : pi.data())
        if (a >= m.num_actions()) throw std::out_of_range("policy action out of range");
}

} // namespace morl
