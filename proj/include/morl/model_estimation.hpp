#pragma once

// Visit counting and empirical transition estimation.
//
// Counting convention: every visited pair (x_h, a_h), h = 0..H-1, increments
// N(x,a); only the H-1 observed transitions (x_h, a_h) -> x_{h+1} increment
// N(x,a,y). Empirical rows therefore normalize by Σ_y N(x,a,y), which can be
// zero for a pair seen only at the last step; such rows are uniform.

#include <cstdint>

#include "morl/momdp.hpp"

namespace morl {

class VisitCounts {
public:
    VisitCounts() = default;
    /// `layers` is 1 for pooled (stationary) counts or H for per-step counts.
    VisitCounts(std::size_t states, std::size_t actions, std::size_t layers = 1)
        : states_(states), actions_(actions), layers_(layers),
          n_sa_(layers * states * actions, 0), n_sas_(layers * states * actions * states, 0) {
        if (layers == 0) throw std::invalid_argument("VisitCounts: zero layers");
    }

    std::size_t num_states() const noexcept { return states_; }
    std::size_t num_actions() const noexcept { return actions_; }
    std::size_t num_layers() const noexcept { return layers_; }
    bool stationary() const noexcept { return layers_ == 1; }

    std::uint64_t n_sa(std::size_t h, std::size_t x, std::size_t a) const {
        return n_sa_[sa(h, x, a)];
    }
    std::uint64_t n_sas(std::size_t h, std::size_t x, std::size_t a, std::size_t y) const {
        return n_sas_[sa(h, x, a) * states_ + y];
    }
    /// Pooled accessors for stationary counts.
    std::uint64_t n_sa(std::size_t x, std::size_t a) const { return n_sa(0, x, a); }
    std::uint64_t n_sas(std::size_t x, std::size_t a, std::size_t y) const {
        return n_sas(0, x, a, y);
    }

    /// Sets N(x,a) and N(x,a,·) directly; intended for synthetic fixtures.
    void set(std::size_t h, std::size_t x, std::size_t a, std::uint64_t visits,
             std::span<const std::uint64_t> next) {
        n_sa_[sa(h, x, a)] = visits;
        std::copy(next.begin(), next.end(), n_sas_.begin() + sa(h, x, a) * states_);
    }

    /// Adds one episode. Throws std::out_of_range on a bad index and
    /// std::invalid_argument when a per-step buffer receives an episode of the
    /// wrong length.
    void update(std::span<const Step> steps) {
        if (!stationary() && steps.size() != layers_)
            throw std::invalid_argument("VisitCounts: episode length differs from horizon");
        for (const Step& s : steps)
            if (s.state >= states_ || s.action >= actions_)
                throw std::out_of_range("VisitCounts: step index out of range");
        for (std::size_t h = 0; h < steps.size(); ++h) {
            const std::size_t i = sa(h, steps[h].state, steps[h].action);
            ++n_sa_[i];
            if (h + 1 < steps.size()) ++n_sas_[i * states_ + steps[h + 1].state];
        }
    }
    void update(const Trajectory& t) { update(std::span<const Step>(t.steps)); }

    std::uint64_t total_visits() const {
        std::uint64_t s = 0;
        for (auto v : n_sa_) s += v;
        return s;
    }

    friend bool operator==(const VisitCounts&, const VisitCounts&) = default;

private:
    std::size_t sa(std::size_t h, std::size_t x, std::size_t a) const noexcept {
        const std::size_t layer = layers_ == 1 ? 0 : h;
        return (layer * states_ + x) * actions_ + a;
    }

    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::size_t layers_ = 1;
    std::vector<std::uint64_t> n_sa_;
    std::vector<std::uint64_t> n_sas_;
};

/// Empirical transition kernel; unvisited rows are uniform 1/S.
inline TransitionKernel empirical_transitions(const VisitCounts& c) {
    const std::size_t S = c.num_states(), A = c.num_actions();
    TransitionKernel P(S, A, c.num_layers());
    for (std::size_t l = 0; l < c.num_layers(); ++l)
        for (std::size_t x = 0; x < S; ++x)
            for (std::size_t a = 0; a < A; ++a) {
                auto row = P.row(l, x, a);
                std::uint64_t total = 0;
                for (std::size_t y = 0; y < S; ++y) total += c.n_sas(l, x, a, y);
                if (total == 0) {
                    std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(S));
                    continue;
                }
                for (std::size_t y = 0; y < S; ++y)
                    row[y] = static_cast<double>(c.n_sas(l, x, a, y)) /
                             static_cast<double>(total);
            }
    return P;
}

/// Visit-count table N(x,a) as doubles, laid out like the counts.
inline StateActionTable visit_table(const VisitCounts& c) {
    StateActionTable n(c.num_layers(), c.num_states(), c.num_actions());
    for (std::size_t l = 0; l < c.num_layers(); ++l)
        for (std::size_t x = 0; x < c.num_states(); ++x)
            for (std::size_t a = 0; a < c.num_actions(); ++a)
                n(l, x, a) = static_cast<double>(c.n_sa(l, x, a));
    return n;
}

/// Ordered episode history with counts kept in sync.
class HistoryBuffer {
public:
    HistoryBuffer() = default;
    HistoryBuffer(std::size_t states, std::size_t actions, std::size_t horizon,
                  bool per_step = false)
        : horizon_(horizon), counts_(states, actions, per_step ? horizon : 1) {}

    void append(Trajectory t) {
        if (t.steps.size() != horizon_)
            throw std::invalid_argument("HistoryBuffer: episode length differs from horizon");
        counts_.update(t);
        episodes_.push_back(std::move(t));
    }

    std::size_t size() const noexcept { return episodes_.size(); }
    bool empty() const noexcept { return episodes_.empty(); }
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t num_states() const noexcept { return counts_.num_states(); }
    std::size_t num_actions() const noexcept { return counts_.num_actions(); }
    bool per_step() const noexcept { return !counts_.stationary(); }

    const std::vector<Trajectory>& episodes() const noexcept { return episodes_; }
    const VisitCounts& counts() const noexcept { return counts_; }

    /// Counts rebuilt from the first `k` episodes.
    VisitCounts prefix_counts(std::size_t k) const {
        VisitCounts c(counts_.num_states(), counts_.num_actions(), counts_.num_layers());
        for (std::size_t i = 0; i < std::min(k, episodes_.size()); ++i) c.update(episodes_[i]);
        return c;
    }

private:
    std::size_t horizon_ = 0;
    VisitCounts counts_;
    std::vector<Trajectory> episodes_;
};

} // namespace morl
