#pragma once

// Random and canonical MOMDP fixtures.

#include "morl/momdp.hpp"
#include "morl/random.hpp"

namespace morl {

/// Random MOMDP: flat-Dirichlet transition rows, rewards uniform in [0,1]^d.
///
/// Transitions come from one stream and each objective's rewards from its own
/// derived stream, so for a fixed seed the model with d objectives is the
/// model with d' < d objectives plus extra reward coordinates.
inline Momdp random_momdp(std::size_t states, std::size_t actions, std::size_t horizon,
                          std::size_t objectives, std::uint64_t seed) {
    if (states == 0 || actions == 0 || horizon == 0 || objectives == 0)
        throw std::invalid_argument("random_momdp: all sizes must be at least 1");
    Momdp m{TransitionKernel(states, actions),
            RewardTensor(horizon, states, actions, objectives), 0};

    Rng trans_rng(derive_seed(seed, {0}));
    for (std::size_t x = 0; x < states; ++x)
        for (std::size_t a = 0; a < actions; ++a) {
            auto row = m.transitions.row(0, x, a);
            const auto p = flat_dirichlet(states, trans_rng);
            std::copy(p.begin(), p.end(), row.begin());
        }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t j = 0; j < objectives; ++j) {
        Rng reward_rng(derive_seed(seed, {1, j}));
        for (std::size_t h = 0; h < horizon; ++h)
            for (std::size_t x = 0; x < states; ++x)
                for (std::size_t a = 0; a < actions; ++a)
                    m.rewards.at(h, x, a)[j] = unif(reward_rng);
    }
    return m;
}

namespace two_state {
inline constexpr std::size_t kStay = 0;
inline constexpr std::size_t kGo = 1;
} // namespace two_state

/// Two states, actions {stay, go}, H = 2, d = 2. From state 0 "stay" keeps
/// the agent in 0 and "go" moves it to the absorbing state 1. Rewards are
/// action independent: r(0) = (1,0), r(1) = (0,1).
inline Momdp two_state_momdp() {
    Momdp m{TransitionKernel(2, 2), RewardTensor(2, 2, 2, 2), 0};
    m.transitions.row(0, 0, two_state::kStay)[0] = 1.0;
    m.transitions.row(0, 0, two_state::kGo)[1] = 1.0;
    m.transitions.row(0, 1, two_state::kStay)[1] = 1.0;
    m.transitions.row(0, 1, two_state::kGo)[1] = 1.0;
    for (std::size_t h = 0; h < 2; ++h)
        for (std::size_t a = 0; a < 2; ++a) {
            m.rewards.at(h, 0, a)[0] = 1.0;
            m.rewards.at(h, 1, a)[1] = 1.0;
        }
    return m;
}

} // namespace morl
