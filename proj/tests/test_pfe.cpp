#include <gtest/gtest.h>

#include "morl/generators.hpp"
#include "morl/pfe.hpp"
#include "oracles.hpp"

using namespace morl;

namespace {

const Momdp& fixture() {
    static const Momdp m = random_momdp(6, 3, 5, 3, 42);
    return m;
}

VisitCounts exact_counts(const Momdp& m, std::uint64_t n) {
    VisitCounts c(m.num_states(), m.num_actions());
    std::vector<std::uint64_t> next(m.num_states());
    for (std::size_t x = 0; x < m.num_states(); ++x)
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            const auto row = m.transitions.row(0, x, a);
            for (std::size_t y = 0; y < next.size(); ++y)
                next[y] = static_cast<std::uint64_t>(std::llround(row[y] * static_cast<double>(n)));
            c.set(0, x, a, n, next);
        }
    return c;
}

} // namespace

TEST(Explore, OneEpisodeIsHSteps) {
    Rng rng(1);
    const auto res = explore(fixture(), 1, PfeParams{}, rng);
    ASSERT_EQ(res.history.size(), 1u);
    EXPECT_EQ(res.history.episodes()[0].steps.size(), 5u);
    EXPECT_EQ(res.history.counts().total_visits(), 5u);
}

TEST(Explore, RootValueBoundedAndDecreasing) {
    Rng rng(2);
    const auto res = explore(fixture(), 2000, PfeParams{0.1, 0.01}, rng);
    for (double v : res.root_values) {
        EXPECT_LE(v, 5.0);
        EXPECT_GE(v, 0.0);
    }
    const std::size_t tenth = res.root_values.size() / 10;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < tenth; ++i) {
        first += res.root_values[i];
        last += res.root_values[res.root_values.size() - 1 - i];
    }
    EXPECT_LT(last, first);
}

// Clipped zero-reward values tie at H while bonuses are large, and ties go to
// the lowest action; a small scale lets the clip release within 2000 episodes.
TEST(Explore, CoversEveryReachablePair) {
    const auto& m = fixture();
    Rng rng(3);
    const auto res = explore(m, 2000, PfeParams{0.1, 0.01}, rng);
    const auto reach = oracle::reachable_states(m);
    for (std::size_t x = 0; x < 6; ++x) {
        if (!reach[x]) continue;
        for (std::size_t a = 0; a < 3; ++a) EXPECT_GT(res.history.counts().n_sa(x, a), 0u) << x << "," << a;
    }
}

TEST(Explore, DeterministicPerSeed) {
    Rng a(5), b(5);
    const auto x = explore(fixture(), 100, PfeParams{}, a), y = explore(fixture(), 100, PfeParams{}, b);
    EXPECT_EQ(x.history.counts(), y.history.counts());
    EXPECT_EQ(x.root_values, y.root_values);
}

TEST(Explore, BonusDominatesPlanningBonus) {
    const auto p = BonusParams::for_model(fixture(), 1000, 0.1, 0.1);
    for (auto form : {ExplorationBonusForm::Refined, ExplorationBonusForm::Simple})
        for (double n : {1.0, 3.0, 10.0, 1e3, 1e6}) EXPECT_GE(exploration_bonus(n, p, form), 2.0 * hoeffding_bonus(n, p));
    EXPECT_EQ(exploration_bonus(0.0, p, ExplorationBonusForm::Refined), 5.0);
    const double iota = p.iota();
    EXPECT_NEAR(exploration_bonus(10.0, p, ExplorationBonusForm::Refined),
                0.1 * 3.0 * 25.0 * 6.0 * iota / 10.0 + 2.0 * hoeffding_bonus(10.0, p), 1e-12);
    EXPECT_NEAR(exploration_bonus(10.0, p, ExplorationBonusForm::Simple),
                0.1 * 25.0 * 6.0 / 20.0 + 2.0 * hoeffding_bonus(10.0, p), 1e-12);
}

TEST(Plan, OneEpisodeOneMember) {
    Rng rng(1);
    const auto res = explore(fixture(), 1, PfeParams{}, rng);
    EXPECT_EQ(plan(res.history, fixture(), Preference::uniform(3), PfeParams{}).members.size(), 1u);
}

TEST(Plan, StrideThinsMembers) {
    Rng rng(1);
    const auto res = explore(fixture(), 10, PfeParams{}, rng);
    PfeParams p;
    p.stride = 3;
    EXPECT_EQ(plan(res.history, fixture(), Preference::uniform(3), p).members.size(), 4u);
}

TEST(Plan, ExactCountsRecoverOptimum) {
    const auto& m = fixture();
    // Many prefixes keep the 2 eps = 2/K part of the bonus far from the clip.
    const std::vector<VisitCounts> prefixes(200, exact_counts(m, std::uint64_t{1} << 40));
    for (const auto& w : simplex_lattice(3, 4)) {
        const auto mix = plan(prefixes, m, w, PfeParams{});
        EXPECT_NEAR(mixture_value(m, mix, w), optimal_value(m, w).values.V(0, 0), 1e-6);
    }
    EXPECT_LE(pac_error(m, std::span<const VisitCounts>(prefixes), PfeParams{}, default_pac_grid(3)), 1e-6);
}

TEST(Plan, NeverBeatsOptimum) {
    const auto& m = fixture();
    Rng rng(7);
    const auto res = explore(m, 200, PfeParams{0.1, 0.1}, rng);
    for (const auto& w : simplex_lattice(3, 4))
        EXPECT_LE(mixture_value(m, plan(res.history, m, w, PfeParams{0.1, 0.1}), w),
                  optimal_value(m, w).values.V(0, 0) + 1e-9);
}

TEST(Plan, RejectsBadInput) {
    const auto& m = fixture();
    EXPECT_THROW(plan(HistoryBuffer(6, 3, 5), m, Preference::uniform(3), PfeParams{}), std::invalid_argument);
    HistoryBuffer per_step(6, 3, 5, true);
    Rng rng(1);
    per_step.append(Trajectory{rollout(m, DeterministicPolicy(5, 6), rng), 0.0, {}});
    EXPECT_THROW(plan(per_step, m, Preference::uniform(3), PfeParams{}), std::invalid_argument);
    HistoryBuffer wrong(5, 3, 5);
    EXPECT_THROW(plan(wrong, m, Preference::uniform(3), PfeParams{}), std::invalid_argument);
}

TEST(PacError, GridRules) {
    const auto m = random_momdp(4, 2, 3, 2, 1);
    Rng rng(1);
    const auto res = explore(m, 20, PfeParams{}, rng);
    const std::vector<Preference> verts{Preference::vertex(2, 0), Preference::vertex(2, 1)};
    const auto errs = pac_errors(m, res.history, PfeParams{}, verts);
    EXPECT_EQ(errs.size(), 2u);
    EXPECT_EQ(pac_error(m, res.history, PfeParams{}, verts), std::max(errs[0], errs[1]));
    EXPECT_THROW(pac_error(m, res.history, PfeParams{}, {}), std::invalid_argument);
    const std::vector<Preference> missing{Preference::vertex(2, 0), Preference::uniform(2)};
    EXPECT_THROW(pac_error(m, res.history, PfeParams{}, missing), std::invalid_argument);
    EXPECT_EQ(default_pac_grid(3).size(), 15u);
}

TEST(PacError, ShrinksWithMoreExploration) {
    const auto& m = fixture();
    const PfeParams p{0.1, 0.1};
    const auto grid = default_pac_grid(3);
    Rng a(11), b(11);
    const double small = pac_error(m, explore(m, 500, p, a).history, p, grid);
    const double large = pac_error(m, explore(m, 4000, p, b).history, p, grid);
    EXPECT_LT(large, small);
}

TEST(PacError, NonStationaryModel) {
    Momdp m{TransitionKernel(3, 2, 4), random_momdp(3, 2, 4, 2, 5).rewards, 0};
    Rng gen(3);
    for (std::size_t h = 0; h < 4; ++h)
        for (std::size_t x = 0; x < 3; ++x)
            for (std::size_t a = 0; a < 2; ++a) {
                const auto row = flat_dirichlet(3, gen);
                std::copy(row.begin(), row.end(), m.transitions.row(h, x, a).begin());
            }
    ASSERT_TRUE(validate(m).ok());
    Rng rng(2);
    const auto res = explore(m, 300, PfeParams{0.1, 0.1}, rng);
    EXPECT_TRUE(res.history.per_step());
    const double e = pac_error(m, res.history, PfeParams{0.1, 0.1}, default_pac_grid(2));
    EXPECT_GE(e, -1e-9);
    EXPECT_LE(e, 4.0);
}

// d = S*A objectives with one indicator objective per pair: runs unchanged,
// with d_eff capped at S.
TEST(PacError, RewardFreeReduction) {
    const std::size_t S = 3, A = 2, H = 3;
    Momdp m{random_momdp(S, A, H, 1, 4).transitions, RewardTensor(H, S, A, S * A), 0};
    for (std::size_t h = 0; h < H; ++h)
        for (std::size_t x = 0; x < S; ++x)
            for (std::size_t a = 0; a < A; ++a) m.rewards.at(h, x, a)[x * A + a] = 1.0;
    EXPECT_EQ(BonusParams::for_model(m, 10).d_eff, S);
    Rng rng(1);
    const auto res = explore(m, 50, PfeParams{}, rng);
    const std::vector<Preference> grid = simplex_lattice(S * A, 1);
    EXPECT_EQ(pac_errors(m, res.history, PfeParams{}, grid).size(), S * A);
}

TEST(SampleComplexity, HandValue) {
    EXPECT_EQ(sample_complexity(3, 6, 3, 5, 0.5, 0.1), 505769u);
}

TEST(SampleComplexity, Scaling) {
    // The second term does not depend on d, so K(d=2) - K(d=1) isolates the
    // leading term H^3 S A iota / eps^2 (up to rounding).
    auto lead = [](double eps) {
        return static_cast<double>(sample_complexity(2, 6, 3, 5, eps, 0.1)) -
               static_cast<double>(sample_complexity(1, 6, 3, 5, eps, 0.1));
    };
    auto iota = [](double eps) { return std::log(5.0 * 6 * 3 / (0.1 * eps)); };
    EXPECT_NEAR(lead(0.25) / lead(0.5), 4.0 * iota(0.25) / iota(0.5), 1e-3);
    EXPECT_EQ(sample_complexity(10, 6, 3, 5, 0.5, 0.1), sample_complexity(6, 6, 3, 5, 0.5, 0.1));
    EXPECT_THROW(sample_complexity(3, 6, 3, 5, 0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(sample_complexity(3, 6, 3, 5, 0.5, 1.0), std::invalid_argument);
}
