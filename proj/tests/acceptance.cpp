// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// nonzero when any gating criterion fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "morl/morl.hpp"
#include "oracles.hpp"

using namespace morl;

namespace {

int failures = 0;

bool informational = false;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    const char* tag = informational ? (pass ? "info pass" : "info fail") : (pass ? "PASS" : "FAIL");
    std::printf("[%s] %2d %s: %s\n", tag, id, name.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double ratio(const EpisodeLog& log) { return log.regret_at(log.size()) / log.regret_at(log.size() / 2); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared fixture runs for criteria 1, 2, 3 and 11.
struct FigureRuns {
    EpisodeLog mo, bih, q;
    double figure1_seconds = 0.0;
    std::vector<EpisodeLog> mo_d;  // d = 1, 5, 15
    std::vector<double> hoeffding, bernstein;  // final regret per seed
};

FigureRuns run_figures(double scale) {
    FigureRuns r;
    auto fig1 = preset("figure1").front();
    fig1.threads = 1;
    fig1.scale = scale;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res1 = run_experiment(fig1);
    r.figure1_seconds = seconds_since(t0);
    r.mo = res1.logs[0];
    r.bih = res1.logs[1];

    auto fig2 = preset("figure2").front();
    fig2.scale = scale;
    const Momdp env = build_environment(fig2.env, fig2.master_seed);
    r.q = run_cell(fig2, env, 1, 0);

    for (auto c : preset("figure3")) {
        c.scale = scale;
        if (c.env.objectives == 15) {
            r.mo_d.push_back(r.mo);
            continue;
        }
        if (c.env.objectives > 15) continue;
        const Momdp e = build_environment(c.env, c.master_seed);
        r.mo_d.push_back(run_cell(c, e, 0, 0));
    }

    auto cmp = fig1;
    cmp.agents = {"mo-ucbvi", "mo-ucbvi-bernstein"};
    cmp.seeds = {0, 1, 2, 3, 4};
    r.hoeffding.push_back(r.mo.final_regret());
    for (std::size_t s = 1; s < 5; ++s) r.hoeffding.push_back(run_cell(cmp, env, 0, s).final_regret());
    for (std::size_t s = 0; s < 5; ++s) r.bernstein.push_back(run_cell(cmp, env, 1, s).final_regret());
    return r;
}

void criterion_1(const FigureRuns& r) {
    const double mo_ratio = ratio(r.mo), bih_ratio = ratio(r.bih);
    const double mo_final = r.mo.final_regret(), bih_final = r.bih.final_regret();
    const bool pass = mo_ratio <= 1.9 && bih_ratio >= 1.9 && bih_final >= 3.0 * mo_final && r.figure1_seconds <= 300.0;
    report(1, "figure1 regret shape", pass,
           fmt("mo ratio %.3f (<=1.9), bih ratio %.3f (>=1.9), bih/mo final %.0f/%.0f = %.2f (>=3), runtime %.1fs (<=300)",
               mo_ratio, bih_ratio, bih_final, mo_final, bih_final / mo_final, r.figure1_seconds));
}

void criterion_2(const FigureRuns& r) {
    const double q_ratio = ratio(r.q), q_final = r.q.final_regret(), mo_final = r.mo.final_regret();
    report(2, "figure2 q-learning baseline", q_final >= 3.0 * mo_final && q_ratio >= 1.9,
           fmt("q/mo final %.0f/%.0f = %.2f (>=3), q ratio %.3f (>=1.9)", q_final, mo_final, q_final / mo_final,
               q_ratio));
}

void criterion_3(const FigureRuns& r) {
    const auto& d = r.mo_d;
    const double f1 = d[0].final_regret(), f5 = d[1].final_regret(), f15 = d[2].final_regret();
    bool ratios_ok = true;
    for (const auto& l : d) ratios_ok = ratios_ok && ratio(l) <= 1.9;
    report(3, "figure3 regret vs objectives", f1 <= f5 && f5 <= f15 && f15 > f1 && ratios_ok,
           fmt("final d=1/5/15: %.0f/%.0f/%.0f (nondecreasing, d15 > d1), ratios %.3f/%.3f/%.3f (<=1.9)", f1, f5, f15,
               ratio(d[0]), ratio(d[1]), ratio(d[2])));
}

void criterion_4() {
    auto cfg = preset("pfe-scaling").front();
    cfg.threads = 1;
    const auto res = run_experiment(cfg);
    const std::size_t n = cfg.seeds.size();
    double mean_ratio = 0.0, worst_large = 0.0, small = 0.0, large = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const double e5 = res.pfe[s].pac_error, e20 = res.pfe[n + s].pac_error;
        mean_ratio += e20 / e5 / static_cast<double>(n);
        small += e5 / static_cast<double>(n);
        large += e20 / static_cast<double>(n);
        worst_large = std::max(worst_large, e20);
    }
    const double H = static_cast<double>(cfg.env.horizon);
    report(4, "pfe error scaling", mean_ratio <= 0.6 && worst_large <= 0.5 * H,
           fmt("mean pac(20000)/pac(5000) %.3f (<=0.6), mean errors %.4f -> %.4f, max pac(20000) %.4f (<=%.1f)",
               mean_ratio, small, large, worst_large, 0.5 * H));
}

void criterion_5() {
    std::mt19937_64 gen(505);
    int bad = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
        std::uniform_int_distribution<std::size_t> size(2, 6);
        const std::size_t S = size(gen), A = size(gen), H = size(gen), d = size(gen);
        const auto m = random_momdp(S, A, H, d, 100 + i);
        const auto pi = oracle::random_policy(H, S, A, gen);
        const auto w = oracle::random_preference(d, gen);
        const double exact = policy_value(m, pi, w).V(0, m.initial_state);
        const auto mc = oracle::monte_carlo(m, pi, w, 100000, 900 + i);
        const double z = std::abs(exact - mc.mean) / mc.std_error;
        worst = std::max(worst, z);
        if (z > 3.0) ++bad;
    }
    report(5, "policy value vs monte carlo", bad == 0, fmt("%d of 10 outside 3 SE, max |z| %.2f", bad, worst));
}

void criterion_6() {
    std::mt19937_64 gen(606);
    int bad = 0;
    double worst_slack = -1e300;
    for (std::uint64_t mi = 0; mi < 5; ++mi) {
        const std::size_t d = 2 + mi;
        const auto m = random_momdp(8, 3, 6, d, 60 + mi);
        const double H = static_cast<double>(m.horizon());
        for (int i = 0; i < 200; ++i) {
            const auto w = oracle::random_preference(d, gen), v = oracle::random_preference(d, gen);
            double l1 = 0.0;
            for (std::size_t j = 0; j < d; ++j) l1 += std::abs(w[j] - v[j]);
            const double gap = std::abs(optimal_value(m, w).values.V(0, 0) - optimal_value(m, v).values.V(0, 0));
            worst_slack = std::max(worst_slack, gap - H * l1);
            if (gap > H * l1 + 1e-9) ++bad;
        }
    }
    report(6, "optimal value continuity", bad == 0,
           fmt("%d violations in 1000 pairs, max |dV| - H|dw|_1 = %.3g", bad, worst_slack));
}

// Runs MO-UCBVI (Hoeffding or Bernstein) on iid preferences and checks at
// checkpoints whether the bound fails for any grid preference.
bool violates(const Momdp& m, OnlineVariant variant, std::uint64_t seed, const std::vector<Preference>& grid) {
    const std::size_t K = 500;
    const std::vector<std::size_t> checkpoints{1, 2, 5, 10, 25, 50, 100, 200, 350, 500};
    const auto params = BonusParams::for_model(m, K, 0.1, 1.0);
    auto src = PreferenceSource::iid(m.num_objectives(), derive_seed(seed, {1}));
    Rng rng(derive_seed(seed, {2}));
    VisitCounts counts(m.num_states(), m.num_actions());
    std::vector<double> v_star;
    for (const auto& w : grid) v_star.push_back(optimal_value(m, w).values.V(0, 0));
    std::size_t next_check = 0;
    const std::size_t H = m.horizon();
    for (std::size_t k = 0; k <= K; ++k) {
        if (next_check < checkpoints.size() && k == checkpoints[next_check]) {
            ++next_check;
            const auto model = empirical_transitions(counts);
            const auto bonus = hoeffding_bonus_table(counts, params);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const auto reward = scalarize(m.rewards, grid[g]);
                if (variant == OnlineVariant::Hoeffding) {
                    if (ucb_q(model, reward, bonus, H).values.V(0, 0) < v_star[g] - 1e-9) return true;
                } else {
                    const auto t = bernstein_plan(model, reward, counts, params);
                    if (t.upper.V(0, 0) < v_star[g] - 1e-9 || t.lower.V(0, 0) > v_star[g] + 1e-9) return true;
                }
            }
        }
        if (k == K) break;
        const auto model = empirical_transitions(counts);
        const Preference w = src.next();
        DeterministicPolicy pi = variant == OnlineVariant::Hoeffding
                                     ? ucb_q(model, scalarize(m.rewards, w), hoeffding_bonus_table(counts, params), H).policy
                                     : bernstein_plan(model, scalarize(m.rewards, w), counts, params).policy;
        counts.update(sample_episode(m, pi, w, rng));
    }
    return false;
}

void criterion_7() {
    const auto m = random_momdp(5, 2, 4, 3, 77);
    std::mt19937_64 gen(707);
    std::vector<Preference> grid;
    for (std::size_t j = 0; j < 3; ++j) grid.push_back(Preference::vertex(3, j));
    while (grid.size() < 50) grid.push_back(oracle::random_preference(3, gen));
    int hoeffding = 0, bernstein = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        hoeffding += violates(m, OnlineVariant::Hoeffding, s, grid);
        bernstein += violates(m, OnlineVariant::Bernstein, s, grid);
    }
    report(7, "optimism and sandwich", hoeffding <= 6 && bernstein <= 6,
           fmt("seeds with a violation: hoeffding %d/20, bernstein %d/20 (<=6 each)", hoeffding, bernstein));
}

void criterion_8() {
    std::mt19937_64 gen(808);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t d = 2 + i % 5;
        const auto m = random_momdp(6, 3, 5, d, 80 + i % 10);
        const auto pi = oracle::random_policy(5, 6, 3, gen);
        const std::size_t K = 1 + i % 20;
        std::vector<double> mean(d, 0.0);
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const auto w = oracle::random_preference(d, gen);
            sum += policy_value(m, pi, w).V(0, 0);
            for (std::size_t j = 0; j < d; ++j) mean[j] += w[j] / static_cast<double>(K);
        }
        const double rhs = static_cast<double>(K) * policy_value(m, pi, Preference::normalized(mean)).V(0, 0);
        worst = std::max(worst, std::abs(sum - rhs));
    }
    report(8, "best-in-hindsight linearity", worst <= 1e-9, fmt("max |sum - K V(w_bar)| %.3g (<=1e-9)", worst));
}

void criterion_9() {
    Rng rng(909);
    bool built = false;
    std::string detail;
    try {
        const auto jl = jl_matrix(32, 0.25, rng, 10);
        built = jl.A.rows == jl_dimension(32, 0.25) && verify_jl(jl.A, 0.25).pass;
        detail = fmt("dim %zu, attempts %zu, achieved eps %.4f (<=0.25)", jl.A.rows, jl.attempts, jl.achieved_eps);
    } catch (const JlConstructionError& e) {
        detail = e.what();
    }
    const double id = verify_jl(Matrix::identity(32), 0.25).achieved_eps;
    const double zero = verify_jl(Matrix(8, 32), 0.25).achieved_eps;
    report(9, "jl construction", built && id == 0.0 && zero == 1.0,
           detail + fmt(", identity %.17g (==0), zero %.17g (==1)", id, zero));
}

void criterion_10() {
    Rng rng(1010);
    FullInstanceParams p;
    p.leaves = 4;
    p.horizon = 6;
    p.jl_eps = 0.9;
    p.eps = 0.2;
    const auto inst = full_instance(p, rng);
    const auto& m = inst.mdp;
    const std::size_t n = p.leaves, d = inst.jl.A.rows;
    const bool states_ok = m.num_states() == 2 * n - 1 + d && d == jl_dimension(n, p.jl_eps) && validate(m).ok();

    std::size_t reached = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto pi = inst.path_to_leaf(s);
        std::vector<double> mu(m.num_states(), 0.0), next(mu.size());
        mu[m.initial_state] = 1.0;
        for (std::size_t h = 0; h < inst.depth; ++h) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t x = 0; x < mu.size(); ++x)
                if (mu[x] > 0.0) {
                    const auto row = m.transitions.row(h, x, pi(h, x));
                    for (std::size_t y = 0; y < mu.size(); ++y) next[y] += mu[x] * row[y];
                }
            mu.swap(next);
        }
        reached += mu[inst.leaf_state(s)] == 1.0;
    }

    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            const double r = scalarize(m.rewards.at(0, inst.leaf_state(t), 0), inst.leaf_preferences[s]);
            worst = std::max(worst, std::abs(inst.leaf_signal(r) - (s == t ? 1.0 : 0.0)));
        }
    report(10, "hard instance structure", states_ok && reached == n && worst <= p.jl_eps,
           fmt("n %zu, d %zu, states %zu (want %zu), leaves reached %zu/%zu, max leaf deviation %.4f (<=%.2f)", n, d,
               m.num_states(), 2 * n - 1 + d, reached, n, worst, p.jl_eps));
}

void criterion_11(const FigureRuns& r) {
    double h = 0.0, b = 0.0;
    for (std::size_t s = 0; s < 5; ++s) {
        h += r.hoeffding[s] / 5.0;
        b += r.bernstein[s] / 5.0;
    }
    report(11, "bernstein vs hoeffding", b <= h, fmt("mean final regret bernstein %.0f, hoeffding %.0f", b, h));
}

} // namespace

int main() {
    criterion_5();
    criterion_6();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_7();
    criterion_4();
    const auto runs = run_figures(0.1);
    criterion_1(runs);
    criterion_2(runs);
    criterion_3(runs);
    criterion_11(runs);
    const int gated = failures;

    // Not gating: the same checks with a smaller bonus scale.
    std::printf("[info] figure checks repeated at scale 0.03 (not gating)\n");
    informational = true;
    const auto small = run_figures(0.03);
    criterion_1(small);
    criterion_2(small);
    criterion_3(small);
    criterion_11(small);
    failures = gated;
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
