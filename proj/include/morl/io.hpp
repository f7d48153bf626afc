#pragma once

// Plain-text formats for models and exploration histories. Both are described
// in docs/FORMATS.md.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "morl/model_estimation.hpp"
#include "morl/momdp.hpp"

namespace morl {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_numbers(std::ostream& os, std::span<const double> row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << format_double(row[i]);
    os << '\n';
}

inline std::string next_token(std::istream& is, const char* what) {
    std::string tok;
    if (!(is >> tok)) throw FormatError(std::string("unexpected end of input reading ") + what);
    return tok;
}

inline void expect_token(std::istream& is, const std::string& want) {
    const auto tok = next_token(is, want.c_str());
    if (tok != want) throw FormatError("expected '" + want + "', found '" + tok + "'");
}

inline std::size_t read_size(std::istream& is, const char* key) {
    expect_token(is, key);
    const auto tok = next_token(is, key);
    std::size_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw FormatError(std::string("bad value for ") + key + ": " + tok);
    return v;
}

inline double read_double(std::istream& is) {
    const auto tok = next_token(is, "number");
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw FormatError("bad number: " + tok);
    return v;
}

template <class F>
auto with_file(const std::string& path, std::ios::openmode mode, F&& f) {
    std::fstream fs(path, mode);
    if (!fs) throw std::runtime_error("cannot open " + path);
    return f(fs);
}

} // namespace detail

/// Writes a model in the `momdp 1` text format. Doubles use the shortest
/// representation that round-trips exactly.
inline void write_momdp(std::ostream& os, const Momdp& m) {
    os << "momdp 1\n"
       << "states " << m.num_states() << '\n'
       << "actions " << m.num_actions() << '\n'
       << "horizon " << m.horizon() << '\n'
       << "objectives " << m.num_objectives() << '\n'
       << "initial_state " << m.initial_state << '\n'
       << "transition_layers " << m.transitions.num_layers() << '\n'
       << "transitions\n";
    for (std::size_t l = 0; l < m.transitions.num_layers(); ++l)
        for (std::size_t x = 0; x < m.num_states(); ++x)
            for (std::size_t a = 0; a < m.num_actions(); ++a)
                detail::write_numbers(os, m.transitions.row(l, x, a));
    os << "rewards\n";
    for (std::size_t h = 0; h < m.horizon(); ++h)
        for (std::size_t x = 0; x < m.num_states(); ++x)
            for (std::size_t a = 0; a < m.num_actions(); ++a)
                detail::write_numbers(os, m.rewards.at(h, x, a));
    os << "end\n";
}

/// Parses the `momdp 1` format. Structural problems throw FormatError; model
/// invariants are left to validate().
inline Momdp read_momdp(std::istream& is) {
    detail::expect_token(is, "momdp");
    detail::expect_token(is, "1");
    const auto S = detail::read_size(is, "states");
    const auto A = detail::read_size(is, "actions");
    const auto H = detail::read_size(is, "horizon");
    const auto d = detail::read_size(is, "objectives");
    const auto x1 = detail::read_size(is, "initial_state");
    const auto L = detail::read_size(is, "transition_layers");
    if (S == 0 || A == 0 || H == 0 || d == 0) throw FormatError("sizes must be positive");
    if (L != 1 && L != H) throw FormatError("transition_layers must be 1 or the horizon");

    Momdp m{TransitionKernel(S, A, L), RewardTensor(H, S, A, d), x1};
    detail::expect_token(is, "transitions");
    for (double& v : m.transitions.data()) v = detail::read_double(is);
    detail::expect_token(is, "rewards");
    for (double& v : m.rewards.data()) v = detail::read_double(is);
    detail::expect_token(is, "end");
    return m;
}

inline void save_momdp(const std::string& path, const Momdp& m) {
    detail::with_file(path, std::ios::out | std::ios::trunc, [&](std::fstream& f) {
        write_momdp(f, m);
        return 0;
    });
}

inline Momdp load_momdp(const std::string& path) {
    return detail::with_file(path, std::ios::in, [](std::fstream& f) { return read_momdp(f); });
}

// ---------------------------------------------------------------------------
// History: one step per line, "episode,h,x,a", all 0-based.

inline void write_history(std::ostream& os, const HistoryBuffer& hist) {
    os << "# history states=" << hist.num_states() << " actions=" << hist.num_actions()
       << " horizon=" << hist.horizon() << " per_step=" << (hist.per_step() ? 1 : 0) << '\n'
       << "episode,h,x,a\n";
    for (std::size_t k = 0; k < hist.size(); ++k) {
        const auto& steps = hist.episodes()[k].steps;
        for (std::size_t h = 0; h < steps.size(); ++h)
            os << k << ',' << h << ',' << steps[h].state << ',' << steps[h].action << '\n';
    }
}

inline HistoryBuffer read_history(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# history", 0) != 0)
        throw FormatError("history: missing '# history' header");
    std::size_t S = 0, A = 0, H = 0, per_step = 0;
    {
        std::istringstream hs(line.substr(9));
        for (std::string kv; hs >> kv;) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw FormatError("history: bad header field " + kv);
            const auto key = kv.substr(0, eq);
            const std::size_t val = std::stoull(kv.substr(eq + 1));
            if (key == "states") S = val;
            else if (key == "actions") A = val;
            else if (key == "horizon") H = val;
            else if (key == "per_step") per_step = val;
            else throw FormatError("history: unknown header field " + key);
        }
    }
    if (S == 0 || A == 0 || H == 0) throw FormatError("history: sizes must be positive");
    if (!std::getline(is, line) || line != "episode,h,x,a")
        throw FormatError("history: missing column header");

    HistoryBuffer hist(S, A, H, per_step != 0);
    Trajectory current;
    std::size_t current_episode = 0;
    auto flush = [&] {
        if (!current.steps.empty()) hist.append(std::move(current));
        current = Trajectory{};
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::size_t f[4];
        std::istringstream ls(line);
        std::string cell;
        for (std::size_t i = 0; i < 4; ++i) {
            if (!std::getline(ls, cell, ',')) throw FormatError("history: short line: " + line);
            f[i] = std::stoull(cell);
        }
        if (f[0] != current_episode) {
            if (f[0] != current_episode + 1 || current.steps.size() != H)
                throw FormatError("history: episodes must be contiguous and complete");
            flush();
            current_episode = f[0];
        }
        if (f[1] != current.steps.size()) throw FormatError("history: steps out of order: " + line);
        if (f[2] >= S || f[3] >= A) throw FormatError("history: index out of range: " + line);
        current.steps.push_back({f[2], f[3]});
    }
    if (!current.steps.empty() && current.steps.size() != H)
        throw FormatError("history: last episode is incomplete");
    flush();
    return hist;
}

inline void save_history(const std::string& path, const HistoryBuffer& h) {
    detail::with_file(path, std::ios::out | std::ios::trunc, [&](std::fstream& f) {
        write_history(f, h);
        return 0;
    });
}

inline HistoryBuffer load_history(const std::string& path) {
    return detail::with_file(path, std::ios::in, [](std::fstream& f) { return read_history(f); });
}

} // namespace morl
