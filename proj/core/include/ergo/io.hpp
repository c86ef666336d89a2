#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ergo/errors.hpp"
#include "ergo/game.hpp"
#include "ergo/pfa.hpp"

namespace ergo {

// Minimal JSON value that keeps every number as its raw literal text, so the
// exact mode can turn "0.9" into 9/10 instead of the nearest double.
struct RawJson {
    enum class Type { Null, Boolean, Number, String, Array, Object };
    Type type = Type::Null;
    bool boolean = false;
    std::string text;  // number literal or string payload
    std::vector<RawJson> items;
    std::vector<std::pair<std::string, RawJson>> members;  // file order

    const RawJson* find(const std::string& key) const {
        for (const auto& [k, v] : members)
            if (k == key) return &v;
        return nullptr;
    }
};

RawJson parse_raw_json(const std::string& text);
RawJson parse_raw_json_file(const std::string& path);

template <class S>
struct LoadedGame {
    BlindGame<S> game;
    Belief<S> initial_belief;
};

namespace detail {

template <class S>
S scalar_from_raw(const RawJson& node, const std::string& where) {
    if (node.type == RawJson::Type::Number || node.type == RawJson::Type::String) {
        try {
            return scalar_from_string<S>(node.text);
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " at " + where);
        }
    }
    throw ParseError("expected a number or rational string at " + where);
}

inline const RawJson& require(const RawJson& obj, const std::string& key, const std::string& what) {
    const RawJson* v = obj.find(key);
    if (!v) throw ParseError(what + " is missing the \"" + key + "\" key");
    return *v;
}

inline std::vector<std::string> string_array(const RawJson& node, const std::string& where) {
    if (node.type != RawJson::Type::Array) throw ParseError(where + " must be an array of names");
    std::vector<std::string> out;
    for (const RawJson& item : node.items) {
        if (item.type != RawJson::Type::String) throw ParseError(where + " must contain only strings");
        out.push_back(item.text);
    }
    return out;
}

inline int name_index(const std::vector<std::string>& names, const std::string& name,
                      const std::string& what) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw ParseError("unknown " + what + " \"" + name + "\"");
}

inline void check_unique(const std::vector<std::string>& names, const std::string& what) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].find('|') != std::string::npos)
            throw ParseError(what + " name \"" + names[i] + "\" may not contain '|'");
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j]) throw ParseError("duplicate " + what + " name \"" + names[i] + "\"");
    }
}

template <class S>
std::vector<S> scalar_array(const RawJson& node, int expected, const std::string& where) {
    if (node.type != RawJson::Type::Array || static_cast<int>(node.items.size()) != expected)
        throw ParseError(where + " must be an array of length " + std::to_string(expected));
    std::vector<S> out;
    out.reserve(node.items.size());
    for (std::size_t i = 0; i < node.items.size(); ++i)
        out.push_back(scalar_from_raw<S>(node.items[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

template <class S>
Matrix<S> scalar_matrix(const RawJson& node, int rows, int cols, const std::string& where) {
    if (node.type != RawJson::Type::Array || static_cast<int>(node.items.size()) != rows)
        throw ParseError(where + " must be a " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " array");
    Matrix<S> m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        std::vector<S> row = scalar_array<S>(node.items[static_cast<std::size_t>(r)], cols,
                                             where + "[" + std::to_string(r) + "]");
        for (int c = 0; c < cols; ++c) m.at(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

// Splits "i|j" keys; a bare "i" is accepted when player 2 has the single
// default action.
inline std::pair<std::string, std::string> split_action_key(const std::string& key, bool allow_bare,
                                                            const std::string& bare_second) {
    std::size_t bar = key.find('|');
    if (bar == std::string::npos) {
        if (allow_bare) return {key, bare_second};
        throw ParseError("action key \"" + key + "\" is not of the form \"i|j\"");
    }
    return {key.substr(0, bar), key.substr(bar + 1)};
}

}  // namespace detail

// Game file: {"states", "actions1", "actions2"?, "transitions": {"i|j": KxK},
// "rewards": {"i|j": K}, "initial_belief"?}. Numbers may be decimals or
// rational strings "p/q"; a missing "actions2" is the blind-MDP singleton
// ["*"]; a missing "initial_belief" is uniform. Validation runs on load.
template <class S>
LoadedGame<S> parse_game_raw(const RawJson& root) {
    if (root.type != RawJson::Type::Object) throw ParseError("game file must be a JSON object");
    LoadedGame<S> out;
    BlindGame<S>& g = out.game;
    g.states = detail::string_array(detail::require(root, "states", "game file"), "\"states\"");
    g.actions1 = detail::string_array(detail::require(root, "actions1", "game file"), "\"actions1\"");
    if (const RawJson* a2 = root.find("actions2"))
        g.actions2 = detail::string_array(*a2, "\"actions2\"");
    else
        g.actions2 = {"*"};
    detail::check_unique(g.states, "state");
    detail::check_unique(g.actions1, "action");
    detail::check_unique(g.actions2, "action");
    const int k = g.num_states();
    if (k == 0) throw ParseError("\"states\" must be nonempty");
    if (g.actions1.empty() || g.actions2.empty()) throw ParseError("action sets must be nonempty");

    const bool bare_ok = g.actions2.size() == 1;
    auto pair_table = [&](const RawJson& node, const char* what) {
        if (node.type != RawJson::Type::Object)
            throw ParseError(std::string("\"") + what + "\" must be an object keyed by \"i|j\"");
        std::vector<const RawJson*> per_pair(static_cast<std::size_t>(g.num_pairs()), nullptr);
        for (const auto& [key, value] : node.members) {
            auto [iname, jname] = detail::split_action_key(key, bare_ok, g.actions2[0]);
            int i = detail::name_index(g.actions1, iname, std::string(what) + " action");
            int j = detail::name_index(g.actions2, jname, std::string(what) + " action");
            auto& slot = per_pair[static_cast<std::size_t>(g.pair_index(i, j))];
            if (slot) throw ParseError(std::string("duplicate ") + what + " key \"" + key + "\"");
            slot = &value;
        }
        for (int a = 0; a < g.num_pairs(); ++a) {
            if (!per_pair[static_cast<std::size_t>(a)]) {
                auto [i, j] = g.split_pair(a);
                throw ParseError(std::string("\"") + what + "\" is missing the pair \"" + g.actions1[i] +
                                 "|" + g.actions2[j] + "\"");
            }
        }
        return per_pair;
    };

    auto trans = pair_table(detail::require(root, "transitions", "game file"), "transitions");
    auto rew = pair_table(detail::require(root, "rewards", "game file"), "rewards");
    for (int a = 0; a < g.num_pairs(); ++a) {
        auto [i, j] = g.split_pair(a);
        std::string label = g.actions1[i] + "|" + g.actions2[j];
        g.transitions.push_back(
            detail::scalar_matrix<S>(*trans[static_cast<std::size_t>(a)], k, k, "transitions." + label));
        g.rewards.push_back(detail::scalar_array<S>(*rew[static_cast<std::size_t>(a)], k, "rewards." + label));
    }

    if (const RawJson* ib = root.find("initial_belief"))
        out.initial_belief = Belief<S>(detail::scalar_array<S>(*ib, k, "initial_belief"));
    else
        out.initial_belief = Belief<S>::uniform(k);

    validate_game(g);
    validate_belief(out.initial_belief);
    return out;
}

template <class S>
LoadedGame<S> parse_game_text(const std::string& text) {
    return parse_game_raw<S>(parse_raw_json(text));
}

template <class S>
LoadedGame<S> parse_game(const std::string& path) {
    return parse_game_raw<S>(parse_raw_json_file(path));
}

// PFA file: {"states", "symbols", "transitions": {"k|i": row}, "accepting",
// "initial"}. Accepting states must be nonabsorbing.
template <class S>
Pfa<S> parse_pfa_raw(const RawJson& root) {
    if (root.type != RawJson::Type::Object) throw ParseError("PFA file must be a JSON object");
    Pfa<S> pfa;
    pfa.states = detail::string_array(detail::require(root, "states", "PFA file"), "\"states\"");
    pfa.symbols = detail::string_array(detail::require(root, "symbols", "PFA file"), "\"symbols\"");
    detail::check_unique(pfa.states, "state");
    detail::check_unique(pfa.symbols, "symbol");
    const int k = pfa.num_states();
    if (k == 0 || pfa.num_symbols() == 0) throw ParseError("PFA needs states and symbols");

    const RawJson& trans = detail::require(root, "transitions", "PFA file");
    if (trans.type != RawJson::Type::Object)
        throw ParseError("\"transitions\" must be an object keyed by \"state|symbol\"");
    std::vector<std::vector<const RawJson*>> rows(
        static_cast<std::size_t>(k), std::vector<const RawJson*>(static_cast<std::size_t>(pfa.num_symbols()), nullptr));
    for (const auto& [key, value] : trans.members) {
        auto [kname, iname] = detail::split_action_key(key, false, "");
        int state = detail::name_index(pfa.states, kname, "state");
        int sym = detail::name_index(pfa.symbols, iname, "symbol");
        auto& slot = rows[static_cast<std::size_t>(state)][static_cast<std::size_t>(sym)];
        if (slot) throw ParseError("duplicate transitions key \"" + key + "\"");
        slot = &value;
    }
    for (int s = 0; s < pfa.num_symbols(); ++s) {
        Matrix<S> m(k, k);
        for (int r = 0; r < k; ++r) {
            const RawJson* row = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
            if (!row)
                throw ParseError("\"transitions\" is missing the key \"" + pfa.states[static_cast<std::size_t>(r)] +
                                 "|" + pfa.symbols[static_cast<std::size_t>(s)] + "\"");
            std::vector<S> vals = detail::scalar_array<S>(
                *row, k, "transitions." + pfa.states[static_cast<std::size_t>(r)] + "|" + pfa.symbols[static_cast<std::size_t>(s)]);
            for (int c = 0; c < k; ++c) m.at(r, c) = vals[static_cast<std::size_t>(c)];
        }
        pfa.transitions.push_back(std::move(m));
    }

    pfa.accepting.assign(static_cast<std::size_t>(k), 0);
    for (const std::string& name :
         detail::string_array(detail::require(root, "accepting", "PFA file"), "\"accepting\""))
        pfa.accepting[static_cast<std::size_t>(detail::name_index(pfa.states, name, "accepting state"))] = 1;

    const RawJson& init = detail::require(root, "initial", "PFA file");
    if (init.type != RawJson::Type::String) throw ParseError("\"initial\" must be a state name");
    pfa.initial = detail::name_index(pfa.states, init.text, "initial state");

    validate_pfa(pfa, /*require_nonabsorbing_accepting=*/true);
    return pfa;
}

template <class S>
Pfa<S> parse_pfa_text(const std::string& text) {
    return parse_pfa_raw<S>(parse_raw_json(text));
}

template <class S>
Pfa<S> parse_pfa(const std::string& path) {
    return parse_pfa_raw<S>(parse_raw_json_file(path));
}

// Emission. Exact scalars become JSON integers when integral and "p/q"
// strings otherwise, so a parse -> emit -> parse round trip reproduces the
// in-memory object exactly.
inline nlohmann::json scalar_to_json(const Rational& x) {
    if (boost::multiprecision::denominator(x) == 1) {
        BigInt num = boost::multiprecision::numerator(x);
        if (num >= std::numeric_limits<std::int64_t>::min() &&
            num <= std::numeric_limits<std::int64_t>::max())
            return num.convert_to<std::int64_t>();
    }
    return rational_to_string(x);
}

inline nlohmann::json scalar_to_json(double x) { return x; }

template <class S>
nlohmann::json belief_to_json(const Belief<S>& b) {
    nlohmann::json arr = nlohmann::json::array();
    for (const S& x : b.w) arr.push_back(scalar_to_json(x));
    return arr;
}

template <class S>
nlohmann::json matrix_to_json(const Matrix<S>& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m.at(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class S>
nlohmann::json emit_game(const BlindGame<S>& g, const Belief<S>& initial) {
    nlohmann::json out;
    out["states"] = g.states;
    out["actions1"] = g.actions1;
    out["actions2"] = g.actions2;
    nlohmann::json trans = nlohmann::json::object();
    nlohmann::json rew = nlohmann::json::object();
    for (int a = 0; a < g.num_pairs(); ++a) {
        auto [i, j] = g.split_pair(a);
        std::string key = g.actions1[i] + "|" + g.actions2[j];
        trans[key] = matrix_to_json(g.transition(a));
        nlohmann::json r = nlohmann::json::array();
        for (const S& x : g.reward(a)) r.push_back(scalar_to_json(x));
        rew[key] = std::move(r);
    }
    out["transitions"] = std::move(trans);
    out["rewards"] = std::move(rew);
    out["initial_belief"] = belief_to_json(initial);
    return out;
}

template <class S>
nlohmann::json emit_pfa(const Pfa<S>& pfa) {
    nlohmann::json out;
    out["states"] = pfa.states;
    out["symbols"] = pfa.symbols;
    nlohmann::json trans = nlohmann::json::object();
    for (int r = 0; r < pfa.num_states(); ++r) {
        for (int s = 0; s < pfa.num_symbols(); ++s) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < pfa.num_states(); ++c)
                row.push_back(scalar_to_json(pfa.transitions[static_cast<std::size_t>(s)].at(r, c)));
            trans[pfa.states[static_cast<std::size_t>(r)] + "|" + pfa.symbols[static_cast<std::size_t>(s)]] =
                std::move(row);
        }
    }
    out["transitions"] = std::move(trans);
    nlohmann::json acc = nlohmann::json::array();
    for (int k = 0; k < pfa.num_states(); ++k)
        if (pfa.accepting[static_cast<std::size_t>(k)]) acc.push_back(pfa.states[static_cast<std::size_t>(k)]);
    out["accepting"] = std::move(acc);
    out["initial"] = pfa.states[static_cast<std::size_t>(pfa.initial)];
    return out;
}

// Per-invocation report of a CLI command. Deterministic modulo the timings
// block.
struct RunReport {
    std::string command;
    std::string mode;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json outputs = nlohmann::json::object();
    std::map<std::string, double> timings_ms;

    nlohmann::json to_json() const;
    std::string render_human() const;
};

}  // namespace ergo
