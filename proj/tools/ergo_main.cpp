// ergo: command-line front end for the blind stochastic game toolkit.
//
// Exit codes: 0 = success / property holds, 1 = property fails (e.g. the game
// is not ergodic), 2 = input error, 3 = search budget exceeded.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ergo/abstraction.hpp"
#include "ergo/analysis.hpp"
#include "ergo/ergodicity.hpp"
#include "ergo/io.hpp"
#include "ergo/oracles.hpp"
#include "ergo/pfa.hpp"
#include "ergo/solver.hpp"

namespace {

using nlohmann::json;

struct Options {
    std::string command;
    std::string game_path;
    std::string pfa_path;
    std::string output_path;
    std::string eps = "0.1";
    std::string theta = "1/2";
    std::string tol = "1/10000";
    std::string strategy1 = "uniform";
    std::string strategy2 = "uniform";
    long long n_max = 1 << 20;
    long long horizon = 100;
    long long length = -1;  // oracle-check walk length; -1 = 3 * n_eps
    int max_len = 8;
    std::uint64_t seed = 1;
    std::uint64_t samples = 1 << 16;
    int threads = 0;
    bool json_output = false;
    ergo::SearchBudget budget;
};

class PhaseTimer {
  public:
    explicit PhaseTimer(ergo::RunReport& report) : report_(report) {}
    void mark(const std::string& phase) {
        auto now = std::chrono::steady_clock::now();
        report_.timings_ms[phase] = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
    }

  private:
    ergo::RunReport& report_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

template <class S>
json scalar_report(const S& x) {
    if constexpr (ergo::num_traits<S>::exact) {
        json v;
        v["exact"] = ergo::scalar_to_json(x);
        v["approx"] = ergo::to_double(x);
        return v;
    } else {
        return x;
    }
}

template <class S>
json counterexample_json(const ergo::BlindGame<S>& game, const ergo::ActionSequence& seq) {
    json arr = json::array();
    for (int a : seq) {
        auto [i, j] = game.split_pair(a);
        arr.push_back(json::array({game.actions1[i], game.actions2[j]}));
    }
    return arr;
}

template <class S>
json certificate_json(const ergo::BlindGame<S>& game, const ergo::ErgodicityCertificate<S>& cert) {
    json out;
    out["verdict"] = cert.ergodic() ? "Ergodic" : "NotErgodic";
    out["paz_bound"] = cert.paz;
    if (cert.ergodic()) {
        out["n0"] = cert.n0;
        out["tau_bar"] = scalar_report(cert.tau_bar);
    } else {
        out["counterexample"] = counterexample_json(game, cert.counterexample);
    }
    return out;
}

void finish(const ergo::RunReport& report, const Options& opt) {
    if (opt.json_output)
        std::cout << report.to_json().dump(2) << "\n";
    else
        std::cout << report.render_human();
}

template <class S>
int cmd_validate(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto loaded = ergo::parse_game<S>(opt.game_path);
    timer.mark("parse");
    report.outputs["valid"] = true;
    report.outputs["num_states"] = loaded.game.num_states();
    report.outputs["num_actions1"] = loaded.game.num_actions1();
    report.outputs["num_actions2"] = loaded.game.num_actions2();
    finish(report, opt);
    return 0;
}

template <class S>
int cmd_classify(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto loaded = ergo::parse_game<S>(opt.game_path);
    timer.mark("parse");
    json pairs = json::array();
    for (int a = 0; a < loaded.game.num_pairs(); ++a) {
        auto [i, j] = loaded.game.split_pair(a);
        ergo::MatrixClassReport r = ergo::classify(loaded.game.transition(a));
        json entry;
        entry["i"] = loaded.game.actions1[i];
        entry["j"] = loaded.game.actions2[j];
        entry["is_markov"] = r.is_markov;
        entry["is_scrambling"] = r.is_scrambling;
        entry["is_sarymsakov"] = r.is_sarymsakov;
        entry["is_sia"] = r.is_sia;
        entry["is_stable"] = r.is_stable;
        entry["tau1"] = scalar_report(ergo::tau1(loaded.game.transition(a)));
        pairs.push_back(std::move(entry));
    }
    timer.mark("classify");
    report.outputs["pairs"] = std::move(pairs);
    finish(report, opt);
    return 0;
}

template <class S>
int cmd_check_ergodic(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto loaded = ergo::parse_game<S>(opt.game_path);
    timer.mark("parse");
    auto cert = ergo::verify_ergodic(loaded.game, opt.budget, opt.threads);
    timer.mark("verify");
    report.outputs = certificate_json(loaded.game, cert);
    finish(report, opt);
    return cert.ergodic() ? 0 : 1;
}

template <class S>
int cmd_n_eps(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto loaded = ergo::parse_game<S>(opt.game_path);
    const S eps = ergo::scalar_from_string<S>(opt.eps);
    timer.mark("parse");
    auto cert = ergo::verify_ergodic(loaded.game, opt.budget, opt.threads);
    timer.mark("verify");
    report.outputs = certificate_json(loaded.game, cert);
    if (!cert.ergodic()) {
        finish(report, opt);
        return 1;
    }
    report.outputs["n_eps"] = ergo::n_epsilon(loaded.game, cert, eps);
    timer.mark("n_eps");
    finish(report, opt);
    return 0;
}

template <class S>
int cmd_build_abstract(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto loaded = ergo::parse_game<S>(opt.game_path);
    const S eps = ergo::scalar_from_string<S>(opt.eps);
    timer.mark("parse");
    auto cert = ergo::verify_ergodic(loaded.game, opt.budget, opt.threads);
    timer.mark("verify");
    if (!cert.ergodic()) {
        report.outputs = certificate_json(loaded.game, cert);
        finish(report, opt);
        return 1;
    }
    auto abstract = ergo::build_abstract_game(loaded.game, loaded.initial_belief, eps, cert, opt.budget);
    timer.mark("build");

    report.outputs["n_eps"] = abstract.n_eps;
    report.outputs["num_states"] = abstract.num_states();
    report.outputs["num_beliefs"] = abstract.beliefs.size();
    json states = json::array();
    for (std::size_t x = 0; x < abstract.num_states(); ++x) {
        json st;
        st["id"] = x;
        st["base"] = ergo::belief_to_json(abstract.states[x].base);
        json prefix = json::array();
        for (int a : abstract.states[x].prefix) {
            auto [i, j] = abstract.split_pair(a);
            prefix.push_back(json::array({abstract.actions1[i], abstract.actions2[j]}));
        }
        st["prefix"] = std::move(prefix);
        st["belief"] = ergo::belief_to_json(abstract.projections[x]);
        states.push_back(std::move(st));
    }
    report.outputs["states"] = std::move(states);
    json edges = json::array();
    for (std::size_t x = 0; x < abstract.num_states(); ++x) {
        for (int a = 0; a < abstract.num_pairs(); ++a) {
            auto [i, j] = abstract.split_pair(a);
            json e;
            e["from"] = x;
            e["i"] = abstract.actions1[i];
            e["j"] = abstract.actions2[j];
            e["to"] = abstract.succ[x][static_cast<std::size_t>(a)];
            e["reward"] = scalar_report(abstract.reward[x][static_cast<std::size_t>(a)]);
            edges.push_back(std::move(e));
        }
    }
    report.outputs["edges"] = std::move(edges);
    finish(report, opt);
    return 0;
}

template <class S>
int cmd_solve(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto loaded = ergo::parse_game<S>(opt.game_path);
    const S eps = ergo::scalar_from_string<S>(opt.eps);
    timer.mark("parse");
    ergo::SolverParams<S> params;
    params.tol = ergo::scalar_from_string<S>(opt.tol);
    params.n_max = opt.n_max;
    try {
        auto result = ergo::approximate_uniform_value(loaded.game, loaded.initial_belief, eps, params,
                                                      opt.budget, opt.threads);
        timer.mark("solve");
        report.outputs["ergodic"] = true;
        report.outputs["n0"] = result.cert.n0;
        report.outputs["tau_bar"] = scalar_report(result.cert.tau_bar);
        report.outputs["paz_bound"] = result.cert.paz;
        report.outputs["n_eps"] = result.n_eps;
        report.outputs["abstract_states"] = result.abstract_states;
        report.outputs["num_beliefs"] = result.num_beliefs;
        report.outputs["single_player"] = result.single_player;
        report.outputs["method"] = result.single_player ? "mean-cycle" : "value-iteration";
        report.outputs["root_value"] = scalar_report(result.root_value);
        report.outputs["guarantee_radius"] = scalar_report(result.guarantee_radius);
        report.outputs["residual"] = scalar_report(result.residual);
        report.outputs["horizon"] = result.horizon;
        finish(report, opt);
        return 0;
    } catch (const ergo::NotErgodicError& e) {
        report.outputs["ergodic"] = false;
        report.outputs["counterexample"] = counterexample_json(loaded.game, e.counterexample);
        finish(report, opt);
        return 1;
    }
}

template <class S>
int cmd_reduce_pfa(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto pfa = ergo::parse_pfa<S>(opt.pfa_path);
    const S theta = ergo::scalar_from_string<S>(opt.theta);
    timer.mark("parse");
    auto reduced = ergo::reduce_to_blind_mdp(pfa, theta);
    timer.mark("reduce");
    json game_file = ergo::emit_game(reduced.game, reduced.initial_belief);
    if (!opt.output_path.empty()) {
        std::ofstream out(opt.output_path);
        if (!out) throw ergo::ParseError("cannot write file: " + opt.output_path);
        out << game_file.dump(2) << "\n";
        report.outputs["written"] = opt.output_path;
        report.outputs["num_states"] = reduced.game.num_states();
        report.outputs["num_actions"] = reduced.game.num_actions1();
        finish(report, opt);
    } else {
        // The emitted game file *is* the payload.
        std::cout << game_file.dump(2) << "\n";
    }
    return 0;
}

template <class S>
int cmd_pfa_search(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto pfa = ergo::parse_pfa<S>(opt.pfa_path);
    timer.mark("parse");
    auto word = ergo::exists_word_above_half(pfa, opt.max_len, opt.budget.max_products);
    timer.mark("search");
    report.outputs["max_len"] = opt.max_len;
    report.outputs["found"] = word.has_value();
    if (word) {
        json w = json::array();
        for (int s : *word) w.push_back(pfa.symbols[static_cast<std::size_t>(s)]);
        report.outputs["word"] = std::move(w);
        report.outputs["acceptance"] = scalar_report(ergo::acceptance_probability(pfa, *word));
    }
    finish(report, opt);
    return word ? 0 : 1;
}

template <class S>
int cmd_oracle_check(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto loaded = ergo::parse_game<S>(opt.game_path);
    const S eps = ergo::scalar_from_string<S>(opt.eps);
    timer.mark("parse");
    auto cert = ergo::verify_ergodic(loaded.game, opt.budget, opt.threads);
    timer.mark("verify");
    if (!cert.ergodic()) {
        report.outputs = certificate_json(loaded.game, cert);
        finish(report, opt);
        return 1;
    }
    long long n = ergo::n_epsilon(loaded.game, cert, eps);
    long long length = opt.length > 0 ? opt.length : 3 * n;
    auto coupling = ergo::coupling_check(loaded.game, loaded.initial_belief, eps, cert, length,
                                         opt.samples, opt.seed, opt.budget);
    timer.mark("coupling");
    S bound = S(4) * eps;
    bool coupling_ok = coupling.max_deviation <= bound;

    long long horizon = std::min<long long>(opt.horizon, 4);
    S gap = ergo::payoff_gap_check(loaded.game, loaded.initial_belief, eps, cert, horizon, opt.budget);
    timer.mark("payoff_gap");
    bool gap_ok = gap <= bound;

    report.outputs["n_eps"] = n;
    report.outputs["walk_length"] = length;
    report.outputs["walks"] = coupling.walks;
    report.outputs["exhaustive"] = coupling.exhaustive;
    report.outputs["coupling_max_deviation"] = scalar_report(coupling.max_deviation);
    report.outputs["coupling_first_block_deviation"] = scalar_report(coupling.max_deviation_first_block);
    report.outputs["payoff_gap_horizon"] = horizon;
    report.outputs["payoff_gap"] = scalar_report(gap);
    report.outputs["bound"] = scalar_report(bound);
    report.outputs["pass"] = coupling_ok && gap_ok;
    finish(report, opt);
    return (coupling_ok && gap_ok) ? 0 : 1;
}

template <class S>
ergo::Strategy<S> parse_strategy(const std::string& text, const std::vector<std::string>& actions) {
    if (text == "uniform") return ergo::Strategy<S>::uniform();
    const std::string prefix = "cyclic:";
    if (text.rfind(prefix, 0) == 0) {
        std::vector<int> cycle;
        std::string rest = text.substr(prefix.size());
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            std::size_t comma = rest.find(',', pos);
            std::string name = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            bool found = false;
            for (std::size_t i = 0; i < actions.size(); ++i) {
                if (actions[i] == name) {
                    cycle.push_back(static_cast<int>(i));
                    found = true;
                    break;
                }
            }
            if (!found) throw ergo::UnknownActionError("unknown action \"" + name + "\" in strategy string");
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return ergo::Strategy<S>::cyclic(std::move(cycle));
    }
    throw ergo::DomainError("strategy string must be \"uniform\" or \"cyclic:a,b,...\"");
}

template <class S>
int cmd_simulate(const Options& opt, ergo::RunReport& report) {
    PhaseTimer timer(report);
    auto loaded = ergo::parse_game<S>(opt.game_path);
    timer.mark("parse");
    auto s1 = parse_strategy<S>(opt.strategy1, loaded.game.actions1);
    auto s2 = parse_strategy<S>(opt.strategy2, loaded.game.actions2);
    auto trace = ergo::simulate(loaded.game, loaded.initial_belief, s1, s2, opt.horizon, opt.seed);
    timer.mark("simulate");

    report.outputs["seed"] = trace.seed;
    report.outputs["rng"] = trace.rng_name;
    report.outputs["stages"] = trace.rewards.size();
    S total(0);
    for (const S& r : trace.rewards) total += r;
    report.outputs["mean_reward"] =
        scalar_report(trace.rewards.empty() ? S(0) : S(total / S(static_cast<long long>(trace.rewards.size()))));
    json hist = json::array();
    for (int a : trace.history) {
        auto [i, j] = loaded.game.split_pair(a);
        hist.push_back(json::array({loaded.game.actions1[i], loaded.game.actions2[j]}));
    }
    report.outputs["history"] = std::move(hist);
    json states = json::array();
    for (int k : trace.state_seq) states.push_back(loaded.game.states[static_cast<std::size_t>(k)]);
    report.outputs["states"] = std::move(states);
    json rewards = json::array();
    for (const S& r : trace.rewards) rewards.push_back(ergo::scalar_to_json(r));
    report.outputs["rewards"] = std::move(rewards);
    report.outputs["final_belief"] = ergo::belief_to_json(trace.beliefs.back());
    finish(report, opt);
    return 0;
}

template <class S>
int dispatch(const Options& opt) {
    ergo::RunReport report;
    report.command = opt.command;
    report.mode = ergo::num_traits<S>::mode_name();
    if (!opt.game_path.empty()) report.inputs["game"] = opt.game_path;
    if (!opt.pfa_path.empty()) report.inputs["pfa"] = opt.pfa_path;
    report.inputs["eps"] = opt.eps;
    report.inputs["seed"] = opt.seed;
    report.inputs["threads"] = opt.threads;
    if (opt.command == "solve") {
        report.inputs["tol"] = opt.tol;
        report.inputs["n_max"] = opt.n_max;
    }
    if (opt.command == "reduce-pfa") report.inputs["theta"] = opt.theta;
    if (opt.command == "pfa-search") report.inputs["max_len"] = opt.max_len;
    if (opt.command == "simulate" || opt.command == "oracle-check") report.inputs["horizon"] = opt.horizon;
    if (opt.command == "simulate") {
        report.inputs["p1"] = opt.strategy1;
        report.inputs["p2"] = opt.strategy2;
    }
    nlohmann::json budget;
    budget["max_patterns"] = opt.budget.max_patterns;
    budget["max_products"] = opt.budget.max_products;
    budget["max_states"] = opt.budget.max_states;
    budget["max_seconds"] = opt.budget.max_seconds;
    report.inputs["budget"] = std::move(budget);

    if (opt.command == "validate") return cmd_validate<S>(opt, report);
    if (opt.command == "classify") return cmd_classify<S>(opt, report);
    if (opt.command == "check-ergodic") return cmd_check_ergodic<S>(opt, report);
    if (opt.command == "n-eps") return cmd_n_eps<S>(opt, report);
    if (opt.command == "build-abstract") return cmd_build_abstract<S>(opt, report);
    if (opt.command == "solve") return cmd_solve<S>(opt, report);
    if (opt.command == "reduce-pfa") return cmd_reduce_pfa<S>(opt, report);
    if (opt.command == "pfa-search") return cmd_pfa_search<S>(opt, report);
    if (opt.command == "oracle-check") return cmd_oracle_check<S>(opt, report);
    if (opt.command == "simulate") return cmd_simulate<S>(opt, report);
    throw ergo::DomainError("unknown command " + opt.command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver toolkit for ergodic blind stochastic games"};
    app.require_subcommand(1);

    Options opt;
    std::string mode = "exact";
    app.add_option("--mode", mode, "Numeric mode: exact rationals or floating point")
        ->check(CLI::IsMember({"exact", "float"}))
        ->capture_default_str();
    app.add_flag("--json", opt.json_output, "Emit the machine-readable JSON report");
    app.add_option("--threads", opt.threads, "Worker threads (0 = hardware parallelism)");
    app.add_option("--max-patterns", opt.budget.max_patterns, "Pattern-layer budget")->capture_default_str();
    app.add_option("--max-products", opt.budget.max_products, "Numeric product-set budget")
        ->capture_default_str();
    app.add_option("--max-states", opt.budget.max_states, "Abstract-game state budget")->capture_default_str();
    app.add_option("--max-seconds", opt.budget.max_seconds, "Wall-clock budget (0 = unlimited)")
        ->capture_default_str();

    auto add_game = [&](CLI::App* c) {
        c->add_option("game", opt.game_path, "Game file (JSON)")->required();
    };
    auto add_pfa = [&](CLI::App* c) {
        c->add_option("pfa", opt.pfa_path, "PFA file (JSON)")->required();
    };
    auto add_eps = [&](CLI::App* c) {
        c->add_option("--eps", opt.eps, "Approximation level in (0, 1); decimals or p/q")->required();
    };

    add_game(app.add_subcommand("validate", "Check the game file invariants"));
    add_game(app.add_subcommand("classify", "Classify each action pair's transition matrix"));
    add_game(app.add_subcommand("check-ergodic", "Decide the ergodic property"));
    {
        auto* c = app.add_subcommand("n-eps", "Block length n_eps for a given eps");
        add_game(c);
        add_eps(c);
    }
    {
        auto* c = app.add_subcommand("build-abstract", "Construct the finite abstract game");
        add_game(c);
        add_eps(c);
    }
    {
        auto* c = app.add_subcommand("solve", "Approximate the uniform value within 4*eps");
        add_game(c);
        add_eps(c);
        c->add_option("--tol", opt.tol, "Residual target for the doubling horizons");
        c->add_option("--n-max", opt.n_max, "Horizon cap for value iteration");
    }
    {
        auto* c = app.add_subcommand("reduce-pfa", "Reduce a PFA to a blind MDP game file");
        add_pfa(c);
        c->add_option("--theta", opt.theta, "Sink probability in (0, 1)");
        c->add_option("-o,--output", opt.output_path, "Output game file (default: stdout)");
    }
    {
        auto* c = app.add_subcommand("pfa-search", "Bounded search for a word accepted with p > 1/2");
        add_pfa(c);
        c->add_option("--max-len", opt.max_len, "Maximum word length");
    }
    {
        auto* c = app.add_subcommand("oracle-check", "Coupling and payoff-gap checks against 4*eps");
        add_game(c);
        add_eps(c);
        c->add_option("--length", opt.length, "Walk length (default 3 * n_eps)");
        c->add_option("--horizon", opt.horizon, "Brute-force horizon (capped at 4)");
        c->add_option("--samples", opt.samples, "Walk budget before sampling kicks in");
        c->add_option("--seed", opt.seed, "Seed for sampled walks");
    }
    {
        auto* c = app.add_subcommand("simulate", "Sample one play of the blind game");
        add_game(c);
        c->add_option("--horizon", opt.horizon, "Number of stages");
        c->add_option("--seed", opt.seed, "RNG seed");
        c->add_option("--p1", opt.strategy1, "Player 1 strategy: uniform | cyclic:a,b,...");
        c->add_option("--p2", opt.strategy2, "Player 2 strategy: uniform | cyclic:a,b,...");
    }

    for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    opt.command = app.get_subcommands().front()->get_name();
    if (const char* env = std::getenv("ERGO_MODE")) {
        std::string m(env);
        if (m == "exact" || m == "float") mode = m;
    }
    if (opt.threads <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        opt.threads = hw == 0 ? 1 : static_cast<int>(hw);
    }

    try {
        return mode == "exact" ? dispatch<ergo::Rational>(opt) : dispatch<double>(opt);
    } catch (const ergo::BudgetExceededError& e) {
        std::cerr << "error (budget): " << e.what() << "\n";
        return 3;
    } catch (const ergo::NotErgodicError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ergo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
