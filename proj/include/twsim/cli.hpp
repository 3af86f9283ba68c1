#pragma once

// Batch command-line surface over the pipeline. Exit codes: 0 success,
// 1 input error, 2 resource-budget failure.

#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twsim/circuit.hpp"
#include "twsim/errors.hpp"
#include "twsim/multigraph.hpp"
#include "twsim/oneway.hpp"
#include "twsim/oracle.hpp"
#include "twsim/planner.hpp"
#include "twsim/tensor.hpp"
#include "twsim/treewidth.hpp"

namespace twsim::cli {

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

struct Printer {
    std::ostream& out;
    bool machine;

    void kv(const std::string& key, const std::string& value) const {
        if (machine)
            out << key << '=' << value << '\n';
        else
            out << key << " = " << value << '\n';
    }
    void kv(const std::string& key, double value) const { kv(key, fmt(value)); }
    void kv(const std::string& key, int value) const { kv(key, std::to_string(value)); }
};

inline std::ifstream open_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    return in;
}

inline OrderingStrategy parse_strategy(const std::string& s) {
    if (s == "minfill") return OrderingStrategy::min_fill;
    if (s == "mindeg") return OrderingStrategy::min_degree;
    if (s == "exact") return OrderingStrategy::exact;
    throw input_error("unknown strategy '" + s + "' (expected minfill, mindeg or exact)");
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"treewidth-driven tensor-network simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string strategy_name = "minfill";
    std::uint64_t seed = 0;
    int budget_rank = kDefaultRankBudget;
    int exact_budget = kDefaultExactBudget;
    std::string format = "human";
    int jobs = 1;
    app.add_option("--strategy", strategy_name, "ordering strategy: minfill, mindeg, exact")
        ->capture_default_str();
    app.add_option("--seed", seed, "heuristic tie-break seed")->capture_default_str();
    app.add_option("--budget-rank", budget_rank, "max tensor rank (4^rank entries)")->capture_default_str();
    app.add_option("--budget-exact", exact_budget, "max vertices for the exact solver")->capture_default_str();
    app.add_option("--format", format, "output format: human or machine")->capture_default_str();
    app.add_option("--jobs", jobs, "parallel scenario evaluations")->capture_default_str();

    std::string circuit_path, graph_path, program_path, output_path, input_bits, plan_path, emit_plan_path;
    std::vector<std::string> measure_paths;
    bool oracle_flag = false, exact_flag = false, oblivious_flag = false, full_flag = false;

    auto* simulate = app.add_subcommand("simulate", "probability of a measurement scenario on a circuit");
    simulate->add_option("circuit", circuit_path, "circuit file")->required();
    simulate->add_option("--input", input_bits, "input bitstring (default all zeros)");
    simulate->add_option("--measure", measure_paths, "measurement scenario file (repeatable)");
    simulate->add_flag("--oracle", oracle_flag, "cross-check against the dense oracle");
    simulate->add_option("--plan", plan_path, "contract along a stored plan instead of planning");
    simulate->add_option("--emit-plan", emit_plan_path, "write the network contraction plan to a file");

    auto* plan = app.add_subcommand("plan", "contraction ordering for a graph");
    plan->add_option("graph", graph_path, "graph file (PACE edge list)")->required();
    plan->add_option("-o,--output", output_path, "write the plan to a file");

    auto* treewidth = app.add_subcommand("treewidth", "tree decomposition of a graph");
    treewidth->add_option("graph", graph_path, "graph file")->required();
    treewidth->add_flag("--exact", exact_flag, "exact treewidth (small graphs)");
    treewidth->add_option("-o,--output", output_path, "write the decomposition to a file");

    auto* cc = app.add_subcommand("cc", "contraction complexity of a graph");
    cc->add_option("graph", graph_path, "graph file")->required();
    cc->add_flag("--exact", exact_flag, "exact value via the line graph (small graphs)");

    auto* graphstate = app.add_subcommand("graphstate", "scenario probability on a graph state");
    graphstate->add_option("graph", graph_path, "simple graph file")->required();
    graphstate->add_option("--measure", measure_paths, "vertex scenario file (repeatable)");
    graphstate->add_flag("--oracle", oracle_flag, "cross-check against the amplitude formula");

    auto* oneway = app.add_subcommand("oneway", "simulate a one-way program on a graph state");
    oneway->add_option("graph", graph_path, "simple graph file")->required();
    oneway->add_option("--program", program_path, "one-way program file")->required();
    oneway->add_flag("--oblivious", oblivious_flag, "deterministic simulation of an oblivious program");
    oneway->add_flag("--full", full_flag, "expand to degree 3 first");

    try {
        std::vector<std::string> cli_args(args.rbegin(), args.rend());
        app.parse(cli_args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    detail::Printer p{out, format == "machine"};
    try {
        OrderingStrategy strategy = detail::parse_strategy(strategy_name);

        if (simulate->parsed()) {
            auto in = detail::open_file(circuit_path);
            Circuit c = parse_circuit(in);
            if (input_bits.empty()) input_bits.assign(c.n, '0');
            std::vector<MeasurementScenario> scenarios;
            if (measure_paths.empty()) scenarios.emplace_back();
            for (const auto& path : measure_paths) {
                auto min = detail::open_file(path);
                scenarios.push_back(parse_scenario(min, c.output_count()));
            }
            std::optional<ContractionPlan> stored;
            if (!plan_path.empty()) {
                auto pin = detail::open_file(plan_path);
                stored = read_plan(pin);
            }
            std::vector<SimulationResult> results(scenarios.size());
            auto work = [&](std::size_t i) {
                if (stored) {
                    TensorNetwork net = build_network(c, input_bits, scenarios[i]);
                    ContractionStats stats;
                    Tensor value = contract_network(net, stored->ordering, budget_rank, &stats);
                    results[i].raw_value = value.value();
                    results[i].probability = std::clamp(value.value().real(), 0.0, 1.0);
                    results[i].achieved_max_rank = stats.max_intermediate_rank;
                    results[i].plan = *stored;
                } else {
                    results[i] = simulate_probability(c, input_bits, scenarios[i], strategy, seed, budget_rank,
                                                      exact_budget);
                }
            };
            if (jobs > 1 && scenarios.size() > 1) {
                std::vector<std::future<void>> futures;
                for (std::size_t i = 0; i < scenarios.size(); ++i)
                    futures.push_back(std::async(std::launch::async, work, i));
                for (auto& f : futures) f.get();
            } else {
                for (std::size_t i = 0; i < scenarios.size(); ++i) work(i);
            }
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                std::string tag = scenarios.size() > 1 ? "[" + std::to_string(i) + "]" : "";
                p.kv("probability" + tag, results[i].probability);
                p.kv("achieved_rank" + tag, results[i].achieved_max_rank);
                if (oracle_flag) {
                    double reference = oracle_probability(c, input_bits, scenarios[i]);
                    p.kv("oracle" + tag, reference);
                    p.kv("abs_diff" + tag, std::abs(results[i].probability - reference));
                }
            }
            p.kv("predicted_cc", results[0].plan.predicted_cc);
            p.kv("plan_source", results[0].plan.source);
            if (!emit_plan_path.empty()) {
                std::ofstream of(emit_plan_path);
                write_plan(results[0].plan, of);
            }
            return 0;
        }

        if (plan->parsed()) {
            auto in = detail::open_file(graph_path);
            MultiGraph g = read_pace(in);
            ContractionPlan cp = plan_contraction(g, strategy, seed, exact_budget);
            p.kv("predicted_cc", cp.predicted_cc);
            p.kv("plan_source", cp.source);
            std::ostringstream os;
            for (std::size_t i = 0; i < cp.ordering.size(); ++i) os << (i ? " " : "") << cp.ordering[i];
            p.kv("ordering", os.str());
            if (!output_path.empty()) {
                std::ofstream of(output_path);
                write_plan(cp, of);
            }
            return 0;
        }

        if (treewidth->parsed()) {
            auto in = detail::open_file(graph_path);
            MultiGraph g = read_pace(in);
            EliminationOrdering pi;
            if (exact_flag) {
                auto res = exact_treewidth(g, exact_budget);
                p.kv("tw", res.treewidth);
                pi = res.ordering;
            } else {
                pi = heuristic_order(g, strategy, seed);
                p.kv("width", elimination_width(g, pi).width);
            }
            if (!pi.empty()) {
                TreeDecomposition td = ordering_to_decomposition(g, pi);
                p.kv("bags", static_cast<int>(td.bags.size()));
                if (!output_path.empty()) {
                    std::ofstream of(output_path);
                    write_td(td, g.vertex_count(), of);
                }
            }
            return 0;
        }

        if (cc->parsed()) {
            auto in = detail::open_file(graph_path);
            MultiGraph g = read_pace(in);
            if (exact_flag) {
                p.kv("cc", exact_cc(g, exact_budget));
            } else {
                ContractionPlan cp = plan_contraction(g, strategy, seed, exact_budget);
                p.kv("cc_upper", cp.predicted_cc);
                p.kv("plan_source", cp.source);
            }
            return 0;
        }

        if (graphstate->parsed()) {
            auto in = detail::open_file(graph_path);
            SimpleGraph g = as_simple_graph(read_pace(in));
            std::vector<VertexScenario> scenarios;
            if (measure_paths.empty()) scenarios.emplace_back();
            for (const auto& path : measure_paths) {
                auto min = detail::open_file(path);
                scenarios.push_back(parse_vertex_scenario(min, g));
            }
            GraphStateEngine engine(g, strategy, seed, budget_rank);
            std::vector<double> results(scenarios.size());
            auto work = [&](std::size_t i) { results[i] = engine.probability(scenarios[i]); };
            if (jobs > 1 && scenarios.size() > 1) {
                std::vector<std::future<void>> futures;
                for (std::size_t i = 0; i < scenarios.size(); ++i)
                    futures.push_back(std::async(std::launch::async, work, i));
                for (auto& f : futures) f.get();
            } else {
                for (std::size_t i = 0; i < scenarios.size(); ++i) work(i);
            }
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                std::string tag = scenarios.size() > 1 ? "[" + std::to_string(i) + "]" : "";
                p.kv("probability" + tag, results[i]);
                if (oracle_flag) {
                    DenseState dense = DenseState::from_statevector(oracle_graph_state(g), g.vertices());
                    std::map<int, Matrix> per_line(scenarios[i].begin(), scenarios[i].end());
                    double reference = dense.scenario_probability(per_line);
                    p.kv("oracle" + tag, reference);
                    p.kv("abs_diff" + tag, std::abs(results[i] - reference));
                }
            }
            p.kv("predicted_cc", engine.plan().predicted_cc);
            return 0;
        }

        if (oneway->parsed()) {
            auto in = detail::open_file(graph_path);
            SimpleGraph g = as_simple_graph(read_pace(in));
            auto pin = detail::open_file(program_path);
            OneWayProgram program = parse_program(pin);
            program.oblivious = oblivious_flag;
            if (oblivious_flag) {
                double p0 = full_flag ? simulate_oneway_full_oblivious(g, program, strategy, budget_rank)
                                      : simulate_oneway_oblivious(g, program, strategy, budget_rank);
                p.kv("p_final_0", p0);
                return 0;
            }
            OneWayRun run;
            if (full_flag) {
                auto res = simulate_oneway_full(g, program, seed, strategy, budget_rank);
                p.kv("expanded_vertices", static_cast<int>(res.expansion.expanded.vertex_count()));
                p.kv("prefix_measurements", static_cast<int>(res.prefix_length));
                run = res.run;
            } else {
                run = simulate_oneway_randomized(g, program, seed, strategy, budget_rank);
            }
            std::string bits;
            for (int b : run.outcomes) bits.push_back(b ? '1' : '0');
            p.kv("outcomes", bits);
            p.kv("probability", run.transcript.empty() ? 1.0 : run.transcript.back().running_probability);
            return 0;
        }
    } catch (const budget_error& e) {
        err << "budget error: " << e.what() << '\n';
        return 2;
    } catch (const input_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const verification_error& e) {
        err << "verification failure: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace twsim::cli
