#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdtsp/exact.hpp"
#include "pdtsp/instance.hpp"
#include "pdtsp/learn.hpp"
#include "pdtsp/policies.hpp"
#include "pdtsp/verify.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;

struct SolveFlags {
    std::uint64_t seed = 0;
    int episodes = 0;  // 0 selects the per-method default
    int steps = 0;
    int width = 256;
    int history = 4;
    int candidates = 32;
    int restarts = 20;
    double eps_conv = 1e-8;
    int cap = pdtsp::kDefaultEnumerationCap;
    std::string out_path;
    std::string trace_path;
    std::string save_model;
    std::string curve_path;
};

pdtsp::Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pdtsp::Error("cannot open instance file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return pdtsp::parse_instance(buf.str());
}

std::string join_extra(const std::map<std::string, std::string>& extra) {
    std::string out;
    for (const auto& [k, v] : extra) {
        if (!out.empty()) out += ';';
        out += k + "=" + v;
    }
    return out;
}

struct SolveResult {
    double cost = 0.0;
    std::vector<pdtsp::NodeId> seq;
    std::map<std::string, std::string> extra;
};

SolveResult dispatch_solve(const pdtsp::Instance& instance, pdtsp::Method method,
                           const SolveFlags& flags, const pdtsp::TraceSink& trace) {
    SolveResult result;
    switch (method) {
        case pdtsp::Method::Exact: {
            pdtsp::ExactResult exact = pdtsp::brute_force(instance, flags.cap);
            result.cost = exact.optimal_cost;
            result.seq = exact.optimal_tour.seq();
            result.extra["examined"] = std::to_string(exact.tours_examined);
            return result;
        }
        case pdtsp::Method::L2T: {
            pdtsp::TrainConfig config;
            config.max_episodes = flags.episodes > 0 ? flags.episodes : 2000;
            config.steps_per_episode = flags.steps > 0 ? flags.steps : -1;
            config.width = flags.width;
            config.history = flags.history;
            config.k_candidates = flags.candidates;
            config.eps_conv = flags.eps_conv;
            config.seed = flags.seed;
            pdtsp::Rng init_rng = pdtsp::Rng::substream(config.seed, 1, 0);
            pdtsp::ActorCritic net(config.width, config.history, init_rng);
            pdtsp::TrainReport report = pdtsp::train_with_net(instance, config, net);
            if (!flags.save_model.empty()) net.save(flags.save_model);
            if (!flags.curve_path.empty()) {
                std::ofstream curve(flags.curve_path);
                curve << pdtsp::cost_curve_csv(report);
            }
            result.cost = report.best_cost;
            result.seq = report.best_tour.seq();
            result.extra["episodes"] = std::to_string(report.episodes_run);
            result.extra["converged"] = report.converged ? "1" : "0";
            if (trace) trace(pdtsp::tour_to_text(report.best_tour));
            return result;
        }
        default: {
            pdtsp::BaselineConfig config;
            config.episodes = flags.episodes > 0
                                  ? flags.episodes
                                  : (method == pdtsp::Method::Greedy ? flags.restarts : 50);
            config.steps_per_episode = flags.steps > 0 ? flags.steps : -1;
            config.k_candidates = flags.candidates;
            config.seed = flags.seed;
            pdtsp::SearchReport report = pdtsp::run_baseline(instance, method, config, trace);
            result.cost = report.best_cost;
            result.seq = report.best_tour.seq();
            result.extra["episodes"] = std::to_string(report.episodes_run);
            result.extra["steps"] = std::to_string(report.steps_done);
            if (method == pdtsp::Method::Naive)
                result.extra["rejections"] = std::to_string(report.rejections);
            return result;
        }
    }
}

int cmd_generate(int n, std::uint64_t seed, const std::string& out_path, bool force) {
    if (!force && std::filesystem::exists(out_path)) {
        std::cerr << "refusing to overwrite " << out_path << " (use --force)\n";
        return kExitUsage;
    }
    pdtsp::Instance instance = pdtsp::generate_random(n, seed);
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return kExitUsage;
    }
    out << pdtsp::serialize_instance(instance);
    return kExitOk;
}

int cmd_solve(const std::string& instance_path, const std::string& method_name,
              const SolveFlags& flags) {
    auto method = pdtsp::parse_method(method_name);
    if (!method) {
        std::cerr << "unknown method: " << method_name << "\n";
        return kExitUsage;
    }
    pdtsp::Instance instance = load_instance(instance_path);

    std::ofstream trace_file;
    pdtsp::TraceSink trace;
    if (!flags.trace_path.empty()) {
        trace_file.open(flags.trace_path);
        trace = [&trace_file](const std::string& line) { trace_file << line << '\n'; };
    }

    auto t0 = std::chrono::steady_clock::now();
    SolveResult result = dispatch_solve(instance, *method, flags, trace);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json record;
    record["method"] = method_name;
    record["instance"] = instance_path;
    record["n"] = instance.n();
    record["cost"] = result.cost;
    record["seconds"] = seconds;
    record["seed"] = flags.seed;
    record["seq"] = result.seq;
    json extra = json::object();
    for (const auto& [k, v] : result.extra) extra[k] = v;
    record["extra"] = extra;

    std::string text = record.dump();
    std::cout << text << "\n";
    if (!flags.out_path.empty()) {
        std::ofstream out(flags.out_path);
        out << text << "\n";
    }
    return kExitOk;
}

int cmd_bench(const std::vector<std::string>& instance_paths, const std::string& methods_csv,
              const std::string& out_path, const SolveFlags& flags, bool no_timing) {
    std::vector<std::string> methods;
    std::stringstream ss(methods_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (!pdtsp::parse_method(item)) {
            std::cerr << "unknown method: " << item << "\n";
            return kExitUsage;
        }
        methods.push_back(item);
    }

    struct Row {
        std::string instance;
        std::string method;
        int n = 0;
        std::string cost;
        double seconds = 0.0;
        std::string extra;
    };
    std::vector<Row> rows;

    std::vector<std::string> sorted_paths = instance_paths;
    std::sort(sorted_paths.begin(), sorted_paths.end());
    std::sort(methods.begin(), methods.end());
    for (const auto& path : sorted_paths) {
        for (const auto& method_name : methods) {
            Row row;
            row.instance = path;
            row.method = method_name;
            try {
                pdtsp::Instance instance = load_instance(path);
                row.n = instance.n();
                auto t0 = std::chrono::steady_clock::now();
                SolveResult result =
                    dispatch_solve(instance, *pdtsp::parse_method(method_name), flags, {});
                row.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.12g", result.cost);
                row.cost = buf;
                auto extra = result.extra;
                extra["status"] = "ok";
                row.extra = join_extra(extra);
            } catch (const std::exception& e) {
                // Partial failure: keep the row, keep going.
                row.extra = "status=error:" + std::string(e.what());
            }
            rows.push_back(std::move(row));
        }
    }

    std::ostringstream csv;
    csv << "method,instance,n,cost,seconds,seed,extra\n";
    for (const auto& row : rows) {
        char secs[32];
        std::snprintf(secs, sizeof(secs), "%.6f", no_timing ? 0.0 : row.seconds);
        csv << row.method << ',' << row.instance << ',' << row.n << ',' << row.cost << ',' << secs
            << ',' << flags.seed << ',' << row.extra << '\n';
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        out << csv.str();
    }
    return kExitOk;
}

int cmd_verify(const std::string& level, std::uint64_t seed) {
    pdtsp::VerifyOptions options;
    options.full = level == "full";
    options.seed = seed;
    pdtsp::VerifyReport report = pdtsp::run_verification(options);
    std::cout << pdtsp::format_report(report);
    return report.ok() ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pickup-and-delivery TSP solver"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file with key=value lines");

    SolveFlags flags;

    auto* generate = app.add_subcommand("generate", "Generate a random instance");
    int gen_n = 5;
    std::string gen_out = "instance.pdtsp";
    bool gen_force = false;
    generate->add_option("-n,--pairs", gen_n, "Number of pickup/delivery pairs");
    generate->add_option("--seed", flags.seed, "Random seed");
    generate->add_option("-o,--out", gen_out, "Output path");
    generate->add_flag("--force", gen_force, "Overwrite an existing file");

    auto* solve = app.add_subcommand("solve", "Solve one instance");
    std::string solve_instance;
    std::string solve_method = "greedy";
    solve->add_option("instance", solve_instance, "Instance file")->required();
    solve->add_option("-m,--method", solve_method, "Solve method");
    solve->add_option("--seed", flags.seed, "Random seed");
    solve->add_option("--episodes", flags.episodes, "Episodes (0 = method default)");
    solve->add_option("--steps", flags.steps, "Steps per episode (0 = 50n)");
    solve->add_option("--width", flags.width, "Network width");
    solve->add_option("--history", flags.history, "Operator history length");
    solve->add_option("--candidates", flags.candidates, "Best-of-k candidates (0 = exhaustive)");
    solve->add_option("--restarts", flags.restarts, "Greedy restarts");
    solve->add_option("--eps-conv", flags.eps_conv, "Convergence tolerance");
    solve->add_option("--cap", flags.cap, "Enumeration cap for exact solving");
    solve->add_option("--out", flags.out_path, "Write the result JSON here too");
    solve->add_option("--trace", flags.trace_path, "Write applied moves to this file");
    solve->add_option("--save-model", flags.save_model, "Checkpoint path (l2t only)");
    solve->add_option("--curve", flags.curve_path, "Cost-curve CSV path (l2t only)");

    auto* bench = app.add_subcommand("bench", "Run a method/instance grid, emit CSV");
    std::vector<std::string> bench_instances;
    std::string bench_methods = "greedy,exact";
    std::string bench_out;
    bool bench_no_timing = false;
    bench->add_option("instances", bench_instances, "Instance files")->required();
    bench->add_option("--methods", bench_methods, "Comma-separated method list");
    bench->add_option("--out", bench_out, "Output CSV path (default stdout)");
    bench->add_option("--seed", flags.seed, "Random seed");
    bench->add_option("--episodes", flags.episodes, "Episodes (0 = method default)");
    bench->add_option("--steps", flags.steps, "Steps per episode (0 = 50n)");
    bench->add_option("--width", flags.width, "Network width");
    bench->add_option("--candidates", flags.candidates, "Best-of-k candidates");
    bench->add_option("--restarts", flags.restarts, "Greedy restarts");
    bench->add_option("--cap", flags.cap, "Enumeration cap for exact solving");
    bench->add_flag("--no-timing", bench_no_timing, "Zero the seconds column (byte-stable CSV)");

    auto* verify = app.add_subcommand("verify", "Run the property suites");
    std::string verify_level = "quick";
    verify->add_option("level", verify_level, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    verify->add_option("--seed", flags.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen_n, flags.seed, gen_out, gen_force);
        if (solve->parsed()) return cmd_solve(solve_instance, solve_method, flags);
        if (bench->parsed())
            return cmd_bench(bench_instances, bench_methods, bench_out, flags, bench_no_timing);
        if (verify->parsed()) return cmd_verify(verify_level, flags.seed);
    } catch (const pdtsp::InvalidSize& e) {
        std::cerr << "InvalidSize: " << e.what() << "\n";
        return kExitUsage;
    } catch (const pdtsp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFailure;
    }
    return kExitUsage;
}
