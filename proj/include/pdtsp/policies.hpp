#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdtsp/instance.hpp"
#include "pdtsp/operators.hpp"
#include "pdtsp/tour.hpp"

namespace pdtsp {

// Solve methods surfaced by the CLI. l2t is the trained policy; greedy,
// random, naive, the single-operator entries and insertion are the search
// baselines; exact is the brute-force oracle.
enum class Method {
    L2T,
    Greedy,
    Random,
    Naive,
    N1Only,
    N2Only,
    N3Only,
    B1Only,
    B2Only,
    InsertionOnly,
    Exact,
};

std::optional<Method> parse_method(const std::string& name);
const char* method_name(Method method);
std::vector<std::string> method_names();

struct BaselineConfig {
    int episodes = 1;           // fresh canonical restart per episode
    int steps_per_episode = -1;  // negative selects 50*n
    int k_candidates = 32;      // 0 means exhaustive
    std::uint64_t seed = 0;

    int episode_steps(int n) const { return steps_per_episode >= 0 ? steps_per_episode : 50 * n; }
};

struct SearchReport {
    Tour best_tour;
    double best_cost = 0.0;
    long steps_done = 0;
    long no_ops = 0;
    long rejections = 0;  // naive only: infeasible proposals discarded
    int episodes_run = 0;
};

using TraceSink = std::function<void(const std::string&)>;

// Runs a non-learned baseline. Kinds are accepted even when they worsen the
// tour (the walk records the best visited state); greedy instead stops at the
// first step with no improving candidate.
SearchReport run_baseline(const Instance& instance, Method method, const BaselineConfig& config,
                          const TraceSink& trace = {});

}  // namespace pdtsp
