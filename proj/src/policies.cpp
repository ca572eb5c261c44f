#include "pdtsp/policies.hpp"

#include <algorithm>

#include "pdtsp/errors.hpp"
#include "pdtsp/rng.hpp"

namespace pdtsp {

namespace {

constexpr double kImproveTol = 1e-12;

struct MethodEntry {
    Method method;
    const char* name;
};

constexpr MethodEntry kMethods[] = {
    {Method::L2T, "l2t"},       {Method::Greedy, "greedy"},   {Method::Random, "random"},
    {Method::Naive, "naive"},   {Method::N1Only, "n1"},       {Method::N2Only, "n2"},
    {Method::N3Only, "n3"},     {Method::B1Only, "b1"},       {Method::B2Only, "b2"},
    {Method::InsertionOnly, "insertion"}, {Method::Exact, "exact"},
};

std::optional<OperatorKind> single_kind(Method method) {
    switch (method) {
        case Method::N1Only: return OperatorKind::N1;
        case Method::N2Only: return OperatorKind::N2;
        case Method::N3Only: return OperatorKind::N3;
        case Method::B1Only: return OperatorKind::B1;
        case Method::B2Only: return OperatorKind::B2;
        default: return std::nullopt;
    }
}

constexpr OperatorKind kAllKinds[kPolicyKindCount] = {
    OperatorKind::N1, OperatorKind::N2, OperatorKind::N3, OperatorKind::B1, OperatorKind::B2};

}  // namespace

std::optional<Method> parse_method(const std::string& name) {
    for (const auto& entry : kMethods) {
        if (name == entry.name) return entry.method;
    }
    return std::nullopt;
}

const char* method_name(Method method) {
    for (const auto& entry : kMethods) {
        if (entry.method == method) return entry.name;
    }
    return "?";
}

std::vector<std::string> method_names() {
    std::vector<std::string> names;
    for (const auto& entry : kMethods) names.emplace_back(entry.name);
    return names;
}

SearchReport run_baseline(const Instance& instance, Method method, const BaselineConfig& config,
                          const TraceSink& trace) {
    if (method == Method::L2T || method == Method::Exact)
        throw InvalidConfig("run_baseline handles search baselines only");
    if (config.episodes < 1) throw InvalidConfig("baseline needs at least one episode");

    const int n = instance.n();
    const int steps = config.episode_steps(n);
    SearchReport report;
    bool have_best = false;

    for (int ep = 0; ep < config.episodes; ++ep) {
        Rng rng = Rng::substream(config.seed, 0xba5e, static_cast<std::uint64_t>(ep));
        std::vector<NodeId> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
        rng.shuffle(order);
        Tour tour = canonical_initial(n, order);
        double cost = tour_cost(tour, instance);
        ++report.episodes_run;
        if (!have_best || cost < report.best_cost) {
            report.best_cost = cost;
            report.best_tour = tour;
            have_best = true;
        }

        for (int step = 0; step < steps; ++step) {
            std::optional<Move> chosen;
            double reward = 0.0;

            switch (method) {
                case Method::Greedy: {
                    // Best improving candidate across the whole operator set.
                    double best_reward = kImproveTol;
                    for (OperatorKind kind : kAllKinds) {
                        auto mv = sample_best_move(tour, kind, instance, config.k_candidates, rng);
                        if (!mv) continue;
                        double r = move_reward(tour, *mv, instance);
                        if (r > best_reward) {
                            best_reward = r;
                            chosen = mv;
                        }
                    }
                    break;
                }
                case Method::Random: {
                    OperatorKind kind = kAllKinds[rng.below(kPolicyKindCount)];
                    chosen = sample_best_move(tour, kind, instance, config.k_candidates, rng);
                    break;
                }
                case Method::Naive: {
                    int a = rng.range(1, 2 * n);
                    int b = rng.range(1, 2 * n - 1);
                    if (b >= a) ++b;
                    Move mv = Move::naive(a, b);
                    NaiveOutcome outcome = apply_naive(tour, mv, instance);
                    ++report.steps_done;
                    if (!outcome.feasible) {
                        ++report.rejections;
                        continue;
                    }
                    tour = unchecked_tour(std::move(outcome.seq), n);
                    cost -= *outcome.reward;
                    if (trace) trace(move_to_text(mv));
                    if (cost < report.best_cost - kImproveTol) {
                        report.best_cost = cost;
                        report.best_tour = tour;
                    }
                    continue;
                }
                case Method::InsertionOnly: {
                    // Random pair, best of k uniformly drawn target slots.
                    NodeId pickup = rng.range(1, n);
                    int draws = config.k_candidates > 0 ? config.k_candidates : n * (2 * n - 1);
                    double best_reward = 0.0;
                    for (int t = 0; t < draws; ++t) {
                        int p = rng.range(1, 2 * n);
                        int d = rng.range(1, 2 * n - 1);
                        if (d >= p) ++d;
                        if (p > d) std::swap(p, d);
                        Move mv = Move::insertion(pickup, p, d);
                        double r = move_reward(tour, mv, instance);
                        if (!chosen || r > best_reward) {
                            best_reward = r;
                            chosen = mv;
                        }
                    }
                    break;
                }
                default: {
                    chosen = sample_best_move(tour, *single_kind(method), instance,
                                              config.k_candidates, rng);
                    break;
                }
            }

            if (!chosen) {
                ++report.steps_done;
                ++report.no_ops;
                if (method == Method::Greedy) break;  // local optimum
                continue;
            }
            auto applied = apply_move(tour, *chosen, instance);
            tour = std::move(applied.first);
            reward = applied.second;
            cost -= reward;
            ++report.steps_done;
            if (trace) trace(move_to_text(*chosen));
            if (cost < report.best_cost - kImproveTol) {
                report.best_cost = cost;
                report.best_tour = tour;
            }
        }
    }
    return report;
}

}  // namespace pdtsp
