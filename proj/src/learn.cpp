#include "pdtsp/learn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdtsp/errors.hpp"

namespace pdtsp {

namespace {

constexpr OperatorKind kPolicyKinds[kPolicyKindCount] = {
    OperatorKind::N1, OperatorKind::N2, OperatorKind::N3, OperatorKind::B1, OperatorKind::B2};

constexpr double kImproveTol = 1e-12;

// Substream tags so episode, update and init draws never collide.
enum StreamTag : std::uint64_t { kInitStream = 1, kEpisodeStream = 2, kUpdateStream = 3 };

void append_json_double(std::string& out, double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    out += ss.str();
}

}  // namespace

void TrainConfig::validate() const {
    if (max_episodes < 1 || steps_per_episode < -1 || patience < 1 || batch < 1 ||
        update_epochs < 1 || k_candidates < 0 || history < 0 || width < 1)
        throw InvalidConfig("train configuration values must be positive");
    if (!(eps_conv > 0.0) || !(gamma > 0.0) || !(lr > 0.0) || !(clip > 0.0))
        throw InvalidConfig("eps_conv, gamma, lr and clip must be positive");
}

EpisodeResult run_episode(const Instance& instance, const ActorCritic& net,
                          const TrainConfig& config, Rng& rng,
                          const std::function<void(const Tour&)>& on_state) {
    const int n = instance.n();
    const int steps = config.episode_steps(n);

    std::vector<NodeId> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
    rng.shuffle(order);
    Tour tour = canonical_initial(n, order);
    if (on_state) on_state(tour);

    EpisodeResult result;
    result.best_tour = tour;
    result.best_cost = tour_cost(tour, instance);
    double current_cost = result.best_cost;

    EpisodeHistory history;
    history.history_len = config.history;
    history.episode_length = std::max(1, steps);

    StateFeatures s = extract_features(tour, instance, history);
    result.transitions.reserve(static_cast<std::size_t>(steps));
    for (int step = 0; step < steps; ++step) {
        ActorCritic::Forward fwd = net.forward(s);
        int action = rng.categorical({fwd.probs.begin(), fwd.probs.end()});
        double logp = std::log(std::max(fwd.probs[static_cast<std::size_t>(action)], 1e-300));

        Transition tr;
        tr.s = s;
        tr.action = action;
        tr.logp_old = logp;
        tr.done = step + 1 == steps;

        auto move = sample_best_move(tour, kPolicyKinds[action], instance, config.k_candidates,
                                     rng);
        if (move.has_value()) {
            auto [next_tour, reward] = apply_move(tour, *move, instance);
            tour = std::move(next_tour);
            if (on_state) on_state(tour);
            current_cost -= reward;
            bool improved_best = current_cost < result.best_cost - kImproveTol;
            if (improved_best) {
                result.best_cost = current_cost;
                result.best_tour = tour;
            }
            history.record(action, reward, improved_best, current_cost - result.best_cost);
            tr.reward = reward;
            tr.s_next = extract_features(tour, instance, history);
        } else {
            tr.reward = 0.0;
            tr.s_next = s;  // no applicable move: state unchanged
        }
        s = tr.s_next;
        result.transitions.push_back(std::move(tr));
    }
    return result;
}

std::vector<double> one_step_advantages(const ActorCritic& net,
                                        const std::vector<Transition>& buffer, double gamma,
                                        bool normalize) {
    std::vector<double> advantage(buffer.size());
    for (std::size_t i = 0; i < buffer.size(); ++i) {
        const Transition& t = buffer[i];
        double v_next = t.done ? 0.0 : net.forward(t.s_next).value;
        advantage[i] = t.reward + gamma * v_next - net.forward(t.s).value;
    }
    if (normalize && !advantage.empty()) {
        double mean = 0.0;
        for (double a : advantage) mean += a;
        mean /= static_cast<double>(advantage.size());
        double var = 0.0;
        for (double a : advantage) var += (a - mean) * (a - mean);
        double sd = std::sqrt(var / static_cast<double>(advantage.size()));
        double denom = std::max(sd, 1e-8);
        for (double& a : advantage) a = (a - mean) / denom;
    }
    return advantage;
}

PpoStats ppo_update(ActorCritic& net, const std::vector<Transition>& buffer,
                    const TrainConfig& config, Rng& rng) {
    if (buffer.empty()) throw EmptyBuffer("ppo_update needs a non-empty buffer");
    const std::size_t count = buffer.size();

    // Advantages and value targets use the parameters as of entry.
    std::vector<double> advantage =
        one_step_advantages(net, buffer, config.gamma, config.normalize_advantages);
    std::vector<double> target(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Transition& t = buffer[i];
        double v_next = t.done ? 0.0 : net.forward(t.s_next).value;
        target[i] = t.reward + config.gamma * v_next;
    }

    PpoStats stats;
    long samples_seen = 0;

    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    std::vector<double> grad(net.param_count(), 0.0);
    ActorCritic::Cache cache;

    for (int epoch = 0; epoch < config.update_epochs; ++epoch) {
        rng.shuffle(idx);
        for (std::size_t start = 0; start < count; start += static_cast<std::size_t>(config.batch)) {
            std::size_t end = std::min(count, start + static_cast<std::size_t>(config.batch));
            std::size_t m = end - start;
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t t = start; t < end; ++t) {
                const Transition& tr = buffer[idx[t]];
                double adv = advantage[idx[t]];
                net.forward_cached(tr.s, cache);
                double p = std::max(cache.probs[static_cast<std::size_t>(tr.action)], 1e-300);
                double logp_new = std::log(p);
                double ratio = std::exp(logp_new - tr.logp_old);
                double clipped = std::clamp(ratio, 1.0 - config.clip, 1.0 + config.clip);
                double u = ratio * adv;
                double c = clipped * adv;
                bool active = u <= c;  // gradient flows only through the unclipped branch
                stats.policy_loss += -std::min(u, c);
                stats.approx_kl += (ratio - 1.0) - (logp_new - tr.logp_old);

                std::array<double, 5> dlogits{};
                if (active) {
                    double coef = -adv * ratio / static_cast<double>(m);
                    for (int k = 0; k < 5; ++k)
                        dlogits[static_cast<std::size_t>(k)] =
                            coef * ((k == tr.action ? 1.0 : 0.0) -
                                    cache.probs[static_cast<std::size_t>(k)]);
                }
                double diff = cache.value - target[idx[t]];
                stats.value_loss += diff * diff;
                double dvalue = 2.0 * diff / static_cast<double>(m);
                net.backward(tr.s, cache, dlogits, dvalue, grad);
                ++samples_seen;
            }
            net.sgd_step(grad, config.lr);
        }
    }
    stats.policy_loss /= static_cast<double>(samples_seen);
    stats.value_loss /= static_cast<double>(samples_seen);
    stats.approx_kl /= static_cast<double>(samples_seen);
    return stats;
}

TrainReport train_with_net(const Instance& instance, const TrainConfig& config, ActorCritic& net) {
    config.validate();
    TrainReport report;
    int streak = 0;
    for (int w = 0; w < config.max_episodes; ++w) {
        Rng episode_rng = Rng::substream(config.seed, kEpisodeStream, static_cast<std::uint64_t>(w));
        EpisodeResult episode = run_episode(instance, net, config, episode_rng);
        if (w == 0 || episode.best_cost < report.best_cost - kImproveTol) {
            report.best_cost = episode.best_cost;
            report.best_tour = episode.best_tour;
        }
        report.cost_curve.push_back(report.best_cost);
        report.episodes_run = w + 1;

        Rng update_rng = Rng::substream(config.seed, kUpdateStream, static_cast<std::uint64_t>(w));
        ppo_update(net, episode.transitions, config, update_rng);
        // transitions go out of scope here: per-iteration on-policy storage

        if (w > 0) {
            double delta = std::abs(report.cost_curve[static_cast<std::size_t>(w)] -
                                    report.cost_curve[static_cast<std::size_t>(w - 1)]);
            streak = delta < config.eps_conv ? streak + 1 : 0;
            if (streak >= config.patience) {
                report.converged = true;
                break;
            }
        }
    }
    return report;
}

TrainReport train(const Instance& instance, const TrainConfig& config) {
    config.validate();
    Rng init_rng = Rng::substream(config.seed, kInitStream, 0);
    ActorCritic net(config.width, config.history, init_rng);
    return train_with_net(instance, config, net);
}

std::string train_report_json(const TrainReport& report) {
    std::string out = "{\"best_cost\":";
    append_json_double(out, report.best_cost);
    out += ",\"episodes_run\":" + std::to_string(report.episodes_run);
    out += ",\"converged\":";
    out += report.converged ? "true" : "false";
    out += ",\"best_seq\":[";
    for (std::size_t i = 0; i < report.best_tour.seq().size(); ++i) {
        if (i) out += ',';
        out += std::to_string(report.best_tour.seq()[i]);
    }
    out += "],\"cost_curve\":[";
    for (std::size_t i = 0; i < report.cost_curve.size(); ++i) {
        if (i) out += ',';
        append_json_double(out, report.cost_curve[i]);
    }
    out += "]}";
    return out;
}

std::string cost_curve_csv(const TrainReport& report) {
    std::string out = "episode,best_cost\n";
    for (std::size_t i = 0; i < report.cost_curve.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        append_json_double(out, report.cost_curve[i]);
        out += '\n';
    }
    return out;
}

}  // namespace pdtsp
