#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdtsp/features.hpp"
#include "pdtsp/instance.hpp"
#include "pdtsp/net.hpp"
#include "pdtsp/operators.hpp"
#include "pdtsp/rng.hpp"

namespace pdtsp {

struct TrainConfig {
    int max_episodes = 2000;   // W
    int steps_per_episode = -1;  // M; negative selects 50*n
    double eps_conv = 1e-8;
    int patience = 20;         // consecutive converged episodes before stopping
    double gamma = 0.99;
    double clip = 0.2;
    double lr = 3e-4;
    int batch = 64;            // minibatch size K
    int update_epochs = 4;
    int k_candidates = 32;     // within-kind best-of-k resolution
    int history = 4;           // H
    int width = 256;
    bool normalize_advantages = true;
    std::uint64_t seed = 0;

    int episode_steps(int n) const { return steps_per_episode >= 0 ? steps_per_episode : 50 * n; }
    void validate() const;
};

struct Transition {
    StateFeatures s;
    int action = 0;  // operator kind index 0..4
    double reward = 0.0;
    StateFeatures s_next;
    double logp_old = 0.0;
    bool done = false;
};

struct EpisodeResult {
    std::vector<Transition> transitions;
    Tour best_tour;
    double best_cost = 0.0;
};

struct PpoStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double approx_kl = 0.0;
};

struct TrainReport {
    Tour best_tour;
    double best_cost = 0.0;
    std::vector<double> cost_curve;  // best-so-far per episode, non-increasing
    int episodes_run = 0;
    bool converged = false;
};

// One episode: canonical initial tour from an rng-shuffled pickup order, M
// policy steps where the sampled kind is resolved by sample_best_move. A kind
// with no applicable move leaves the state unchanged with reward 0. on_state,
// when set, sees the initial tour and every tour after an applied move
// (debug audit hook).
EpisodeResult run_episode(const Instance& instance, const ActorCritic& net,
                          const TrainConfig& config, Rng& rng,
                          const std::function<void(const Tour&)>& on_state = {});

// One-step advantages r + gamma*V(s')*(1-done) - V(s); when normalize is set,
// shifted/scaled to mean 0 and unit std (std guarded below at 1e-8).
std::vector<double> one_step_advantages(const ActorCritic& net,
                                        const std::vector<Transition>& buffer, double gamma,
                                        bool normalize);

// Clipped-surrogate policy update plus value regression on r + gamma*V(s').
// One-step advantages use the parameters as of entry and are normalized per
// batch (guarded std). Plain gradient descent.
PpoStats ppo_update(ActorCritic& net, const std::vector<Transition>& buffer,
                    const TrainConfig& config, Rng& rng);

// Algorithm: loop episodes, on-policy update after each, track the best-so-far
// cost curve and stop once |C_{w+1} - C_w| < eps_conv holds for `patience`
// consecutive episodes. Deterministic for a fixed (instance, config, seed).
TrainReport train(const Instance& instance, const TrainConfig& config);

// Variant that exposes the trained network, e.g. for checkpointing.
TrainReport train_with_net(const Instance& instance, const TrainConfig& config, ActorCritic& net);

std::string train_report_json(const TrainReport& report);
std::string cost_curve_csv(const TrainReport& report);

}  // namespace pdtsp
