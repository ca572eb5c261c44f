#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pdtsp/features.hpp"
#include "pdtsp/rng.hpp"

namespace pdtsp {

// Compact actor-critic over the five operator kinds.
//
// Per-node encoder (two affine+ReLU layers applied identically to every node
// row) -> mean pooling -> concatenation with the operator vector -> two
// affine+ReLU trunk layers -> a 5-logit policy head and a scalar value head.
// Parameters live in one flat buffer so finite-difference probes, plain
// gradient descent and checkpointing all operate on a single array.
//
// Initialization: encoder/trunk weights and biases uniform in
// [-1/sqrt(fan_in), +1/sqrt(fan_in)]; both heads start at zero, so a fresh
// net outputs the uniform policy and value 0.
class ActorCritic {
public:
    struct Forward {
        std::array<double, 5> probs{};
        double value = 0.0;
    };

    // Full activation record for one state, consumed by backward().
    struct Cache {
        int rows = 0;
        std::vector<double> node_z1, node_a1, node_z2, node_a2;  // rows x width
        std::vector<double> pooled;                              // width
        std::vector<double> trunk_in;                            // width + opvec
        std::vector<double> z3, a3, z4, a4;                      // width
        std::array<double, 5> probs{};
        double value = 0.0;
    };

    ActorCritic(int width, int history_len, Rng& rng);

    int width() const { return width_; }
    int history_len() const { return history_len_; }
    int operator_vector_size() const { return 2 * history_len_ + 3; }

    std::size_t param_count() const { return params_.size(); }
    const std::vector<double>& params() const { return params_; }
    void set_params(const std::vector<double>& p);

    Forward forward(const StateFeatures& s) const;
    Forward forward_cached(const StateFeatures& s, Cache& cache) const;

    // Accumulates d(loss)/d(params) into grad given upstream gradients with
    // respect to the policy logits and the value output.
    void backward(const StateFeatures& s, const Cache& cache,
                  const std::array<double, 5>& dlogits, double dvalue,
                  std::vector<double>& grad) const;

    // Gradient of log pi(action | s); independent-oracle hook for tests.
    std::vector<double> grad_logp(const StateFeatures& s, int action) const;
    // Gradient of V(s).
    std::vector<double> grad_value(const StateFeatures& s) const;

    void sgd_step(const std::vector<double>& grad, double lr);

    // Versioned binary checkpoint: header, dimensions, then the flat
    // parameter array as little-endian 64-bit floats.
    void save(const std::string& path) const;
    static ActorCritic load(const std::string& path);

private:
    struct Layer {
        int in = 0;
        int out = 0;
        std::size_t w_off = 0;
        std::size_t b_off = 0;
    };

    ActorCritic(int width, int history_len);  // uninitialized params

    void build_layout();
    void affine(const Layer& l, const double* x, double* y) const;
    void affine_backward(const Layer& l, const double* x, const double* dy, double* dx,
                         std::vector<double>& grad) const;

    int width_;
    int history_len_;
    Layer enc1_, enc2_, trunk1_, trunk2_, policy_, value_;
    std::vector<double> params_;
};

}  // namespace pdtsp
