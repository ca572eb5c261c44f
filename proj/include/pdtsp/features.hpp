#pragma once

#include <deque>
#include <vector>

#include "pdtsp/instance.hpp"
#include "pdtsp/tour.hpp"

namespace pdtsp {

inline constexpr int kNodeFeatureCount = 12;

struct OpRecord {
    int kind_index = 0;        // 0..4
    double improvement = 0.0;  // reward of that step
};

// Rolling operator-side context for one episode. `recent` is most recent
// first and capped at `history_len` entries.
struct EpisodeHistory {
    int history_len = 4;
    int episode_length = 1;
    double last_improvement = 0.0;
    double gap_to_best = 0.0;
    int steps_since_improvement = 0;
    std::deque<OpRecord> recent;

    void record(int kind_index, double improvement, bool improved_best, double gap);
};

// State presented to the policy.
//
// node_matrix is (2n+1) x 12 row-major, rows in node-id order 0..2n, layout:
//   [x, y, is_depot, is_pickup, is_delivery,
//    pred_x, pred_y, succ_x, succ_y, dist_to_pred, dist_to_succ, position/(2n)]
// Coordinates are zero for explicit-matrix instances; distances always come
// from the cost matrix. The depot row uses position 0, its predecessor is the
// last tour node and its successor the first.
//
// operator_vector has 2H+3 entries:
//   [last_step_improvement, cost_gap_to_best_known,
//    steps_since_improvement / episode_length]
//   followed by H blocks [kind_index/5, improvement], most recent first,
//   zero-padded before H steps exist.
struct StateFeatures {
    int node_count = 0;
    std::vector<double> node_matrix;
    std::vector<double> operator_vector;

    const double* node_row(int i) const { return node_matrix.data() + i * kNodeFeatureCount; }
    bool operator==(const StateFeatures&) const = default;
};

StateFeatures extract_features(const Tour& tour, const Instance& instance,
                               const EpisodeHistory& history);

}  // namespace pdtsp
