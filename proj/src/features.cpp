#include "pdtsp/features.hpp"

#include <algorithm>

namespace pdtsp {

void EpisodeHistory::record(int kind_index, double improvement, bool improved_best, double gap) {
    last_improvement = improvement;
    gap_to_best = gap;
    if (improved_best)
        steps_since_improvement = 0;
    else
        ++steps_since_improvement;
    recent.push_front({kind_index, improvement});
    while (static_cast<int>(recent.size()) > history_len) recent.pop_back();
}

StateFeatures extract_features(const Tour& tour, const Instance& instance,
                               const EpisodeHistory& history) {
    const int m = instance.node_count();
    const int len = tour.length();
    StateFeatures s;
    s.node_count = m;
    s.node_matrix.assign(static_cast<std::size_t>(m) * kNodeFeatureCount, 0.0);

    auto coord_x = [&](NodeId v) { return instance.has_coords() ? instance.coord(v).x : 0.0; };
    auto coord_y = [&](NodeId v) { return instance.has_coords() ? instance.coord(v).y : 0.0; };

    for (NodeId v = 0; v < m; ++v) {
        NodeId pred, succ;
        double position;
        if (v == 0) {
            pred = tour.at(len);
            succ = tour.at(1);
            position = 0.0;
        } else {
            int p = tour.pos(v);
            pred = p == 1 ? 0 : tour.at(p - 1);
            succ = p == len ? 0 : tour.at(p + 1);
            position = static_cast<double>(p) / len;
        }
        double* row = s.node_matrix.data() + static_cast<std::size_t>(v) * kNodeFeatureCount;
        row[0] = coord_x(v);
        row[1] = coord_y(v);
        row[2] = v == 0 ? 1.0 : 0.0;
        row[3] = instance.is_pickup(v) ? 1.0 : 0.0;
        row[4] = instance.is_delivery(v) ? 1.0 : 0.0;
        row[5] = coord_x(pred);
        row[6] = coord_y(pred);
        row[7] = coord_x(succ);
        row[8] = coord_y(succ);
        row[9] = instance.cost(pred, v);
        row[10] = instance.cost(v, succ);
        row[11] = position;
    }

    s.operator_vector.assign(static_cast<std::size_t>(2 * history.history_len + 3), 0.0);
    s.operator_vector[0] = history.last_improvement;
    s.operator_vector[1] = history.gap_to_best;
    s.operator_vector[2] = static_cast<double>(history.steps_since_improvement) /
                           std::max(1, history.episode_length);
    for (int h = 0; h < history.history_len; ++h) {
        if (h >= static_cast<int>(history.recent.size())) break;
        s.operator_vector[static_cast<std::size_t>(3 + 2 * h)] =
            history.recent[static_cast<std::size_t>(h)].kind_index / 5.0;
        s.operator_vector[static_cast<std::size_t>(3 + 2 * h + 1)] =
            history.recent[static_cast<std::size_t>(h)].improvement;
    }
    return s;
}

}  // namespace pdtsp
