#include "pdtsp/exact.hpp"

namespace pdtsp {

ExactResult brute_force(const Instance& instance, int cap) {
    ExactResult result;
    bool first = true;
    for_each_feasible(
        instance.n(),
        [&](const Tour& t) {
            ++result.tours_examined;
            double c = tour_cost(t, instance);
            if (first || c < result.optimal_cost ||
                (c == result.optimal_cost && t.seq() < result.optimal_tour.seq())) {
                result.optimal_tour = t;
                result.optimal_cost = c;
                first = false;
            }
        },
        cap);
    return result;
}

}  // namespace pdtsp
