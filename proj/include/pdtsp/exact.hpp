#pragma once

#include <cstdint>

#include "pdtsp/instance.hpp"
#include "pdtsp/tour.hpp"

namespace pdtsp {

struct ExactResult {
    Tour optimal_tour;
    double optimal_cost = 0.0;
    std::uint64_t tours_examined = 0;  // equals count_feasible(n) for any usable cap
};

// Scores every feasible tour and returns the optimum; ties go to the
// lexicographically smallest sequence. Throws TooLarge above the cap.
ExactResult brute_force(const Instance& instance, int cap = kDefaultEnumerationCap);

}  // namespace pdtsp
