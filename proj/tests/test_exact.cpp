#include <algorithm>

#include "doctest.h"
#include "pdtsp/exact.hpp"
#include "pdtsp/instance.hpp"
#include "pdtsp/tour.hpp"

using namespace pdtsp;

TEST_CASE("brute force on the single-pair instance") {
    Instance inst = generate_random(1, 8);
    ExactResult r = brute_force(inst);
    CHECK(r.tours_examined == 1);
    CHECK(r.optimal_tour.seq() == std::vector<NodeId>{1, 2});
    CHECK(r.optimal_cost ==
          doctest::Approx(inst.cost(0, 1) + inst.cost(1, 2) + inst.cost(2, 0)).epsilon(1e-12));
}

TEST_CASE("brute force scans all six n=2 tours") {
    Instance inst(2, std::vector<Point>{{0, 0}, {1, 0}, {2, 0}, {1, 1}, {2, 1}});
    ExactResult r = brute_force(inst);
    CHECK(r.tours_examined == 6);

    // Independent scan over the enumerated tours.
    double best = 1e100;
    std::vector<NodeId> best_seq;
    for (const Tour& t : enumerate_feasible(2)) {
        double c = tour_cost(t, inst);
        if (c < best - 1e-12 || (std::abs(c - best) <= 1e-12 && t.seq() < best_seq)) {
            best = c;
            best_seq = t.seq();
        }
    }
    CHECK(r.optimal_cost == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.optimal_tour.seq() == best_seq);
}

TEST_CASE("tours_examined follows the closed-form count") {
    CHECK(brute_force(generate_random(4, 2)).tours_examined == 2520);
    CHECK(brute_force(generate_random(5, 2)).tours_examined == 113400);
}

TEST_CASE("optimum bounds the canonical construction") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Instance inst = generate_random(3, seed);
        ExactResult r = brute_force(inst);
        Tour canonical = canonical_initial(3, {1, 2, 3});
        CHECK(r.optimal_cost <= tour_cost(canonical, inst) + 1e-9);
        for (const Tour& t : enumerate_feasible(3))
            CHECK(r.optimal_cost <= tour_cost(t, inst) + 1e-9);
    }
}

TEST_CASE("optimum is invariant under uniform scaling") {
    Instance inst = generate_random(3, 77);
    Instance scaled = inst.scaled(2.7);
    ExactResult a = brute_force(inst);
    ExactResult b = brute_force(scaled);
    CHECK(a.optimal_tour.seq() == b.optimal_tour.seq());
    CHECK(b.optimal_cost == doctest::Approx(2.7 * a.optimal_cost).epsilon(1e-9));
}

TEST_CASE("cap is enforced and overridable") {
    Instance inst = generate_random(7, 1);
    CHECK_THROWS_AS(brute_force(inst), TooLarge);
    Instance inst4 = generate_random(4, 1);
    CHECK_THROWS_AS(brute_force(inst4, 3), TooLarge);
}
