#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "doctest.h"
#include "pdtsp/instance.hpp"
#include "pdtsp/operators.hpp"
#include "pdtsp/tour.hpp"

using namespace pdtsp;

namespace {

const std::vector<NodeId> kToySeq = {1, 2, 3, 7, 8, 4, 5, 6, 9, 10};  // n = 5

Tour toy_tour() { return from_sequence(kToySeq, 5); }

Instance toy_instance() { return generate_random(5, 3); }

bool contains(const std::vector<Move>& moves, const Move& m) {
    return std::find(moves.begin(), moves.end(), m) != moves.end();
}

constexpr OperatorKind kAllKinds[] = {OperatorKind::N1, OperatorKind::N2, OperatorKind::N3,
                                      OperatorKind::B1, OperatorKind::B2};

}  // namespace

TEST_CASE("move factories reject ill-formed parameters") {
    CHECK_THROWS_AS(Move::n1(3, 3), MoveIllTyped);
    CHECK_THROWS_AS(Move::n2(5, 2), MoveIllTyped);
    CHECK_THROWS_AS(Move::n3(1, 1), MoveIllTyped);
    CHECK_THROWS_AS(Move::b1(1, 3, 3, 4), MoveIllTyped);
    CHECK_THROWS_AS(Move::b2(4, 5, 5, 6), MoveIllTyped);
    CHECK_THROWS_AS(Move::insertion(1, 3, 3), PositionClash);
    CHECK_THROWS_AS(Move::insertion(1, 4, 2), MoveIllTyped);
}

TEST_CASE("enumerate_moves on the toy tour") {
    Tour t = toy_tour();

    std::vector<Move> n1 = enumerate_moves(t, OperatorKind::N1);
    CHECK(contains(n1, Move::n1(2, 3)));  // swap nodes 2 and 3
    for (const Move& m : n1) {
        CHECK(t.is_pickup(t.at(m.a)) == t.is_pickup(t.at(m.b)));
    }

    std::vector<Move> n2 = enumerate_moves(t, OperatorKind::N2);
    CHECK(contains(n2, Move::n2(t.pos(7), t.pos(4))));
    for (const Move& m : n2) {
        CHECK(t.is_delivery(t.at(m.a)));
        CHECK(t.is_pickup(t.at(m.b)));
        CHECK(m.a < m.b);
    }

    CHECK(enumerate_moves(t, OperatorKind::N3).size() == 10);  // C(5,2)
}

TEST_CASE("single pair tour admits no moves") {
    Tour t = from_sequence({1, 2}, 1);
    for (OperatorKind kind : kAllKinds) CHECK(enumerate_moves(t, kind).empty());
}

TEST_CASE("N1 swap of nodes 2 and 3 matches the worked example") {
    Tour t = toy_tour();
    Instance inst = toy_instance();
    auto [next, reward] = apply_move(t, Move::n1(2, 3), inst);
    CHECK(next.seq() == std::vector<NodeId>{1, 3, 2, 7, 8, 4, 5, 6, 9, 10});
    double expected =
        (inst.cost(1, 2) + inst.cost(3, 7)) - (inst.cost(1, 3) + inst.cost(2, 7));
    CHECK(reward == doctest::Approx(expected).epsilon(1e-12));
    CHECK(reward ==
          doctest::Approx(tour_cost(t, inst) - tour_cost(next, inst)).epsilon(1e-9));
}

TEST_CASE("N3 pair swap matches the worked example edge set") {
    Tour t = toy_tour();
    Instance inst = toy_instance();
    auto [next, reward] = apply_move(t, Move::n3(1, 2), inst);
    CHECK(next.seq() == std::vector<NodeId>{2, 1, 3, 6, 8, 4, 5, 7, 9, 10});
    double removed = inst.cost(0, 1) + inst.cost(2, 3) + inst.cost(3, 7) + inst.cost(7, 8) +
                     inst.cost(5, 6) + inst.cost(6, 9);
    double added = inst.cost(0, 2) + inst.cost(1, 3) + inst.cost(3, 6) + inst.cost(6, 8) +
                   inst.cost(5, 7) + inst.cost(7, 9);
    CHECK(reward == doctest::Approx(removed - added).epsilon(1e-12));
    CHECK(reward ==
          doctest::Approx(tour_cost(t, inst) - tour_cost(next, inst)).epsilon(1e-9));
}

TEST_CASE("B2 block swap on the toy tour") {
    Tour t = toy_tour();
    Instance inst = toy_instance();
    // Delivery span {7,8} at positions 4..5, pickup span {4,5} at 6..7.
    auto [next, reward] = apply_move(t, Move::b2(4, 5, 6, 7), inst);
    CHECK(next.seq() == std::vector<NodeId>{1, 2, 3, 4, 5, 7, 8, 6, 9, 10});
    CHECK(is_feasible_sequence(next.seq(), 5));
    CHECK(reward ==
          doctest::Approx(tour_cost(t, inst) - tour_cost(next, inst)).epsilon(1e-9));
}

TEST_CASE("B1 swap within the trailing delivery run") {
    Tour t = toy_tour();
    Instance inst = toy_instance();
    // Swap sub-blocks {6,9} and {10} of the maximal block at positions 8..10.
    auto [next, reward] = apply_move(t, Move::b1(8, 9, 10, 10), inst);
    CHECK(next.seq() == std::vector<NodeId>{1, 2, 3, 7, 8, 4, 5, 10, 6, 9});
    // The reward is the full cost difference, interior junction edges included.
    CHECK(reward ==
          doctest::Approx(tour_cost(t, inst) - tour_cost(next, inst)).epsilon(1e-9));
}

TEST_CASE("apply_move validates against the tour") {
    Tour t = toy_tour();
    Instance inst = toy_instance();
    CHECK_THROWS_AS(apply_move(t, Move::n1(1, 11), inst), MoveOutOfRange);
    CHECK_THROWS_AS(apply_move(t, Move::n1(3, 4), inst), MoveIllTyped);   // P and D
    CHECK_THROWS_AS(apply_move(t, Move::n2(1, 4), inst), MoveIllTyped);   // pickup at a
    CHECK_THROWS_AS(apply_move(t, Move::n3(1, 6), inst), MoveOutOfRange); // 6 is a delivery id
    CHECK_THROWS_AS(apply_move(t, Move::b1(2, 3, 4, 5), inst), MoveIllTyped);  // spans cross types
    CHECK_THROWS_AS(apply_move(t, Move::b2(4, 5, 8, 9), inst), MoveIllTyped);  // second span not P
}

TEST_CASE("naive swaps") {
    Instance inst1 = generate_random(1, 5);
    Tour t1 = from_sequence({1, 2}, 1);
    NaiveOutcome bad = apply_naive(t1, Move::naive(1, 2), inst1);
    CHECK_FALSE(bad.feasible);
    CHECK_FALSE(bad.reward.has_value());

    Tour t = toy_tour();
    Instance inst = toy_instance();
    NaiveOutcome ok = apply_naive(t, Move::naive(t.pos(2), t.pos(3)), inst);
    CHECK(ok.feasible);
    auto [n1_next, n1_reward] = apply_move(t, Move::n1(t.pos(2), t.pos(3)), inst);
    CHECK(ok.seq == n1_next.seq());
    CHECK(*ok.reward == doctest::Approx(n1_reward).epsilon(1e-12));

    NaiveOutcome reversed = apply_naive(t, Move::naive(t.pos(1), t.pos(6)), inst);
    CHECK_FALSE(reversed.feasible);

    // The flag agrees with full validation on every possible swap, n <= 3.
    for (int n = 1; n <= 3; ++n) {
        Instance in = generate_random(n, 50 + static_cast<std::uint64_t>(n));
        for (const Tour& tour : enumerate_feasible(n)) {
            for (int a = 1; a < 2 * n; ++a)
                for (int b = a + 1; b <= 2 * n; ++b) {
                    NaiveOutcome out = apply_naive(tour, Move::naive(a, b), in);
                    CHECK(out.feasible == is_feasible_sequence(out.seq, n));
                }
        }
    }
}

TEST_CASE("insertion operator") {
    Tour t = toy_tour();
    Instance inst = toy_instance();

    // Reinsert pair (1,6) at its own positions: identity, reward 0.
    auto [same, zero] = apply_insertion(t, Move::insertion(1, 1, 8), inst);
    CHECK(same.seq() == kToySeq);
    CHECK(zero == doctest::Approx(0.0));

    // Move pair (1,6) out, reinsert at the toy positions: restores the tour.
    Tour elsewhere = from_sequence({2, 3, 1, 7, 8, 4, 5, 9, 6, 10}, 5);
    auto [restored, reward] = apply_insertion(elsewhere, Move::insertion(1, 1, 8), inst);
    CHECK(restored.seq() == kToySeq);
    CHECK(reward == doctest::Approx(tour_cost(elsewhere, inst) - tour_cost(restored, inst))
                        .epsilon(1e-9));

    // Validity fuzz: every insertion output is feasible.
    Instance inst8 = generate_random(8, 4);
    Rng rng(123);
    for (int i = 0; i < 1000; ++i) {
        Tour tour = random_tour(8, rng);
        int pickup = rng.range(1, 8);
        int p = rng.range(1, 16);
        int d = rng.range(1, 15);
        if (d >= p) ++d;
        if (p > d) std::swap(p, d);
        auto [next, r] = apply_insertion(tour, Move::insertion(pickup, p, d), inst8);
        CHECK(is_feasible_sequence(next.seq(), 8));
        CHECK(next.pos(pickup) == p);
        CHECK(next.pos(8 + pickup) == d);
        CHECK(r == doctest::Approx(tour_cost(tour, inst8) - tour_cost(next, inst8))
                       .epsilon(1e-9));
    }
}

TEST_CASE("feasibility preservation, exhaustive for n <= 3") {
    for (int n = 1; n <= 3; ++n) {
        Instance inst = generate_random(n, 60 + static_cast<std::uint64_t>(n));
        for (const Tour& t : enumerate_feasible(n)) {
            for (OperatorKind kind : kAllKinds) {
                for (const Move& m : enumerate_moves(t, kind)) {
                    auto [next, reward] = apply_move(t, m, inst);
                    (void)reward;
                    CHECK(is_feasible_sequence(next.seq(), n));
                    for (int p = 1; p <= next.length(); ++p)
                        CHECK(next.pos(next.at(p)) == p);
                }
            }
        }
    }
}

TEST_CASE("feasibility preservation, fuzzed for n in 4..15") {
    Rng rng(99);
    std::map<int, Instance> cache;
    for (OperatorKind kind : kAllKinds) {
        int done = 0;
        while (done < 2000) {
            int n = 4 + static_cast<int>(rng.below(12));
            auto it = cache.find(n);
            if (it == cache.end())
                it = cache.emplace(n, generate_random(n, static_cast<std::uint64_t>(n))).first;
            Tour t = random_tour(n, rng);
            std::vector<Move> moves = enumerate_moves(t, kind);
            if (moves.empty()) continue;
            auto [next, reward] = apply_move(t, moves[rng.below(moves.size())], it->second);
            (void)reward;
            CHECK(is_feasible_sequence(next.seq(), n));
            ++done;
        }
    }
}

TEST_CASE("incremental reward equals full recomputation") {
    Rng rng(31);
    std::map<int, Instance> cache;
    int done = 0;
    while (done < 2000) {
        int n = 2 + static_cast<int>(rng.below(11));
        auto it = cache.find(n);
        if (it == cache.end())
            it = cache.emplace(n, generate_random(n, 70 + static_cast<std::uint64_t>(n))).first;
        const Instance& inst = it->second;
        Tour t = random_tour(n, rng);

        OperatorKind kind = kAllKinds[rng.below(5)];
        std::optional<Move> mv;
        if (rng.below(8) == 0) {
            int pickup = rng.range(1, n);
            int p = rng.range(1, 2 * n);
            int d = rng.range(1, 2 * n - 1);
            if (d >= p) ++d;
            if (p > d) std::swap(p, d);
            mv = Move::insertion(pickup, p, d);
        } else {
            std::vector<Move> moves = enumerate_moves(t, kind);
            if (moves.empty()) continue;
            mv = moves[rng.below(moves.size())];
        }
        auto [next, reward] = apply_move(t, *mv, inst);
        double full = tour_cost(t, inst) - tour_cost(next, inst);
        CHECK(std::abs(reward - full) <= 1e-9);
        ++done;
    }
}

TEST_CASE("pickup-before-delivery pair count is monotone") {
    // N1/N3/B1 preserve the count, N2 and B2 strictly increase it. This is
    // the invariant behind the insertion-decomposition bound.
    Rng rng(41);
    for (int iter = 0; iter < 500; ++iter) {
        int n = 2 + static_cast<int>(rng.below(7));
        Tour t = random_tour(n, rng);
        int before = pd_order_count(t.seq(), n);
        OperatorKind kind = kAllKinds[rng.below(5)];
        std::vector<Move> moves = enumerate_moves(t, kind);
        if (moves.empty()) continue;
        Instance inst = generate_random(n, 80 + static_cast<std::uint64_t>(n));
        auto [next, reward] = apply_move(t, moves[rng.below(moves.size())], inst);
        (void)reward;
        int after = pd_order_count(next.seq(), n);
        if (kind == OperatorKind::N2 || kind == OperatorKind::B2)
            CHECK(after > before);
        else
            CHECK(after == before);
    }
}

TEST_CASE("involution of N1, N3 and equal-length B1") {
    Rng rng(43);
    for (int iter = 0; iter < 300; ++iter) {
        int n = 2 + static_cast<int>(rng.below(7));
        Instance inst = generate_random(n, 90 + static_cast<std::uint64_t>(n));
        Tour t = random_tour(n, rng);

        for (OperatorKind kind : {OperatorKind::N1, OperatorKind::N3}) {
            std::vector<Move> moves = enumerate_moves(t, kind);
            if (moves.empty()) continue;
            const Move& m = moves[rng.below(moves.size())];
            auto [mid, r1] = apply_move(t, m, inst);
            auto [back, r2] = apply_move(mid, m, inst);
            CHECK(back.seq() == t.seq());
            CHECK(r1 + r2 == doctest::Approx(0.0).epsilon(1e-9));
        }

        std::vector<Move> b1 = enumerate_moves(t, OperatorKind::B1);
        std::vector<Move> equal_len;
        for (const Move& m : b1)
            if (m.b - m.a == m.d - m.c) equal_len.push_back(m);
        if (!equal_len.empty()) {
            const Move& m = equal_len[rng.below(equal_len.size())];
            auto [mid, r1] = apply_move(t, m, inst);
            auto [back, r2] = apply_move(mid, m, inst);  // same spans after the swap
            CHECK(back.seq() == t.seq());
            CHECK(r1 + r2 == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("N2 position rule matches the block-level condition") {
    for (int n = 2; n <= 3; ++n) {
        for (const Tour& t : enumerate_feasible(n)) {
            std::vector<Block> blocks = maximal_blocks(t);
            auto block_of = [&](int pos) {
                std::size_t k = 0;
                while (blocks[k].end < pos) ++k;
                return k;
            };
            std::set<std::pair<int, int>> by_position;
            for (const Move& m : enumerate_moves(t, OperatorKind::N2))
                by_position.insert({m.a, m.b});
            std::set<std::pair<int, int>> by_block;
            for (int a = 1; a <= 2 * n; ++a) {
                if (!t.is_delivery(t.at(a))) continue;
                for (int b = 1; b <= 2 * n; ++b) {
                    if (!t.is_pickup(t.at(b))) continue;
                    if (block_of(a) < block_of(b)) by_block.insert({a, b});
                }
            }
            CHECK(by_position == by_block);
        }
    }
}

TEST_CASE("N1/N2/N3 closure from the canonical tour covers the tour space") {
    auto closure_size = [](int n) {
        std::vector<NodeId> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
        Instance inst = generate_random(n, 17);
        std::set<std::vector<NodeId>> seen;
        std::queue<Tour> frontier;
        Tour start = canonical_initial(n, order);
        seen.insert(start.seq());
        frontier.push(start);
        while (!frontier.empty()) {
            Tour cur = frontier.front();
            frontier.pop();
            for (OperatorKind kind :
                 {OperatorKind::N1, OperatorKind::N2, OperatorKind::N3}) {
                for (const Move& m : enumerate_moves(cur, kind)) {
                    auto [next, reward] = apply_move(cur, m, inst);
                    (void)reward;
                    if (seen.insert(next.seq()).second) frontier.push(next);
                }
            }
        }
        return seen.size();
    };
    CHECK(closure_size(2) == 6);
    CHECK(closure_size(3) == 90);
}

TEST_CASE("sample_best_move") {
    Instance inst = generate_random(2, 19);
    Tour t = canonical_initial(2, {1, 2});

    // k covering everything returns the true best move of the kind.
    for (OperatorKind kind : kAllKinds) {
        std::vector<Move> moves = enumerate_moves(t, kind);
        Rng rng(1);
        auto best = sample_best_move(t, kind, inst, 0, rng);
        if (moves.empty()) {
            CHECK_FALSE(best.has_value());
            continue;
        }
        double best_reward = -1e100;
        for (const Move& m : moves)
            best_reward = std::max(best_reward, move_reward(t, m, inst));
        CHECK(move_reward(t, *best, inst) == doctest::Approx(best_reward).epsilon(1e-12));
    }

    // Canonical interleaved tours have only size-1 blocks: no B1 moves.
    Rng rng(2);
    CHECK_FALSE(sample_best_move(t, OperatorKind::B1, inst, 8, rng).has_value());

    // Fixed seed, fixed choice.
    Instance inst8 = generate_random(8, 23);
    Rng r1(77), r2(77);
    Tour t8 = random_tour(8, r1);
    Tour t8b = random_tour(8, r2);
    auto m1 = sample_best_move(t8, OperatorKind::N2, inst8, 4, r1);
    auto m2 = sample_best_move(t8b, OperatorKind::N2, inst8, 4, r2);
    REQUIRE(m1.has_value());
    CHECK(*m1 == *m2);
}

TEST_CASE("move text round trip") {
    for (const Move& m : {Move::n1(2, 3), Move::n2(4, 6), Move::n3(1, 2),
                          Move::b1(8, 9, 10, 10), Move::b2(4, 5, 6, 7),
                          Move::insertion(1, 1, 8), Move::naive(2, 9)}) {
        CHECK(move_from_text(move_to_text(m)) == m);
    }
    CHECK(move_to_text(Move::n1(2, 3)) == "N1 2 3");
    CHECK(move_to_text(Move::b2(4, 5, 6, 7)) == "B2 4 5 6 7");
    CHECK(move_to_text(Move::insertion(1, 2, 8)) == "INS 1 2 8");
    CHECK_THROWS_AS(move_from_text("XX 1 2"), ParseError);
}
