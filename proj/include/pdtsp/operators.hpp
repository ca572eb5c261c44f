#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdtsp/instance.hpp"
#include "pdtsp/rng.hpp"
#include "pdtsp/tour.hpp"

namespace pdtsp {

// N1, N2, N3, B1, B2 form the policy's action set; Naive and Insertion are
// auxiliary operators used by baselines.
enum class OperatorKind { N1, N2, N3, B1, B2, Naive, Insertion };

inline constexpr int kPolicyKindCount = 5;

const char* kind_name(OperatorKind kind);

// One parameterized operator application. Field meaning depends on kind:
//   N1        a, b   positions of two same-type nodes in one maximal block
//   N2        a, b   position of a delivery (a) and of a later pickup (b)
//   N3        a, b   pickup ids of two distinct pairs
//   B1        a..d   two disjoint same-type sub-spans [a,b], [c,d] in one block
//   B2        a..d   delivery sub-span [a,b] strictly before pickup sub-span [c,d]
//   Naive     a, b   any two positions
//   Insertion a=pickup id, b=target pickup position, c=target delivery position
// Structural constraints (orderings, distinctness) are enforced by the
// factories; tour-dependent conditions are checked on application.
struct Move {
    OperatorKind kind;
    int a = 0;
    int b = 0;
    int c = 0;
    int d = 0;

    static Move n1(int a, int b);
    static Move n2(int delivery_pos, int pickup_pos);
    static Move n3(int pickup_i, int pickup_j);
    static Move b1(int u_start, int u_end, int v_start, int v_end);
    static Move b2(int d_start, int d_end, int p_start, int p_end);
    static Move naive(int a, int b);
    static Move insertion(int pickup, int p_new, int d_new);

    bool operator==(const Move&) const = default;
};

// Trace-log text form: "N1 a b", "N2 a b", "N3 i j", "B1 us ue vs ve",
// "B2 ds de ps pe", "INS i p d", "NAIVE a b".
std::string move_to_text(const Move& move);
Move move_from_text(const std::string& text);

// All applicable moves of one kind, in a fixed deterministic order. Empty
// when none apply. Naive and Insertion kinds are not enumerated.
std::vector<Move> enumerate_moves(const Tour& tour, OperatorKind kind);

// Reward of applying move to tour: old cost minus new cost (positive is an
// improvement), computed from the changed boundary edges only.
double move_reward(const Tour& tour, const Move& move, const Instance& instance);

// Applies one of N1/N2/N3/B1/B2/Insertion; the result is feasible by
// construction. Throws MoveOutOfRange / MoveIllTyped on bad parameters.
std::pair<Tour, double> apply_move(const Tour& tour, const Move& move, const Instance& instance);

struct NaiveOutcome {
    std::vector<NodeId> seq;
    bool feasible = false;
    std::optional<double> reward;  // set only when feasible
};

// Swaps two arbitrary positions and reports whether the raw sequence still
// satisfies precedence. Infeasibility is an outcome here, not an error.
NaiveOutcome apply_naive(const Tour& tour, const Move& move, const Instance& instance);

// Removes pair (i, n+i) and reinserts it so the final positions are exactly
// (p_new, d_new); feasible by construction.
std::pair<Tour, double> apply_insertion(const Tour& tour, const Move& move,
                                        const Instance& instance);

// Expresses an insertion as a sequence of N1/N2/N3 moves whose in-order
// application reproduces apply_insertion's output sequence exactly. Not every
// insertion admits such a decomposition; see pair_order_signature below for
// the obstruction. Undecomposable cases throw InsertionNotDecomposable with
// the certificate in the message.
std::vector<Move> insertion_as_exchanges(const Tour& tour, const Move& move);

// Number of (pickup, delivery) node pairs where the pickup precedes the
// delivery. N1 and N3 preserve this count, N2 strictly increases it.
int pd_order_count(const std::vector<NodeId>& seq, int n);

// Per-pair order signature (x_j, y_j): deliveries before pickup j and pickups
// after delivery n+j. N1 leaves all signatures unchanged, N3 swaps two pairs'
// signatures wholesale, and N2 only ever decreases components. A tour T' is
// therefore reachable from T via {N1, N2, N3} only if target signatures can
// be perfectly matched to source signatures under component-wise dominance
// (empirically this condition is also sufficient: it coincides with BFS
// reachability for every ordered tour pair at n = 2, 3 and sampled n = 4).
std::vector<std::pair<int, int>> pair_order_signature(const std::vector<NodeId>& seq, int n);

// Whether a component-wise dominance perfect matching target -> source exists.
bool signature_matching_exists(const std::vector<std::pair<int, int>>& source,
                               const std::vector<std::pair<int, int>>& target);

// Draws min(k, applicable) moves of one kind uniformly without replacement
// and returns the best by reward, ties broken by lowest enumeration index.
// k <= 0 means exhaustive. Returns nullopt when the kind has no moves.
std::optional<Move> sample_best_move(const Tour& tour, OperatorKind kind,
                                     const Instance& instance, int k, Rng& rng);

}  // namespace pdtsp
