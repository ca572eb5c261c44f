#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pdtsp/bigint.hpp"
#include "pdtsp/instance.hpp"
#include "pdtsp/rng.hpp"

namespace pdtsp {

// A feasible tour over 2n nodes. The depot is implicit at both ends and
// positions are 1-based so that index arithmetic on p_i and d_{n+i} reads the
// same as in the usual problem statement. Invariants: seq is a permutation of
// {1..2n}, every pickup precedes its delivery, and pos is the exact inverse
// of seq.
class Tour {
public:
    Tour() = default;  // empty; meaningful tours come from the builders below

    int n() const { return n_; }
    int length() const { return 2 * n_; }

    // Node at 1-based position p.
    NodeId at(int p) const { return seq_[static_cast<std::size_t>(p - 1)]; }
    // 1-based position of node i.
    int pos(NodeId i) const { return pos_[static_cast<std::size_t>(i)]; }

    const std::vector<NodeId>& seq() const { return seq_; }

    bool is_pickup(NodeId i) const { return i >= 1 && i <= n_; }
    bool is_delivery(NodeId i) const { return i > n_ && i <= 2 * n_; }

    bool operator==(const Tour&) const = default;

private:
    friend Tour from_sequence(const std::vector<NodeId>& seq, int n);
    friend Tour unchecked_tour(std::vector<NodeId> seq, int n);

    int n_ = 0;
    std::vector<NodeId> seq_;  // length 2n
    std::vector<int> pos_;     // length 2n+1, pos_[0] unused
};

// Validates and indexes a node sequence. Throws NotAPermutation or
// PrecedenceViolated (reporting the offending pair).
Tour from_sequence(const std::vector<NodeId>& seq, int n);

// True iff seq is a permutation of {1..2n} with every pickup before its
// delivery. Cheap enough for fuzz audits.
bool is_feasible_sequence(const std::vector<NodeId>& seq, int n);

// Builds a tour from a known-feasible sequence without validation. Used by
// operators that preserve feasibility by construction.
Tour unchecked_tour(std::vector<NodeId> seq, int n);

// The interleaved construction [i1, n+i1, i2, n+i2, ...] for a pickup order;
// always feasible. Throws InvalidOrder if order is not a permutation of 1..n.
Tour canonical_initial(int n, const std::vector<NodeId>& order);

// Closed-walk cost: depot -> seq -> depot.
double tour_cost(const Tour& tour, const Instance& instance);

struct Block {
    enum class Kind { Pickup, Delivery };
    Kind kind;
    int start;  // inclusive 1-based positions
    int end;

    int size() const { return end - start + 1; }
    bool operator==(const Block&) const = default;
};

// The canonical maximal decomposition: blocks alternate in kind, adjacent
// same-kind runs are merged, spans cover [1, 2n], first block is Pickup.
std::vector<Block> maximal_blocks(const Tour& tour);

// Number of feasible tours, (2n)!/2^n, exactly.
BigUint count_feasible(int n);
// Number of Hamiltonian cycles regardless of precedence, (2n)!.
BigUint count_all(int n);

inline constexpr int kDefaultEnumerationCap = 6;

// Visits every feasible tour exactly once, by generating pickup permutations
// and recursively inserting each delivery into its admissible slots. Yield
// order is deterministic. Throws TooLarge when n exceeds the cap.
void for_each_feasible(int n, const std::function<void(const Tour&)>& fn,
                       int cap = kDefaultEnumerationCap);

// Materialized variant for small n.
std::vector<Tour> enumerate_feasible(int n, int cap = kDefaultEnumerationCap);

// Uniformly random feasible tour (every tour has probability 2^n/(2n)!).
Tour random_tour(int n, Rng& rng);

// CLI text form: "0 <seq...> 0" on one line.
std::string tour_to_text(const Tour& tour);
Tour tour_from_text(const std::string& text, int n);

}  // namespace pdtsp
