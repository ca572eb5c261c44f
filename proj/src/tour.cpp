#include "pdtsp/tour.hpp"

#include <algorithm>
#include <sstream>

#include "pdtsp/errors.hpp"

namespace pdtsp {

namespace {

std::vector<int> build_pos(const std::vector<NodeId>& seq, int n) {
    std::vector<int> pos(static_cast<std::size_t>(2 * n + 1), 0);
    for (int p = 1; p <= 2 * n; ++p) pos[static_cast<std::size_t>(seq[p - 1])] = p;
    return pos;
}

}  // namespace

Tour from_sequence(const std::vector<NodeId>& seq, int n) {
    if (n < 1) throw InvalidSize("pair count must be at least 1");
    if (seq.size() != static_cast<std::size_t>(2 * n))
        throw NotAPermutation("sequence must contain exactly 2n nodes");
    std::vector<bool> seen(static_cast<std::size_t>(2 * n + 1), false);
    for (NodeId v : seq) {
        if (v < 1 || v > 2 * n) throw NotAPermutation("node id out of range: " + std::to_string(v));
        if (seen[static_cast<std::size_t>(v)])
            throw NotAPermutation("duplicate node: " + std::to_string(v));
        seen[static_cast<std::size_t>(v)] = true;
    }
    Tour t;
    t.n_ = n;
    t.seq_ = seq;
    t.pos_ = build_pos(seq, n);
    for (int i = 1; i <= n; ++i) {
        if (t.pos(i) >= t.pos(n + i)) throw PrecedenceViolated(i, n + i);
    }
    return t;
}

bool is_feasible_sequence(const std::vector<NodeId>& seq, int n) {
    if (seq.size() != static_cast<std::size_t>(2 * n)) return false;
    std::vector<int> pos(static_cast<std::size_t>(2 * n + 1), 0);
    for (int p = 1; p <= 2 * n; ++p) {
        NodeId v = seq[static_cast<std::size_t>(p - 1)];
        if (v < 1 || v > 2 * n || pos[static_cast<std::size_t>(v)] != 0) return false;
        pos[static_cast<std::size_t>(v)] = p;
    }
    for (int i = 1; i <= n; ++i) {
        if (pos[static_cast<std::size_t>(i)] >= pos[static_cast<std::size_t>(n + i)]) return false;
    }
    return true;
}

Tour unchecked_tour(std::vector<NodeId> seq, int n) {
    Tour t;
    t.n_ = n;
    t.pos_ = build_pos(seq, n);
    t.seq_ = std::move(seq);
    return t;
}

Tour canonical_initial(int n, const std::vector<NodeId>& order) {
    if (order.size() != static_cast<std::size_t>(n))
        throw InvalidOrder("order must contain exactly n pickups");
    std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
    for (NodeId i : order) {
        if (i < 1 || i > n || seen[static_cast<std::size_t>(i)])
            throw InvalidOrder("order is not a permutation of 1..n");
        seen[static_cast<std::size_t>(i)] = true;
    }
    std::vector<NodeId> seq;
    seq.reserve(static_cast<std::size_t>(2 * n));
    for (NodeId i : order) {
        seq.push_back(i);
        seq.push_back(n + i);
    }
    return unchecked_tour(std::move(seq), n);
}

double tour_cost(const Tour& tour, const Instance& instance) {
    if (tour.n() != instance.n()) throw DimensionError("tour and instance sizes differ");
    double total = instance.cost(0, tour.at(1));
    for (int p = 1; p < tour.length(); ++p) total += instance.cost(tour.at(p), tour.at(p + 1));
    total += instance.cost(tour.at(tour.length()), 0);
    return total;
}

std::vector<Block> maximal_blocks(const Tour& tour) {
    std::vector<Block> blocks;
    int start = 1;
    bool pickup = tour.is_pickup(tour.at(1));
    for (int p = 2; p <= tour.length(); ++p) {
        bool cur = tour.is_pickup(tour.at(p));
        if (cur != pickup) {
            blocks.push_back({pickup ? Block::Kind::Pickup : Block::Kind::Delivery, start, p - 1});
            start = p;
            pickup = cur;
        }
    }
    blocks.push_back(
        {pickup ? Block::Kind::Pickup : Block::Kind::Delivery, start, tour.length()});
    return blocks;
}

BigUint count_all(int n) {
    if (n < 1) throw InvalidSize("pair count must be at least 1");
    BigUint r(1);
    for (int k = 2; k <= 2 * n; ++k) r *= static_cast<std::uint32_t>(k);
    return r;
}

BigUint count_feasible(int n) {
    BigUint r = count_all(n);
    for (int k = 0; k < n; ++k) r.halve();
    return r;
}

namespace {

// Inserts deliveries for order[j..n-1] into seq, one delivery at a time in
// reverse pickup order, trying every slot after the pickup. Each feasible
// tour is produced exactly once.
void insert_deliveries(std::vector<NodeId>& seq, const std::vector<NodeId>& order, int j, int n,
                       const std::function<void(const Tour&)>& fn) {
    if (j < 0) {
        fn(unchecked_tour(seq, n));
        return;
    }
    NodeId pickup = order[static_cast<std::size_t>(j)];
    auto pickup_it = std::find(seq.begin(), seq.end(), pickup);
    std::size_t first_slot = static_cast<std::size_t>(pickup_it - seq.begin()) + 1;
    for (std::size_t slot = first_slot; slot <= seq.size(); ++slot) {
        seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(slot), n + pickup);
        insert_deliveries(seq, order, j - 1, n, fn);
        seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(slot));
    }
}

}  // namespace

void for_each_feasible(int n, const std::function<void(const Tour&)>& fn, int cap) {
    if (n < 1) throw InvalidSize("pair count must be at least 1");
    if (n > cap)
        throw TooLarge("n = " + std::to_string(n) + " exceeds enumeration cap " +
                       std::to_string(cap));
    std::vector<NodeId> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
    do {
        std::vector<NodeId> seq = order;
        insert_deliveries(seq, order, n - 1, n, fn);
    } while (std::next_permutation(order.begin(), order.end()));
}

std::vector<Tour> enumerate_feasible(int n, int cap) {
    std::vector<Tour> tours;
    for_each_feasible(n, [&](const Tour& t) { tours.push_back(t); }, cap);
    return tours;
}

Tour random_tour(int n, Rng& rng) {
    std::vector<NodeId> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
    rng.shuffle(order);
    std::vector<NodeId> seq = order;
    // Reverse pickup order so the slot count for each delivery is 2k+1.
    for (int j = n - 1; j >= 0; --j) {
        NodeId pickup = order[static_cast<std::size_t>(j)];
        auto pickup_it = std::find(seq.begin(), seq.end(), pickup);
        std::size_t first_slot = static_cast<std::size_t>(pickup_it - seq.begin()) + 1;
        std::size_t slot =
            first_slot + rng.below(static_cast<std::uint64_t>(seq.size() - first_slot + 1));
        seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(slot), n + pickup);
    }
    return unchecked_tour(std::move(seq), n);
}

std::string tour_to_text(const Tour& tour) {
    std::string out = "0";
    for (NodeId v : tour.seq()) out += " " + std::to_string(v);
    out += " 0";
    return out;
}

Tour tour_from_text(const std::string& text, int n) {
    std::istringstream in(text);
    std::vector<NodeId> nodes;
    NodeId v;
    while (in >> v) nodes.push_back(v);
    if (nodes.size() < 2 || nodes.front() != 0 || nodes.back() != 0)
        throw ParseError(1, "tour text must start and end with the depot 0");
    nodes.erase(nodes.begin());
    nodes.pop_back();
    return from_sequence(nodes, n);
}

}  // namespace pdtsp
