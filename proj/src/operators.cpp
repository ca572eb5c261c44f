#include "pdtsp/operators.hpp"

#include <algorithm>
#include <sstream>
#include <set>

#include "pdtsp/errors.hpp"

namespace pdtsp {

const char* kind_name(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::N1: return "N1";
        case OperatorKind::N2: return "N2";
        case OperatorKind::N3: return "N3";
        case OperatorKind::B1: return "B1";
        case OperatorKind::B2: return "B2";
        case OperatorKind::Naive: return "NAIVE";
        case OperatorKind::Insertion: return "INS";
    }
    return "?";
}

Move Move::n1(int a, int b) {
    if (a == b) throw MoveIllTyped("N1 needs two distinct positions");
    if (a > b) std::swap(a, b);
    return Move{OperatorKind::N1, a, b, 0, 0};
}

Move Move::n2(int delivery_pos, int pickup_pos) {
    if (delivery_pos >= pickup_pos)
        throw MoveIllTyped("N2 needs the delivery position strictly before the pickup position");
    return Move{OperatorKind::N2, delivery_pos, pickup_pos, 0, 0};
}

Move Move::n3(int pickup_i, int pickup_j) {
    if (pickup_i == pickup_j) throw MoveIllTyped("N3 needs two distinct pairs");
    if (pickup_i > pickup_j) std::swap(pickup_i, pickup_j);
    return Move{OperatorKind::N3, pickup_i, pickup_j, 0, 0};
}

Move Move::b1(int u_start, int u_end, int v_start, int v_end) {
    if (!(u_start <= u_end && u_end < v_start && v_start <= v_end))
        throw MoveIllTyped("B1 needs two disjoint ordered spans");
    return Move{OperatorKind::B1, u_start, u_end, v_start, v_end};
}

Move Move::b2(int d_start, int d_end, int p_start, int p_end) {
    if (!(d_start <= d_end && d_end < p_start && p_start <= p_end))
        throw MoveIllTyped("B2 needs the delivery span strictly before the pickup span");
    return Move{OperatorKind::B2, d_start, d_end, p_start, p_end};
}

Move Move::naive(int a, int b) {
    if (a == b) throw MoveIllTyped("naive swap needs two distinct positions");
    if (a > b) std::swap(a, b);
    return Move{OperatorKind::Naive, a, b, 0, 0};
}

Move Move::insertion(int pickup, int p_new, int d_new) {
    if (p_new == d_new) throw PositionClash("insertion targets coincide");
    if (p_new > d_new)
        throw MoveIllTyped("insertion needs the pickup position before the delivery position");
    return Move{OperatorKind::Insertion, pickup, p_new, d_new, 0};
}

std::string move_to_text(const Move& move) {
    std::ostringstream out;
    out << kind_name(move.kind) << ' ' << move.a << ' ' << move.b;
    if (move.kind == OperatorKind::B1 || move.kind == OperatorKind::B2)
        out << ' ' << move.c << ' ' << move.d;
    if (move.kind == OperatorKind::Insertion) out << ' ' << move.c;
    return out.str();
}

Move move_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    if (!(in >> tag)) throw ParseError(1, "empty move text");
    int a = 0, b = 0, c = 0, d = 0;
    if (tag == "N1" && in >> a >> b) return Move::n1(a, b);
    if (tag == "N2" && in >> a >> b) return Move::n2(a, b);
    if (tag == "N3" && in >> a >> b) return Move::n3(a, b);
    if (tag == "B1" && in >> a >> b >> c >> d) return Move::b1(a, b, c, d);
    if (tag == "B2" && in >> a >> b >> c >> d) return Move::b2(a, b, c, d);
    if (tag == "INS" && in >> a >> b >> c) return Move::insertion(a, b, c);
    if (tag == "NAIVE" && in >> a >> b) return Move::naive(a, b);
    throw ParseError(1, "unrecognized move text: " + text);
}

namespace {

void check_position(const Tour& tour, int p) {
    if (p < 1 || p > tour.length())
        throw MoveOutOfRange("position " + std::to_string(p) + " outside 1.." +
                             std::to_string(tour.length()));
}

// Validates tour-dependent conditions for every kind.
void validate_move(const Tour& tour, const Move& move) {
    switch (move.kind) {
        case OperatorKind::N1: {
            check_position(tour, move.a);
            check_position(tour, move.b);
            bool pickup = tour.is_pickup(tour.at(move.a));
            // Same maximal block: the whole closed range must share the type.
            for (int p = move.a; p <= move.b; ++p) {
                if (tour.is_pickup(tour.at(p)) != pickup)
                    throw MoveIllTyped("N1 positions are not inside one maximal block");
            }
            return;
        }
        case OperatorKind::N2:
            check_position(tour, move.a);
            check_position(tour, move.b);
            if (!tour.is_delivery(tour.at(move.a)))
                throw MoveIllTyped("N2 position a must hold a delivery");
            if (!tour.is_pickup(tour.at(move.b)))
                throw MoveIllTyped("N2 position b must hold a pickup");
            return;
        case OperatorKind::N3:
            if (move.a < 1 || move.a > tour.n() || move.b < 1 || move.b > tour.n())
                throw MoveOutOfRange("N3 arguments must be pickup ids");
            return;
        case OperatorKind::B1: {
            check_position(tour, move.a);
            check_position(tour, move.d);
            bool pickup = tour.is_pickup(tour.at(move.a));
            for (int p = move.a; p <= move.d; ++p) {
                if (tour.is_pickup(tour.at(p)) != pickup)
                    throw MoveIllTyped("B1 spans are not inside one maximal block");
            }
            return;
        }
        case OperatorKind::B2:
            check_position(tour, move.a);
            check_position(tour, move.d);
            for (int p = move.a; p <= move.b; ++p) {
                if (!tour.is_delivery(tour.at(p)))
                    throw MoveIllTyped("B2 first span must hold deliveries");
            }
            for (int p = move.c; p <= move.d; ++p) {
                if (!tour.is_pickup(tour.at(p)))
                    throw MoveIllTyped("B2 second span must hold pickups");
            }
            return;
        case OperatorKind::Naive:
            check_position(tour, move.a);
            check_position(tour, move.b);
            return;
        case OperatorKind::Insertion:
            if (move.a < 1 || move.a > tour.n())
                throw MoveOutOfRange("insertion needs a pickup id");
            check_position(tour, move.b);
            check_position(tour, move.c);
            return;
    }
}

NodeId node_or_depot(const std::vector<NodeId>& seq, int p) {
    if (p < 1 || p > static_cast<int>(seq.size())) return 0;
    return seq[static_cast<std::size_t>(p - 1)];
}

// Cost delta of swapping positions a < b (old edges minus new edges).
double swap_reward(const std::vector<NodeId>& seq, int a, int b, const Instance& inst) {
    NodeId u = seq[static_cast<std::size_t>(a - 1)];
    NodeId v = seq[static_cast<std::size_t>(b - 1)];
    NodeId before = node_or_depot(seq, a - 1);
    NodeId after = node_or_depot(seq, b + 1);
    if (b == a + 1) {
        double removed = inst.cost(before, u) + inst.cost(v, after);
        double added = inst.cost(before, v) + inst.cost(u, after);
        return removed - added;
    }
    NodeId next_a = node_or_depot(seq, a + 1);
    NodeId prev_b = node_or_depot(seq, b - 1);
    double removed =
        inst.cost(before, u) + inst.cost(u, next_a) + inst.cost(prev_b, v) + inst.cost(v, after);
    double added =
        inst.cost(before, v) + inst.cost(v, next_a) + inst.cost(prev_b, u) + inst.cost(u, after);
    return removed - added;
}

// Cost delta of moving span [s2,e2] in front of [s1,e1] (segments rigid,
// middle shifts coherently).
double segment_swap_reward(const std::vector<NodeId>& seq, int s1, int e1, int s2, int e2,
                           const Instance& inst) {
    NodeId before = node_or_depot(seq, s1 - 1);
    NodeId after = node_or_depot(seq, e2 + 1);
    NodeId l1 = seq[static_cast<std::size_t>(s1 - 1)];
    NodeId r1 = seq[static_cast<std::size_t>(e1 - 1)];
    NodeId l2 = seq[static_cast<std::size_t>(s2 - 1)];
    NodeId r2 = seq[static_cast<std::size_t>(e2 - 1)];
    if (e1 + 1 == s2) {
        double removed = inst.cost(before, l1) + inst.cost(r1, l2) + inst.cost(r2, after);
        double added = inst.cost(before, l2) + inst.cost(r2, l1) + inst.cost(r1, after);
        return removed - added;
    }
    NodeId mid_first = seq[static_cast<std::size_t>(e1)];
    NodeId mid_last = seq[static_cast<std::size_t>(s2 - 2)];
    double removed = inst.cost(before, l1) + inst.cost(r1, mid_first) + inst.cost(mid_last, l2) +
                     inst.cost(r2, after);
    double added = inst.cost(before, l2) + inst.cost(r2, mid_first) + inst.cost(mid_last, l1) +
                   inst.cost(r1, after);
    return removed - added;
}

std::vector<NodeId> swapped_seq(std::vector<NodeId> seq, int a, int b) {
    std::swap(seq[static_cast<std::size_t>(a - 1)], seq[static_cast<std::size_t>(b - 1)]);
    return seq;
}

std::vector<NodeId> segment_swapped_seq(const std::vector<NodeId>& seq, int s1, int e1, int s2,
                                        int e2) {
    std::vector<NodeId> out;
    out.reserve(seq.size());
    out.insert(out.end(), seq.begin(), seq.begin() + (s1 - 1));
    out.insert(out.end(), seq.begin() + (s2 - 1), seq.begin() + e2);
    out.insert(out.end(), seq.begin() + e1, seq.begin() + (s2 - 1));
    out.insert(out.end(), seq.begin() + (s1 - 1), seq.begin() + e1);
    out.insert(out.end(), seq.begin() + e2, seq.end());
    return out;
}

// Final sequence of an insertion move: pair removed, others keep their order,
// pickup at position p_new and delivery at d_new.
std::vector<NodeId> insertion_target_seq(const Tour& tour, const Move& move) {
    NodeId pickup = move.a;
    NodeId delivery = tour.n() + pickup;
    std::vector<NodeId> rest;
    rest.reserve(tour.seq().size() - 2);
    for (NodeId v : tour.seq()) {
        if (v != pickup && v != delivery) rest.push_back(v);
    }
    std::vector<NodeId> out(tour.seq().size(), 0);
    out[static_cast<std::size_t>(move.b - 1)] = pickup;
    out[static_cast<std::size_t>(move.c - 1)] = delivery;
    std::size_t r = 0;
    for (auto& slot : out) {
        if (slot == 0) slot = rest[r++];
    }
    return out;
}

}  // namespace

std::vector<Move> enumerate_moves(const Tour& tour, OperatorKind kind) {
    std::vector<Move> moves;
    switch (kind) {
        case OperatorKind::N1: {
            for (const Block& blk : maximal_blocks(tour)) {
                for (int a = blk.start; a < blk.end; ++a)
                    for (int b = a + 1; b <= blk.end; ++b) moves.push_back(Move::n1(a, b));
            }
            break;
        }
        case OperatorKind::N2: {
            for (int a = 1; a <= tour.length(); ++a) {
                if (!tour.is_delivery(tour.at(a))) continue;
                for (int b = a + 1; b <= tour.length(); ++b) {
                    if (tour.is_pickup(tour.at(b))) moves.push_back(Move::n2(a, b));
                }
            }
            break;
        }
        case OperatorKind::N3: {
            for (int i = 1; i < tour.n(); ++i)
                for (int j = i + 1; j <= tour.n(); ++j) moves.push_back(Move::n3(i, j));
            break;
        }
        case OperatorKind::B1: {
            for (const Block& blk : maximal_blocks(tour)) {
                for (int us = blk.start; us <= blk.end; ++us)
                    for (int ue = us; ue <= blk.end; ++ue)
                        for (int vs = ue + 1; vs <= blk.end; ++vs)
                            for (int ve = vs; ve <= blk.end; ++ve)
                                moves.push_back(Move::b1(us, ue, vs, ve));
            }
            break;
        }
        case OperatorKind::B2: {
            std::vector<Block> blocks = maximal_blocks(tour);
            for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
                if (blocks[bi].kind != Block::Kind::Delivery) continue;
                for (std::size_t bj = bi + 1; bj < blocks.size(); ++bj) {
                    if (blocks[bj].kind != Block::Kind::Pickup) continue;
                    for (int ds = blocks[bi].start; ds <= blocks[bi].end; ++ds)
                        for (int de = ds; de <= blocks[bi].end; ++de)
                            for (int ps = blocks[bj].start; ps <= blocks[bj].end; ++ps)
                                for (int pe = ps; pe <= blocks[bj].end; ++pe)
                                    moves.push_back(Move::b2(ds, de, ps, pe));
                }
            }
            break;
        }
        case OperatorKind::Naive:
        case OperatorKind::Insertion:
            break;
    }
    return moves;
}

double move_reward(const Tour& tour, const Move& move, const Instance& instance) {
    validate_move(tour, move);
    switch (move.kind) {
        case OperatorKind::N1:
        case OperatorKind::N2:
        case OperatorKind::Naive:
            return swap_reward(tour.seq(), move.a, move.b, instance);
        case OperatorKind::N3: {
            int pi = tour.pos(move.a);
            int pj = tour.pos(move.b);
            int di = tour.pos(tour.n() + move.a);
            int dj = tour.pos(tour.n() + move.b);
            double reward =
                swap_reward(tour.seq(), std::min(pi, pj), std::max(pi, pj), instance);
            std::vector<NodeId> mid = swapped_seq(tour.seq(), pi, pj);
            reward += swap_reward(mid, std::min(di, dj), std::max(di, dj), instance);
            return reward;
        }
        case OperatorKind::B1:
        case OperatorKind::B2:
            return segment_swap_reward(tour.seq(), move.a, move.b, move.c, move.d, instance);
        case OperatorKind::Insertion: {
            // Linked-list deltas: remove the pair, then splice it back at the
            // target slots. Depot is node 0 at both ends.
            const int n = tour.n();
            NodeId pickup = move.a;
            NodeId delivery = n + pickup;
            std::vector<NodeId> next(static_cast<std::size_t>(2 * n + 1));
            std::vector<NodeId> prev(static_cast<std::size_t>(2 * n + 1));
            NodeId last = 0;
            for (NodeId v : tour.seq()) {
                next[static_cast<std::size_t>(last)] = v;
                prev[static_cast<std::size_t>(v)] = last;
                last = v;
            }
            next[static_cast<std::size_t>(last)] = 0;
            prev[0] = last;

            double delta = 0.0;  // new cost minus old cost
            for (NodeId v : {pickup, delivery}) {
                NodeId p = prev[static_cast<std::size_t>(v)];
                NodeId q = next[static_cast<std::size_t>(v)];
                delta += instance.cost(p, q) - instance.cost(p, v) - instance.cost(v, q);
                next[static_cast<std::size_t>(p)] = q;
                prev[static_cast<std::size_t>(q)] = p;
            }
            std::vector<NodeId> target = insertion_target_seq(tour, move);
            auto target_at = [&](int p) { return node_or_depot(target, p); };
            // Delivery first so the pickup's final neighbours all exist.
            NodeId dl = target_at(move.c - 1) == pickup ? target_at(move.b - 1)
                                                        : target_at(move.c - 1);
            NodeId dr = target_at(move.c + 1);
            delta += instance.cost(dl, delivery) + instance.cost(delivery, dr) -
                     instance.cost(dl, dr);
            next[static_cast<std::size_t>(dl)] = delivery;
            prev[static_cast<std::size_t>(delivery)] = dl;
            next[static_cast<std::size_t>(delivery)] = dr;
            prev[static_cast<std::size_t>(dr)] = delivery;
            NodeId pl = target_at(move.b - 1);
            NodeId pr = target_at(move.b + 1);
            delta += instance.cost(pl, pickup) + instance.cost(pickup, pr) - instance.cost(pl, pr);
            return -delta;
        }
    }
    return 0.0;
}

std::pair<Tour, double> apply_move(const Tour& tour, const Move& move, const Instance& instance) {
    if (tour.n() != instance.n()) throw DimensionError("tour and instance sizes differ");
    if (move.kind == OperatorKind::Naive)
        throw MoveIllTyped("naive swaps go through apply_naive");
    if (move.kind == OperatorKind::Insertion) return apply_insertion(tour, move, instance);
    double reward = move_reward(tour, move, instance);
    switch (move.kind) {
        case OperatorKind::N1:
        case OperatorKind::N2:
            return {unchecked_tour(swapped_seq(tour.seq(), move.a, move.b), tour.n()), reward};
        case OperatorKind::N3: {
            std::vector<NodeId> seq = swapped_seq(tour.seq(), tour.pos(move.a), tour.pos(move.b));
            seq = swapped_seq(std::move(seq), tour.pos(tour.n() + move.a),
                              tour.pos(tour.n() + move.b));
            return {unchecked_tour(std::move(seq), tour.n()), reward};
        }
        case OperatorKind::B1:
        case OperatorKind::B2:
            return {unchecked_tour(
                        segment_swapped_seq(tour.seq(), move.a, move.b, move.c, move.d), tour.n()),
                    reward};
        default:
            break;
    }
    throw MoveIllTyped("unknown move kind");
}

NaiveOutcome apply_naive(const Tour& tour, const Move& move, const Instance& instance) {
    if (move.kind != OperatorKind::Naive) throw MoveIllTyped("apply_naive needs a naive move");
    validate_move(tour, move);
    NaiveOutcome out;
    out.seq = swapped_seq(tour.seq(), move.a, move.b);
    NodeId u = tour.at(move.a);  // now at position b
    NodeId v = tour.at(move.b);  // now at position a
    bool feasible = true;
    if (tour.is_pickup(u)) {
        int d = u + tour.n() == v ? move.a : tour.pos(u + tour.n());
        if (move.b >= d) feasible = false;
    }
    if (tour.is_delivery(v)) {
        int p = v - tour.n() == u ? move.b : tour.pos(v - tour.n());
        if (p >= move.a) feasible = false;
    }
    out.feasible = feasible;
    if (feasible) out.reward = swap_reward(tour.seq(), move.a, move.b, instance);
    return out;
}

std::pair<Tour, double> apply_insertion(const Tour& tour, const Move& move,
                                        const Instance& instance) {
    if (move.kind != OperatorKind::Insertion)
        throw MoveIllTyped("apply_insertion needs an insertion move");
    double reward = move_reward(tour, move, instance);
    return {unchecked_tour(insertion_target_seq(tour, move), tour.n()), reward};
}

int pd_order_count(const std::vector<NodeId>& seq, int n) {
    std::vector<int> pos(static_cast<std::size_t>(2 * n + 1), 0);
    for (int p = 1; p <= static_cast<int>(seq.size()); ++p)
        pos[static_cast<std::size_t>(seq[static_cast<std::size_t>(p - 1)])] = p;
    int count = 0;
    for (int u = 1; u <= n; ++u)
        for (int y = n + 1; y <= 2 * n; ++y)
            if (pos[static_cast<std::size_t>(u)] < pos[static_cast<std::size_t>(y)]) ++count;
    return count;
}

namespace {

// Working sequence with O(1) position lookup for the decomposition planner.
struct WorkSeq {
    std::vector<NodeId> seq;
    std::vector<int> pos;
    int n;

    explicit WorkSeq(const std::vector<NodeId>& s, int pairs) : seq(s), n(pairs) {
        pos.assign(static_cast<std::size_t>(2 * n + 1), 0);
        for (int p = 1; p <= static_cast<int>(seq.size()); ++p)
            pos[static_cast<std::size_t>(seq[static_cast<std::size_t>(p - 1)])] = p;
    }

    bool is_pickup(NodeId v) const { return v >= 1 && v <= n; }

    void swap_positions(int a, int b) {
        NodeId& x = seq[static_cast<std::size_t>(a - 1)];
        NodeId& y = seq[static_cast<std::size_t>(b - 1)];
        std::swap(pos[static_cast<std::size_t>(x)], pos[static_cast<std::size_t>(y)]);
        std::swap(x, y);
    }

    void apply_n3(NodeId i, NodeId j) {
        swap_positions(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]);
        swap_positions(pos[static_cast<std::size_t>(n + i)], pos[static_cast<std::size_t>(n + j)]);
    }
};

// Selection sort towards target using only adjacent swaps that are legal
// moves: same-type neighbours (N1 within a maximal block) or a delivery
// immediately before a pickup (N2). Fails when a pickup would have to cross
// a delivery leftwards.
bool free_path_plan(WorkSeq& work, const std::vector<NodeId>& target, std::vector<Move>& out) {
    for (int q = 1; q <= static_cast<int>(target.size()); ++q) {
        NodeId v = target[static_cast<std::size_t>(q - 1)];
        int c = work.pos[static_cast<std::size_t>(v)];
        while (c > q) {
            NodeId x = work.seq[static_cast<std::size_t>(c - 2)];
            if (work.is_pickup(x) == work.is_pickup(v)) {
                out.push_back(Move::n1(c - 1, c));
            } else if (!work.is_pickup(x) && work.is_pickup(v)) {
                out.push_back(Move::n2(c - 1, c));
            } else {
                return false;
            }
            work.swap_positions(c - 1, c);
            --c;
        }
    }
    return true;
}

}  // namespace

std::vector<std::pair<int, int>> pair_order_signature(const std::vector<NodeId>& seq, int n) {
    std::vector<int> pos(static_cast<std::size_t>(2 * n + 1), 0);
    for (int p = 1; p <= static_cast<int>(seq.size()); ++p)
        pos[static_cast<std::size_t>(seq[static_cast<std::size_t>(p - 1)])] = p;
    std::vector<std::pair<int, int>> sig(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        int x = 0, y = 0;
        for (int z = n + 1; z <= 2 * n; ++z)
            if (pos[static_cast<std::size_t>(z)] < pos[static_cast<std::size_t>(j)]) ++x;
        for (int u = 1; u <= n; ++u)
            if (pos[static_cast<std::size_t>(u)] > pos[static_cast<std::size_t>(n + j)]) ++y;
        sig[static_cast<std::size_t>(j - 1)] = {x, y};
    }
    return sig;
}

namespace {

bool kuhn_augment(int t, const std::vector<std::vector<int>>& adj, std::vector<int>& owner,
                  std::vector<bool>& visited) {
    for (int s : adj[static_cast<std::size_t>(t)]) {
        if (visited[static_cast<std::size_t>(s)]) continue;
        visited[static_cast<std::size_t>(s)] = true;
        if (owner[static_cast<std::size_t>(s)] < 0 ||
            kuhn_augment(owner[static_cast<std::size_t>(s)], adj, owner, visited)) {
            owner[static_cast<std::size_t>(s)] = t;
            return true;
        }
    }
    return false;
}

}  // namespace

bool signature_matching_exists(const std::vector<std::pair<int, int>>& source,
                               const std::vector<std::pair<int, int>>& target) {
    const int n = static_cast<int>(source.size());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        for (int s = 0; s < n; ++s)
            if (target[static_cast<std::size_t>(t)].first <=
                    source[static_cast<std::size_t>(s)].first &&
                target[static_cast<std::size_t>(t)].second <=
                    source[static_cast<std::size_t>(s)].second)
                adj[static_cast<std::size_t>(t)].push_back(s);
    std::vector<int> owner(static_cast<std::size_t>(n), -1);
    for (int t = 0; t < n; ++t) {
        std::vector<bool> visited(static_cast<std::size_t>(n), false);
        if (!kuhn_augment(t, adj, owner, visited)) return false;
    }
    return true;
}

namespace {

// Depth-first search over pair-swap chains. Each N3 hands the displaced
// "hole" pair to the next chain member, so side effects accumulate on pairs
// that keep moving instead of on settled ones; between hops the monotone
// planner tries to finish. Visited states are pruned per call.
struct ChainSearch {
    const std::vector<NodeId>& target;
    int n;
    std::set<std::vector<NodeId>> visited;

    bool run(WorkSeq& work, NodeId hole, int depth, std::vector<Move>& chain,
             std::vector<Move>& out) {
        if (work.seq == target) {
            out = chain;
            return true;
        }
        {
            std::vector<Move> tail;
            WorkSeq probe = work;
            if (free_path_plan(probe, target, tail)) {
                out = chain;
                out.insert(out.end(), tail.begin(), tail.end());
                return true;
            }
        }
        if (depth == 0) return false;
        for (NodeId w = 1; w <= n; ++w) {
            if (w == hole) continue;
            WorkSeq next = work;
            next.apply_n3(hole, w);
            if (!visited.insert(next.seq).second) continue;
            chain.push_back(Move::n3(hole, w));
            if (run(next, w, depth - 1, chain, out)) return true;
            chain.pop_back();
        }
        return false;
    }
};

}  // namespace

namespace {

// All dominance matchings target-pair -> source-pair, identity-biased, capped.
void enumerate_matchings(const std::vector<std::pair<int, int>>& src,
                         const std::vector<std::pair<int, int>>& tgt, std::size_t t,
                         std::vector<int>& assign, std::vector<bool>& used,
                         std::vector<std::vector<int>>& out, std::size_t cap) {
    const std::size_t n = src.size();
    if (out.size() >= cap) return;
    if (t == n) {
        out.push_back(assign);
        return;
    }
    // Try the identity slot first so trivial matchings come out first.
    std::vector<std::size_t> order;
    order.push_back(t);
    for (std::size_t s = 0; s < n; ++s)
        if (s != t) order.push_back(s);
    for (std::size_t s : order) {
        if (used[s]) continue;
        if (tgt[t].first > src[s].first || tgt[t].second > src[s].second) continue;
        used[s] = true;
        assign[t] = static_cast<int>(s);
        enumerate_matchings(src, tgt, t + 1, assign, used, out, cap);
        used[s] = false;
    }
}

// N3 chains realizing "pair j moves to the original slots of pair perm[j]",
// one chain per permutation cycle; `rotation` rotates each cycle's starting
// point to produce alternative intermediate states.
std::vector<Move> relabeling_swaps(const std::vector<int>& perm, std::uint64_t rotation) {
    const int n = static_cast<int>(perm.size());
    std::vector<Move> swaps;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int start = 0; start < n; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        std::vector<int> cycle;
        int cur = start;
        while (!seen[static_cast<std::size_t>(cur)]) {
            seen[static_cast<std::size_t>(cur)] = true;
            cycle.push_back(cur);
            cur = perm[static_cast<std::size_t>(cur)];
        }
        if (cycle.size() < 2) continue;
        std::size_t offset = rotation % cycle.size();
        rotation /= cycle.size();
        std::rotate(cycle.begin(), cycle.begin() + static_cast<std::ptrdiff_t>(offset),
                    cycle.end());
        for (std::size_t i = 0; i + 1 < cycle.size(); ++i)
            swaps.push_back(Move::n3(cycle[i] + 1, cycle[i + 1] + 1));
    }
    return swaps;
}

std::uint64_t rotation_count(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::uint64_t total = 1;
    for (int start = 0; start < n; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        std::uint64_t len = 0;
        int cur = start;
        while (!seen[static_cast<std::size_t>(cur)]) {
            seen[static_cast<std::size_t>(cur)] = true;
            ++len;
            cur = perm[static_cast<std::size_t>(cur)];
        }
        if (len > 1) total *= len;
    }
    return total;
}

}  // namespace

std::vector<Move> insertion_as_exchanges(const Tour& tour, const Move& move) {
    if (move.kind != OperatorKind::Insertion)
        throw MoveIllTyped("insertion_as_exchanges needs an insertion move");
    validate_move(tour, move);
    const int n = tour.n();
    const std::vector<NodeId> target = insertion_target_seq(tour, move);
    if (target == tour.seq()) return {};

    std::vector<Move> plan;
    {
        WorkSeq work(tour.seq(), n);
        if (free_path_plan(work, target, plan)) return plan;
    }

    // The free planner only moves nodes in their unconstrained directions;
    // anything else needs N3 relabeling first. Signature dominance tells us
    // which pair can end up in which source pair's slots, so enumerate those
    // matchings, realize each as pair-swap cycles, and finish monotonically.
    const std::vector<std::pair<int, int>> src_sig = pair_order_signature(tour.seq(), n);
    const std::vector<std::pair<int, int>> tgt_sig = pair_order_signature(target, n);
    std::vector<std::vector<int>> matchings;
    {
        std::vector<int> assign(static_cast<std::size_t>(n), 0);
        std::vector<bool> used(static_cast<std::size_t>(n), false);
        enumerate_matchings(src_sig, tgt_sig, 0, assign, used, matchings, 512);
    }
    for (const std::vector<int>& perm : matchings) {
        std::uint64_t variants = std::min<std::uint64_t>(rotation_count(perm), 64);
        for (std::uint64_t rot = 0; rot < variants; ++rot) {
            std::vector<Move> prefix = relabeling_swaps(perm, rot);
            if (prefix.empty()) continue;  // identity handled by the free pass
            WorkSeq work(tour.seq(), n);
            for (const Move& m : prefix) work.apply_n3(m.a, m.b);
            plan = prefix;
            if (work.seq == target) return plan;
            if (free_path_plan(work, target, plan)) return plan;
        }
    }

    // Chains that hand the displaced pair onward cover shapes where swaps and
    // monotone relocation must interleave.
    {
        ChainSearch search{target, n, {}};
        WorkSeq work(tour.seq(), n);
        std::vector<Move> chain;
        plan.clear();
        if (search.run(work, move.a, std::min(n - 1, 6), chain, plan)) return plan;
    }

    if (!signature_matching_exists(src_sig, tgt_sig)) {
        throw InsertionNotDecomposable(
            "no N1/N2/N3 decomposition exists: pair order signatures admit no dominance "
            "matching (N1 preserves signatures, N3 permutes them between pairs, N2 only "
            "decreases components)");
    }
    throw InsertionNotDecomposable(
        "no decomposition found within the searched plan space (signature-guided relabeling, "
        "pair-swap chains, monotone relocation)");
}

std::optional<Move> sample_best_move(const Tour& tour, OperatorKind kind,
                                     const Instance& instance, int k, Rng& rng) {
    std::vector<Move> moves = enumerate_moves(tour, kind);
    if (moves.empty()) return std::nullopt;

    std::vector<std::size_t> chosen;
    if (k <= 0 || static_cast<std::size_t>(k) >= moves.size()) {
        chosen.resize(moves.size());
        for (std::size_t i = 0; i < moves.size(); ++i) chosen[i] = i;
    } else {
        // Partial Fisher-Yates, then restore enumeration order for tie-breaks.
        std::vector<std::size_t> idx(moves.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        chosen.assign(idx.begin(), idx.begin() + k);
        std::sort(chosen.begin(), chosen.end());
    }

    std::size_t best = chosen.front();
    double best_reward = move_reward(tour, moves[best], instance);
    for (std::size_t t = 1; t < chosen.size(); ++t) {
        double r = move_reward(tour, moves[chosen[t]], instance);
        if (r > best_reward) {
            best_reward = r;
            best = chosen[t];
        }
    }
    return moves[best];
}

}  // namespace pdtsp
