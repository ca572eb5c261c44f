#include "pdtsp/verify.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "pdtsp/exact.hpp"
#include "pdtsp/instance.hpp"
#include "pdtsp/operators.hpp"
#include "pdtsp/rng.hpp"
#include "pdtsp/tour.hpp"

namespace pdtsp {

namespace {

constexpr OperatorKind kAllKinds[kPolicyKindCount] = {
    OperatorKind::N1, OperatorKind::N2, OperatorKind::N3, OperatorKind::B1, OperatorKind::B2};

struct Session {
    VerifyOptions options;
    VerifyReport report;
    std::map<int, Instance> instances;

    const Instance& instance_for(int n) {
        auto it = instances.find(n);
        if (it == instances.end())
            it = instances.emplace(n, generate_random(n, options.seed + n)).first;
        return it->second;
    }
};

// Brute-force ground truth for small n: filter all (2n)! permutations.
long count_by_permutation_filter(int n) {
    std::vector<NodeId> perm(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
    long count = 0;
    do {
        if (is_feasible_sequence(perm, n)) ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

void check_counting(Session& s) {
    PropResult r{"3.1 tour counting", 0, 0, ""};
    std::string note;
    int max_n = s.options.full ? 4 : 3;
    for (int n = 1; n <= max_n; ++n) {
        ++r.cases;
        std::vector<Tour> tours = enumerate_feasible(n);
        std::vector<std::vector<NodeId>> seqs;
        seqs.reserve(tours.size());
        for (const Tour& t : tours) seqs.push_back(t.seq());
        std::sort(seqs.begin(), seqs.end());
        bool distinct = std::adjacent_find(seqs.begin(), seqs.end()) == seqs.end();
        BigUint expected = count_feasible(n);
        bool count_ok = expected.fits_u64() && expected.as_u64() == tours.size();
        bool filter_ok = n > 3 || count_by_permutation_filter(n) == static_cast<long>(tours.size());
        bool valid = true;
        for (const Tour& t : tours) valid = valid && is_feasible_sequence(t.seq(), n);
        if (!(distinct && count_ok && filter_ok && valid)) ++r.failures;
        if (!note.empty()) note += ", ";
        note += "n=" + std::to_string(n) + ": " + std::to_string(tours.size());
    }
    r.note = note;
    s.report.props.push_back(r);
}

bool blocks_well_formed(const Tour& tour) {
    std::vector<Block> blocks = maximal_blocks(tour);
    if (blocks.empty() || blocks.front().kind != Block::Kind::Pickup) return false;
    int expected_start = 1;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].start != expected_start || blocks[i].size() < 1) return false;
        if (i > 0 && blocks[i].kind == blocks[i - 1].kind) return false;  // maximality
        for (int p = blocks[i].start; p <= blocks[i].end; ++p) {
            bool pickup = tour.is_pickup(tour.at(p));
            if (pickup != (blocks[i].kind == Block::Kind::Pickup)) return false;
        }
        expected_start = blocks[i].end + 1;
    }
    return expected_start == tour.length() + 1;
}

bool block_precedence_holds(const Tour& tour) {
    std::vector<Block> blocks = maximal_blocks(tour);
    auto block_index = [&](int pos) {
        for (std::size_t k = 0; k < blocks.size(); ++k)
            if (pos >= blocks[k].start && pos <= blocks[k].end) return k;
        return blocks.size();
    };
    for (int i = 1; i <= tour.n(); ++i) {
        if (block_index(tour.pos(i)) >= block_index(tour.pos(tour.n() + i))) return false;
    }
    return true;
}

void check_blocks(Session& s) {
    PropResult decomposition{"3.2/3.3 block decomposition", 0, 0, ""};
    PropResult precedence{"3.4 block precedence", 0, 0, ""};
    for (int n = 1; n <= 3; ++n) {
        for (const Tour& t : enumerate_feasible(n)) {
            ++decomposition.cases;
            if (!blocks_well_formed(t)) ++decomposition.failures;
            ++precedence.cases;
            if (!block_precedence_holds(t)) ++precedence.failures;
        }
    }
    if (s.options.full) {
        Rng rng = Rng::substream(s.options.seed, 0xb10c, 0);
        for (int t = 0; t < 1000; ++t) {
            int n = 4 + static_cast<int>(rng.below(12));
            Tour tour = random_tour(n, rng);
            ++decomposition.cases;
            if (!blocks_well_formed(tour)) ++decomposition.failures;
            ++precedence.cases;
            if (!block_precedence_holds(tour)) ++precedence.failures;
        }
    }
    s.report.props.push_back(decomposition);
    s.report.props.push_back(precedence);
}

void check_initial(Session& s) {
    PropResult r{"4.1 initial tour construction", 0, 0, ""};
    for (int n = 1; n <= 3; ++n) {
        std::vector<NodeId> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
        do {
            ++r.cases;
            Tour t = canonical_initial(n, order);
            bool ok = is_feasible_sequence(t.seq(), n);
            for (int i = 1; i <= n; ++i) ok = ok && t.pos(i) == t.pos(n + i) - 1;
            if (!ok) ++r.failures;
        } while (std::next_permutation(order.begin(), order.end()));
    }
    if (s.options.full) {
        Rng rng = Rng::substream(s.options.seed, 0x1417, 0);
        for (int t = 0; t < 1000; ++t) {
            int n = 4 + static_cast<int>(rng.below(12));
            std::vector<NodeId> order(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
            rng.shuffle(order);
            ++r.cases;
            Tour tour = canonical_initial(n, order);
            bool ok = is_feasible_sequence(tour.seq(), n);
            for (int i = 1; i <= n; ++i) ok = ok && tour.pos(i) == tour.pos(n + i) - 1;
            if (!ok) ++r.failures;
        }
    }
    s.report.props.push_back(r);
}

const char* kind_prop_id(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::N1: return "4.2 N1 feasibility";
        case OperatorKind::N2: return "4.3 N2 feasibility";
        case OperatorKind::N3: return "4.4 N3 feasibility";
        case OperatorKind::B1: return "4.6 B1 feasibility";
        case OperatorKind::B2: return "4.7 B2 feasibility";
        default: return "?";
    }
}

void check_operator_feasibility(Session& s) {
    for (OperatorKind kind : kAllKinds) {
        PropResult r{kind_prop_id(kind), 0, 0, ""};
        for (int n = 1; n <= 3; ++n) {
            const Instance& inst = s.instance_for(n);
            for (const Tour& t : enumerate_feasible(n)) {
                if (kind == OperatorKind::N2 && s.options.inject_n2_fault) {
                    // Flipped precondition: swap a pickup with a later delivery.
                    for (int a = 1; a <= t.length(); ++a) {
                        if (!t.is_pickup(t.at(a))) continue;
                        for (int b = a + 1; b <= t.length(); ++b) {
                            if (!t.is_delivery(t.at(b))) continue;
                            ++r.cases;
                            std::vector<NodeId> seq = t.seq();
                            std::swap(seq[static_cast<std::size_t>(a - 1)],
                                      seq[static_cast<std::size_t>(b - 1)]);
                            if (!is_feasible_sequence(seq, n)) ++r.failures;
                        }
                    }
                    continue;
                }
                for (const Move& mv : enumerate_moves(t, kind)) {
                    ++r.cases;
                    auto [next, reward] = apply_move(t, mv, inst);
                    (void)reward;
                    if (!is_feasible_sequence(next.seq(), n)) ++r.failures;
                }
            }
        }
        if (s.options.full) {
            Rng rng = Rng::substream(s.options.seed, 0xf022 + static_cast<int>(kind), 0);
            int done = 0;
            while (done < 10000) {
                int n = 4 + static_cast<int>(rng.below(12));
                const Instance& inst = s.instance_for(n);
                Tour tour = random_tour(n, rng);
                std::vector<Move> moves = enumerate_moves(tour, kind);
                if (moves.empty()) continue;
                const Move& mv = moves[rng.below(moves.size())];
                ++r.cases;
                ++done;
                auto [next, reward] = apply_move(tour, mv, inst);
                (void)reward;
                if (!is_feasible_sequence(next.seq(), n)) ++r.failures;
            }
        }
        s.report.props.push_back(r);
    }
}

// Executes a decomposition through apply_move and compares sequences.
bool composition_matches(const Tour& tour, const std::vector<Move>& plan,
                         const std::vector<NodeId>& target, const Instance& inst) {
    Tour cur = tour;
    for (const Move& mv : plan) {
        auto [next, reward] = apply_move(cur, mv, inst);
        (void)reward;
        cur = std::move(next);
    }
    return cur.seq() == target;
}

void check_insertion_equivalence(Session& s) {
    PropResult r{"4.5 insertion decomposition", 0, 0, ""};
    long impossible = 0;
    long unresolved = 0;

    auto run_case = [&](const Tour& tour, const Move& mv, const Instance& inst) {
        ++r.cases;
        std::vector<NodeId> target = apply_insertion(tour, mv, inst).first.seq();
        bool certified =
            !signature_matching_exists(pair_order_signature(tour.seq(), tour.n()),
                                       pair_order_signature(target, tour.n()));
        try {
            std::vector<Move> plan = insertion_as_exchanges(tour, mv);
            if (!composition_matches(tour, plan, target, inst) || certified) ++r.failures;
        } catch (const InsertionNotDecomposable&) {
            if (certified)
                ++impossible;
            else
                ++unresolved;
        }
    };

    // Exhaustive at n = 2: every tour and every insertion move.
    const Instance& inst2 = s.instance_for(2);
    for (const Tour& t : enumerate_feasible(2)) {
        for (NodeId i = 1; i <= 2; ++i)
            for (int p = 1; p <= 4; ++p)
                for (int d = p + 1; d <= 4; ++d) run_case(t, Move::insertion(i, p, d), inst2);
    }
    if (s.options.full) {
        Rng rng = Rng::substream(s.options.seed, 0x1e57, 0);
        for (int t = 0; t < 500; ++t) {
            int n = 2 + static_cast<int>(rng.below(7));  // 2..8
            const Instance& inst = s.instance_for(n);
            Tour tour = random_tour(n, rng);
            NodeId i = rng.range(1, n);
            int p = rng.range(1, 2 * n);
            int d = rng.range(1, 2 * n - 1);
            if (d >= p) ++d;
            if (p > d) std::swap(p, d);
            run_case(tour, Move::insertion(i, p, d), inst);
        }
    }
    r.note = "not decomposable (certified): " + std::to_string(impossible) +
             ", unresolved: " + std::to_string(unresolved);
    s.report.props.push_back(r);
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
    Session s;
    s.options = options;
    check_counting(s);
    check_blocks(s);
    check_initial(s);
    check_operator_feasibility(s);
    check_insertion_equivalence(s);
    return s.report;
}

std::string format_report(const VerifyReport& report) {
    std::ostringstream out;
    for (const auto& p : report.props) {
        out << (p.failures == 0 ? "[ ok ]" : "[FAIL]") << ' ' << p.id << ": " << p.cases
            << " cases, " << p.failures << " failures";
        if (!p.note.empty()) out << " (" << p.note << ")";
        out << '\n';
    }
    out << (report.ok() ? "verification passed" : "verification FAILED") << '\n';
    return out.str();
}

}  // namespace pdtsp
