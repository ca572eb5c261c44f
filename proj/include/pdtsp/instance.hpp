#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pdtsp/errors.hpp"

namespace pdtsp {

// Node ids: 0 is the depot, 1..n are pickups, n+1..2n deliveries.
using NodeId = int;

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

inline double euclidean_cost(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// A PDTSP instance: n pickup/delivery pairs plus a depot, with a symmetric
// non-negative cost matrix. Instances built from coordinates use Euclidean
// costs; explicit-matrix instances carry no coordinates. Immutable after
// construction, safe to share between threads.
class Instance {
public:
    // Coordinate mode: coords must hold 2n+1 points in id order.
    Instance(int n, std::vector<Point> coords);
    // Explicit-matrix mode: cost must be a symmetric (2n+1)^2 matrix with a
    // zero diagonal, row-major.
    Instance(int n, std::vector<double> cost_matrix);

    int n() const { return n_; }
    int node_count() const { return 2 * n_ + 1; }

    bool has_coords() const { return !coords_.empty(); }
    const Point& coord(NodeId i) const { return coords_[static_cast<std::size_t>(i)]; }

    double cost(NodeId i, NodeId j) const {
        return cost_[static_cast<std::size_t>(i) * static_cast<std::size_t>(node_count()) +
                     static_cast<std::size_t>(j)];
    }

    bool is_pickup(NodeId i) const { return i >= 1 && i <= n_; }
    bool is_delivery(NodeId i) const { return i > n_ && i <= 2 * n_; }

    // Partner of a pickup or delivery node; the depot has none.
    NodeId pair_of(NodeId i) const;

    // Returns a new instance with all coordinates multiplied by lambda.
    Instance scaled(double lambda) const;

    bool operator==(const Instance&) const = default;

private:
    int n_;
    std::vector<Point> coords_;   // empty in matrix mode
    std::vector<double> cost_;    // (2n+1)^2 row-major
};

// 2n+1 points i.i.d. uniform on the unit square, Euclidean costs.
// Deterministic for a fixed (n, seed).
Instance generate_random(int n, std::uint64_t seed);

// Text format, see README. Round trip: parse_instance(serialize_instance(x)) == x.
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& instance);

}  // namespace pdtsp
