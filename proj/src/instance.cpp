#include "pdtsp/instance.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "pdtsp/rng.hpp"

namespace pdtsp {

namespace {

constexpr double kSymmetryTol = 1e-9;

std::vector<double> euclidean_matrix(int n, const std::vector<Point>& coords) {
    const int m = 2 * n + 1;
    std::vector<double> cost(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            double d = euclidean_cost(coords[static_cast<std::size_t>(i)],
                                      coords[static_cast<std::size_t>(j)]);
            cost[static_cast<std::size_t>(i) * m + j] = d;
            cost[static_cast<std::size_t>(j) * m + i] = d;
        }
    }
    return cost;
}

// Full-precision double that survives a parse round trip.
void append_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

Instance::Instance(int n, std::vector<Point> coords) : n_(n), coords_(std::move(coords)) {
    if (n_ < 1) throw InvalidSize("pair count must be at least 1");
    if (coords_.size() != static_cast<std::size_t>(node_count()))
        throw DimensionError("expected " + std::to_string(node_count()) + " coordinates, got " +
                             std::to_string(coords_.size()));
    cost_ = euclidean_matrix(n_, coords_);
}

Instance::Instance(int n, std::vector<double> cost_matrix) : n_(n), cost_(std::move(cost_matrix)) {
    if (n_ < 1) throw InvalidSize("pair count must be at least 1");
    const int m = node_count();
    if (cost_.size() != static_cast<std::size_t>(m) * m)
        throw DimensionError("cost matrix must be (2n+1)^2");
    for (int i = 0; i < m; ++i) {
        if (cost(i, i) != 0.0) throw DimensionError("cost diagonal must be zero");
        for (int j = 0; j < m; ++j) {
            if (cost(i, j) < 0.0) throw DimensionError("costs must be non-negative");
            if (std::abs(cost(i, j) - cost(j, i)) > kSymmetryTol)
                throw DimensionError("cost matrix must be symmetric");
        }
    }
}

NodeId Instance::pair_of(NodeId i) const {
    if (i == 0) throw DepotHasNoPair("node 0 is the depot");
    if (i < 0 || i > 2 * n_) throw DimensionError("node id out of range");
    return i <= n_ ? i + n_ : i - n_;
}

Instance Instance::scaled(double lambda) const {
    if (has_coords()) {
        std::vector<Point> scaled_coords(coords_.size());
        for (std::size_t i = 0; i < coords_.size(); ++i)
            scaled_coords[i] = {coords_[i].x * lambda, coords_[i].y * lambda};
        return Instance(n_, std::move(scaled_coords));
    }
    std::vector<double> scaled_cost(cost_.size());
    for (std::size_t i = 0; i < cost_.size(); ++i) scaled_cost[i] = cost_[i] * lambda;
    return Instance(n_, std::move(scaled_cost));
}

Instance generate_random(int n, std::uint64_t seed) {
    if (n < 1) throw InvalidSize("pair count must be at least 1");
    Rng rng = Rng::substream(seed, 0x696e7374u, static_cast<std::uint64_t>(n));
    std::vector<Point> coords(static_cast<std::size_t>(2 * n + 1));
    for (auto& p : coords) {
        p.x = rng.uniform();
        p.y = rng.uniform();
    }
    return Instance(n, std::move(coords));
}

Instance parse_instance(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    // Reads the next line that is not blank or a comment.
    auto next_line = [&](std::string& out) {
        while (std::getline(in, raw)) {
            ++line_no;
            std::size_t start = raw.find_first_not_of(" \t\r");
            if (start == std::string::npos) continue;
            if (raw[start] == '#') continue;
            out = raw.substr(start);
            return true;
        }
        return false;
    };

    std::string line;
    if (!next_line(line)) throw ParseError(line_no, "empty file");
    std::istringstream header(line);
    std::string tag;
    int n = 0;
    if (!(header >> tag >> n) || tag != "PDTSP")
        throw ParseError(line_no, "expected header 'PDTSP <n>'");
    if (n < 1) throw ParseError(line_no, "pair count must be at least 1");

    if (!next_line(line)) throw ParseError(line_no, "missing MODE line");
    std::istringstream mode_line(line);
    std::string mode_tag, mode;
    if (!(mode_line >> mode_tag >> mode) || mode_tag != "MODE" ||
        (mode != "COORDS" && mode != "MATRIX"))
        throw ParseError(line_no, "expected 'MODE COORDS' or 'MODE MATRIX'");

    const int m = 2 * n + 1;
    if (mode == "COORDS") {
        std::vector<Point> coords(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            if (!next_line(line))
                throw ParseError(line_no, "expected " + std::to_string(m) + " coordinate lines");
            std::istringstream row(line);
            int id;
            Point p;
            if (!(row >> id >> p.x >> p.y)) throw ParseError(line_no, "malformed coordinate line");
            if (id != i) throw ParseError(line_no, "expected node id " + std::to_string(i));
            std::string rest;
            if (row >> rest) throw ParseError(line_no, "trailing tokens on coordinate line");
            coords[static_cast<std::size_t>(i)] = p;
        }
        if (next_line(line)) throw ParseError(line_no, "unexpected extra line");
        return Instance(n, std::move(coords));
    }

    std::vector<double> cost(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        if (!next_line(line))
            throw ParseError(line_no, "expected " + std::to_string(m) + " matrix rows");
        std::istringstream row(line);
        for (int j = 0; j < m; ++j) {
            if (!(row >> cost[static_cast<std::size_t>(i) * m + j]))
                throw ParseError(line_no, "matrix row needs " + std::to_string(m) + " entries");
        }
        std::string rest;
        if (row >> rest) throw ParseError(line_no, "trailing tokens on matrix row");
    }
    if (next_line(line)) throw ParseError(line_no, "unexpected extra line");
    const int header_lines = line_no;
    try {
        return Instance(n, std::move(cost));
    } catch (const DimensionError& e) {
        throw ParseError(header_lines, e.what());
    }
}

std::string serialize_instance(const Instance& instance) {
    std::string out;
    out += "PDTSP " + std::to_string(instance.n()) + "\n";
    if (instance.has_coords()) {
        out += "MODE COORDS\n";
        for (int i = 0; i < instance.node_count(); ++i) {
            out += std::to_string(i);
            out += ' ';
            append_double(out, instance.coord(i).x);
            out += ' ';
            append_double(out, instance.coord(i).y);
            out += '\n';
        }
    } else {
        out += "MODE MATRIX\n";
        for (int i = 0; i < instance.node_count(); ++i) {
            for (int j = 0; j < instance.node_count(); ++j) {
                if (j) out += ' ';
                append_double(out, instance.cost(i, j));
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace pdtsp
