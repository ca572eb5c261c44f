#include "pdtsp/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "pdtsp/errors.hpp"

namespace pdtsp {

namespace {

constexpr char kMagic[8] = {'P', 'D', 'T', 'S', 'P', 'A', 'C', '1'};

void softmax5(const double* logits, std::array<double, 5>& probs) {
    double mx = logits[0];
    for (int i = 1; i < 5; ++i) mx = std::max(mx, logits[i]);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        probs[static_cast<std::size_t>(i)] = std::exp(logits[i] - mx);
        sum += probs[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < 5; ++i) probs[static_cast<std::size_t>(i)] /= sum;
}

void relu_inplace(std::vector<double>& z, std::vector<double>& a, std::size_t off,
                  std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) a[off + i] = z[off + i] > 0.0 ? z[off + i] : 0.0;
}

}  // namespace

ActorCritic::ActorCritic(int width, int history_len) : width_(width), history_len_(history_len) {
    if (width_ < 1 || history_len_ < 0) throw InvalidConfig("bad network dimensions");
    build_layout();
}

ActorCritic::ActorCritic(int width, int history_len, Rng& rng) : ActorCritic(width, history_len) {
    auto init_layer = [&](const Layer& l, bool zero) {
        double bound = zero ? 0.0 : 1.0 / std::sqrt(static_cast<double>(l.in));
        for (std::size_t i = 0; i < static_cast<std::size_t>(l.in) * l.out; ++i)
            params_[l.w_off + i] = zero ? 0.0 : (2.0 * rng.uniform() - 1.0) * bound;
        for (std::size_t i = 0; i < static_cast<std::size_t>(l.out); ++i)
            params_[l.b_off + i] = zero ? 0.0 : (2.0 * rng.uniform() - 1.0) * bound;
    };
    init_layer(enc1_, false);
    init_layer(enc2_, false);
    init_layer(trunk1_, false);
    init_layer(trunk2_, false);
    init_layer(policy_, true);
    init_layer(value_, true);
}

void ActorCritic::build_layout() {
    std::size_t off = 0;
    auto add = [&](int in, int out) {
        Layer l;
        l.in = in;
        l.out = out;
        l.w_off = off;
        off += static_cast<std::size_t>(in) * out;
        l.b_off = off;
        off += static_cast<std::size_t>(out);
        return l;
    };
    enc1_ = add(kNodeFeatureCount, width_);
    enc2_ = add(width_, width_);
    trunk1_ = add(width_ + operator_vector_size(), width_);
    trunk2_ = add(width_, width_);
    policy_ = add(width_, 5);
    value_ = add(width_, 1);
    params_.assign(off, 0.0);
}

void ActorCritic::set_params(const std::vector<double>& p) {
    if (p.size() != params_.size()) throw DimensionMismatch("parameter vector size mismatch");
    params_ = p;
}

void ActorCritic::affine(const Layer& l, const double* x, double* y) const {
    const double* w = params_.data() + l.w_off;
    const double* b = params_.data() + l.b_off;
    for (int o = 0; o < l.out; ++o) {
        double acc = b[o];
        const double* wrow = w + static_cast<std::size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) acc += wrow[i] * x[i];
        y[o] = acc;
    }
}

void ActorCritic::affine_backward(const Layer& l, const double* x, const double* dy, double* dx,
                                  std::vector<double>& grad) const {
    double* gw = grad.data() + l.w_off;
    double* gb = grad.data() + l.b_off;
    const double* w = params_.data() + l.w_off;
    for (int o = 0; o < l.out; ++o) {
        double g = dy[o];
        gb[o] += g;
        double* gwrow = gw + static_cast<std::size_t>(o) * l.in;
        const double* wrow = w + static_cast<std::size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) {
            gwrow[i] += g * x[i];
            if (dx) dx[i] += g * wrow[i];
        }
    }
}

ActorCritic::Forward ActorCritic::forward_cached(const StateFeatures& s, Cache& cache) const {
    if (static_cast<int>(s.operator_vector.size()) != operator_vector_size())
        throw DimensionMismatch("operator vector length mismatch");
    if (s.node_matrix.size() != static_cast<std::size_t>(s.node_count) * kNodeFeatureCount)
        throw DimensionMismatch("node matrix shape mismatch");
    const int rows = s.node_count;
    const std::size_t w = static_cast<std::size_t>(width_);
    cache.rows = rows;
    cache.node_z1.assign(static_cast<std::size_t>(rows) * w, 0.0);
    cache.node_a1.assign(static_cast<std::size_t>(rows) * w, 0.0);
    cache.node_z2.assign(static_cast<std::size_t>(rows) * w, 0.0);
    cache.node_a2.assign(static_cast<std::size_t>(rows) * w, 0.0);
    cache.pooled.assign(w, 0.0);

    for (int r = 0; r < rows; ++r) {
        const double* x = s.node_row(r);
        std::size_t off = static_cast<std::size_t>(r) * w;
        affine(enc1_, x, cache.node_z1.data() + off);
        relu_inplace(cache.node_z1, cache.node_a1, off, w);
        affine(enc2_, cache.node_a1.data() + off, cache.node_z2.data() + off);
        relu_inplace(cache.node_z2, cache.node_a2, off, w);
        for (std::size_t i = 0; i < w; ++i) cache.pooled[i] += cache.node_a2[off + i];
    }
    for (std::size_t i = 0; i < w; ++i) cache.pooled[i] /= rows;

    cache.trunk_in.assign(w + s.operator_vector.size(), 0.0);
    std::copy(cache.pooled.begin(), cache.pooled.end(), cache.trunk_in.begin());
    std::copy(s.operator_vector.begin(), s.operator_vector.end(), cache.trunk_in.begin() + w);

    cache.z3.assign(w, 0.0);
    cache.a3.assign(w, 0.0);
    cache.z4.assign(w, 0.0);
    cache.a4.assign(w, 0.0);
    affine(trunk1_, cache.trunk_in.data(), cache.z3.data());
    relu_inplace(cache.z3, cache.a3, 0, w);
    affine(trunk2_, cache.a3.data(), cache.z4.data());
    relu_inplace(cache.z4, cache.a4, 0, w);

    double logits[5];
    affine(policy_, cache.a4.data(), logits);
    softmax5(logits, cache.probs);
    double v;
    affine(value_, cache.a4.data(), &v);
    cache.value = v;

    Forward out;
    out.probs = cache.probs;
    out.value = v;
    return out;
}

ActorCritic::Forward ActorCritic::forward(const StateFeatures& s) const {
    Cache cache;
    return forward_cached(s, cache);
}

void ActorCritic::backward(const StateFeatures& s, const Cache& cache,
                           const std::array<double, 5>& dlogits, double dvalue,
                           std::vector<double>& grad) const {
    if (grad.size() != params_.size()) throw DimensionMismatch("gradient buffer size mismatch");
    const std::size_t w = static_cast<std::size_t>(width_);

    std::vector<double> da4(w, 0.0);
    affine_backward(policy_, cache.a4.data(), dlogits.data(), da4.data(), grad);
    affine_backward(value_, cache.a4.data(), &dvalue, da4.data(), grad);

    std::vector<double> dz4(w);
    for (std::size_t i = 0; i < w; ++i) dz4[i] = cache.z4[i] > 0.0 ? da4[i] : 0.0;
    std::vector<double> da3(w, 0.0);
    affine_backward(trunk2_, cache.a3.data(), dz4.data(), da3.data(), grad);

    std::vector<double> dz3(w);
    for (std::size_t i = 0; i < w; ++i) dz3[i] = cache.z3[i] > 0.0 ? da3[i] : 0.0;
    std::vector<double> dtrunk_in(cache.trunk_in.size(), 0.0);
    affine_backward(trunk1_, cache.trunk_in.data(), dz3.data(), dtrunk_in.data(), grad);

    // Mean pooling spreads the pooled gradient evenly over node rows.
    std::vector<double> da2(w), dz2(w), da1(w, 0.0), dz1(w);
    for (int r = 0; r < cache.rows; ++r) {
        std::size_t off = static_cast<std::size_t>(r) * w;
        for (std::size_t i = 0; i < w; ++i) da2[i] = dtrunk_in[i] / cache.rows;
        for (std::size_t i = 0; i < w; ++i)
            dz2[i] = cache.node_z2[off + i] > 0.0 ? da2[i] : 0.0;
        std::fill(da1.begin(), da1.end(), 0.0);
        affine_backward(enc2_, cache.node_a1.data() + off, dz2.data(), da1.data(), grad);
        for (std::size_t i = 0; i < w; ++i)
            dz1[i] = cache.node_z1[off + i] > 0.0 ? da1[i] : 0.0;
        affine_backward(enc1_, s.node_row(r), dz1.data(), nullptr, grad);
    }
}

std::vector<double> ActorCritic::grad_logp(const StateFeatures& s, int action) const {
    Cache cache;
    forward_cached(s, cache);
    std::array<double, 5> dlogits{};
    for (int i = 0; i < 5; ++i)
        dlogits[static_cast<std::size_t>(i)] =
            (i == action ? 1.0 : 0.0) - cache.probs[static_cast<std::size_t>(i)];
    std::vector<double> grad(params_.size(), 0.0);
    backward(s, cache, dlogits, 0.0, grad);
    return grad;
}

std::vector<double> ActorCritic::grad_value(const StateFeatures& s) const {
    Cache cache;
    forward_cached(s, cache);
    std::array<double, 5> dlogits{};
    std::vector<double> grad(params_.size(), 0.0);
    backward(s, cache, dlogits, 1.0, grad);
    return grad;
}

void ActorCritic::sgd_step(const std::vector<double>& grad, double lr) {
    if (grad.size() != params_.size()) throw DimensionMismatch("gradient buffer size mismatch");
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= lr * grad[i];
}

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

void write_f64(std::ofstream& out, double d) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

double read_f64(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace

void ActorCritic::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open checkpoint for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, static_cast<std::uint32_t>(width_));
    write_u32(out, static_cast<std::uint32_t>(history_len_));
    write_u32(out, static_cast<std::uint32_t>(params_.size()));
    for (double p : params_) write_f64(out, p);
    if (!out) throw Error("checkpoint write failed: " + path);
}

ActorCritic ActorCritic::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("bad checkpoint header: " + path);
    int width = static_cast<int>(read_u32(in));
    int history = static_cast<int>(read_u32(in));
    std::uint32_t count = read_u32(in);
    ActorCritic net(width, history);
    if (count != net.params_.size()) throw Error("checkpoint parameter count mismatch");
    for (auto& p : net.params_) p = read_f64(in);
    if (!in) throw Error("checkpoint truncated: " + path);
    return net;
}

}  // namespace pdtsp
