#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "pdtsp/features.hpp"
#include "pdtsp/instance.hpp"
#include "pdtsp/net.hpp"
#include "pdtsp/tour.hpp"

using namespace pdtsp;

namespace {

StateFeatures random_state(int n, std::uint64_t seed, int history_len) {
    Instance inst = generate_random(n, seed);
    Rng rng(seed);
    Tour t = random_tour(n, rng);
    EpisodeHistory h;
    h.history_len = history_len;
    h.episode_length = 40;
    h.record(2, 0.3, true, 0.0);
    h.record(4, -0.1, false, 0.1);
    return extract_features(t, inst, h);
}

std::vector<double> random_params(const ActorCritic& net, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> p(net.param_count());
    for (auto& v : p) v = rng.uniform() - 0.5;
    return p;
}

}  // namespace

TEST_CASE("feature extraction layout") {
    Instance inst = generate_random(1, 13);
    Tour t = canonical_initial(1, {1});
    EpisodeHistory h;
    h.history_len = 4;
    h.episode_length = 10;
    StateFeatures s = extract_features(t, inst, h);

    CHECK(s.node_count == 3);
    CHECK(s.node_matrix.size() == 3 * 12);
    const double* depot = s.node_row(0);
    CHECK(depot[2] == 1.0);
    CHECK(depot[3] == 0.0);
    CHECK(depot[4] == 0.0);
    CHECK(depot[11] == 0.0);
    // Depot predecessor is the last node (2), successor the first (1).
    CHECK(depot[5] == inst.coord(2).x);
    CHECK(depot[7] == inst.coord(1).x);
    CHECK(depot[9] == doctest::Approx(inst.cost(2, 0)));
    CHECK(depot[10] == doctest::Approx(inst.cost(0, 1)));

    const double* pickup = s.node_row(1);
    CHECK(pickup[3] == 1.0);
    CHECK(pickup[4] == 0.0);
    CHECK(pickup[11] == doctest::Approx(0.5));  // position 1 of 2
    CHECK(pickup[9] == doctest::Approx(inst.cost(0, 1)));
    CHECK(pickup[10] == doctest::Approx(inst.cost(1, 2)));

    const double* delivery = s.node_row(2);
    CHECK(delivery[4] == 1.0);
    CHECK(delivery[11] == doctest::Approx(1.0));
}

TEST_CASE("operator vector layout and history") {
    Instance inst = generate_random(2, 14);
    Tour t = canonical_initial(2, {1, 2});

    EpisodeHistory fresh;
    fresh.history_len = 4;
    fresh.episode_length = 20;
    StateFeatures s0 = extract_features(t, inst, fresh);
    CHECK(s0.operator_vector.size() == 11);
    for (double v : s0.operator_vector) CHECK(v == 0.0);

    // One improving step of value delta.
    EpisodeHistory h = fresh;
    double delta = 0.25;
    h.record(3, delta, true, 0.0);
    StateFeatures s1 = extract_features(t, inst, h);
    CHECK(s1.operator_vector[0] == doctest::Approx(delta));
    CHECK(s1.operator_vector[2] == 0.0);  // steps_since_improvement reset
    CHECK(s1.operator_vector[3] == doctest::Approx(3.0 / 5.0));
    CHECK(s1.operator_vector[4] == doctest::Approx(delta));
    CHECK(s1.operator_vector[5] == 0.0);  // older slots still padded

    // A non-improving step bumps the counter and shifts history.
    h.record(1, -0.05, false, 0.05);
    StateFeatures s2 = extract_features(t, inst, h);
    CHECK(s2.operator_vector[2] == doctest::Approx(1.0 / 20.0));
    CHECK(s2.operator_vector[3] == doctest::Approx(1.0 / 5.0));
    CHECK(s2.operator_vector[5] == doctest::Approx(3.0 / 5.0));

    // History is capped at H entries.
    for (int i = 0; i < 10; ++i) h.record(0, 0.0, false, 0.05);
    CHECK(h.recent.size() == 4);
}

TEST_CASE("matrix-mode instances still produce features") {
    std::vector<double> cost = {0, 1, 2, 1, 0, 4, 2, 4, 0};
    Instance inst(1, cost);
    Tour t = canonical_initial(1, {1});
    EpisodeHistory h;
    StateFeatures s = extract_features(t, inst, h);
    CHECK(s.node_row(1)[0] == 0.0);  // no coordinates
    CHECK(s.node_row(1)[9] == doctest::Approx(1.0));
    CHECK(s.node_row(1)[10] == doctest::Approx(4.0));
}

TEST_CASE("fresh net outputs the uniform policy and zero value") {
    Rng rng(3);
    ActorCritic net(32, 4, rng);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        StateFeatures s = random_state(3, seed, 4);
        auto out = net.forward(s);
        for (double p : out.probs) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(out.value == 0.0);
    }
}

TEST_CASE("softmax normalization") {
    Rng rng(4);
    ActorCritic net(16, 4, rng);
    net.set_params(random_params(net, 5));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        StateFeatures s = random_state(4, seed, 4);
        auto out = net.forward(s);
        double sum = 0.0;
        for (double p : out.probs) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(6);
    ActorCritic net(16, 4, rng);
    const double step = 1e-5;
    double worst = 0.0;

    for (int probe = 0; probe < 20; ++probe) {
        net.set_params(random_params(net, 100 + static_cast<std::uint64_t>(probe)));
        StateFeatures s = random_state(3, 500 + static_cast<std::uint64_t>(probe), 4);
        int action = probe % 5;

        std::vector<double> analytic_logp = net.grad_logp(s, action);
        std::vector<double> analytic_value = net.grad_value(s);

        // Probe a deterministic subset of parameter indices.
        Rng pick(1000 + static_cast<std::uint64_t>(probe));
        std::vector<double> base = net.params();
        for (int t = 0; t < 60; ++t) {
            std::size_t idx = pick.below(base.size());
            std::vector<double> up = base, down = base;
            up[idx] += step;
            down[idx] -= step;

            net.set_params(up);
            auto fu = net.forward(s);
            net.set_params(down);
            auto fd = net.forward(s);
            net.set_params(base);

            double fd_logp = (std::log(fu.probs[static_cast<std::size_t>(action)]) -
                              std::log(fd.probs[static_cast<std::size_t>(action)])) /
                             (2 * step);
            double fd_value = (fu.value - fd.value) / (2 * step);

            double rel_logp = std::abs(analytic_logp[idx] - fd_logp) /
                              std::max({std::abs(analytic_logp[idx]), std::abs(fd_logp), 1e-6});
            double rel_value = std::abs(analytic_value[idx] - fd_value) /
                               std::max({std::abs(analytic_value[idx]), std::abs(fd_value), 1e-6});
            worst = std::max({worst, rel_logp, rel_value});
        }
    }
    CHECK(worst <= 1e-4);
    MESSAGE("max relative gradient error: " << worst);
}

TEST_CASE("parameter count is a function of width and history") {
    Rng rng(9);
    ActorCritic a(16, 4, rng);
    ActorCritic b(16, 4, rng);
    CHECK(a.param_count() == b.param_count());
    ActorCritic c(32, 4, rng);
    CHECK(c.param_count() > a.param_count());
    ActorCritic d(16, 6, rng);
    CHECK(d.param_count() == a.param_count() + 4 * 16);  // 4 extra trunk inputs
}

TEST_CASE("checkpoint round trip") {
    Rng rng(10);
    ActorCritic net(24, 4, rng);
    net.set_params(random_params(net, 11));

    std::string path = "checkpoint_test.bin";
    net.save(path);
    ActorCritic back = ActorCritic::load(path);
    CHECK(back.width() == net.width());
    CHECK(back.history_len() == net.history_len());
    CHECK(back.params() == net.params());
    std::remove(path.c_str());

    CHECK_THROWS_AS(ActorCritic::load("does_not_exist.bin"), Error);
}

TEST_CASE("dimension mismatches are rejected") {
    Rng rng(12);
    ActorCritic net(16, 4, rng);
    StateFeatures s = random_state(3, 1, 6);  // wrong history length
    CHECK_THROWS_AS(net.forward(s), DimensionMismatch);
    std::vector<double> wrong(net.param_count() + 1, 0.0);
    CHECK_THROWS_AS(net.set_params(wrong), DimensionMismatch);
}
