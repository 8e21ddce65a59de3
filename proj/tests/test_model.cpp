#include <doctest.h>

#include <cmath>
#include <string>

#include "mfspec/model.hpp"
#include "support/generators.hpp"

using namespace mfspec;
using mfspec::testing::Gen;

namespace {

std::string validation_message(const ModelSpec& spec) {
    try {
        spec.validate();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("model validation names the invariant") {
    ModelSpec s;
    s.alphabet_size = 2;
    s.ratios = {1.2, 0.5};
    s.measures = {{0.5, 0.5}};
    CHECK(validation_message(s).find("ratio out of (0,1)") != std::string::npos);
    s.ratios = {0.5, 0.5};
    s.measures = {{0.0, 1.0}};
    CHECK(validation_message(s).find("probability must be strictly positive") != std::string::npos);
    s.measures = {{0.4, 0.5}};
    CHECK(validation_message(s).find("sums to") != std::string::npos);
    s.alphabet_size = 1;
    CHECK(validation_message(s).find("alphabet size N must be at least 2") != std::string::npos);
    CHECK_NOTHROW(make_model({0.5, 0.25}, {{0.25, 0.75}}));
}

TEST_CASE("explicit tables") {
    ModelSpec s = make_model({0.5, 0.5}, {{0.25, 0.75}});
    s.scaling_table = PotentialTable(2, 2, {-0.7, -0.6, -0.7, 0.1});
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.scaling_table = PotentialTable(2, 2, {-0.7, -0.6, -0.7, -0.1});
    CHECK_NOTHROW(s.validate());
    CHECK(build_potentials(s).depth() == 2);
    CHECK(build_potentials(s).measures[0].depth() == 1);
    s.potential_depth = 3;
    CHECK(build_potentials(s).measures[0].depth() == 3);
}

TEST_CASE("target boxes") {
    CHECK_THROWS_AS(TargetBox({1.0}, {0.0}), ValidationError);
    CHECK_THROWS_AS(TargetBox({0.0}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(TargetBox({0.0}, {1.0}, -0.1), ValidationError);
    const TargetBox s = TargetBox::singleton({0.5});
    CHECK(s.is_singleton());
    CHECK(s.contains(std::vector<double>{0.5 + 1e-13}));
    CHECK_FALSE(s.contains(std::vector<double>{0.5 + 1e-9}));
    const TargetBox d = s.dilate(0.1);
    CHECK_FALSE(d.is_singleton());
    CHECK(d.lo(0) == doctest::Approx(0.4));
    CHECK(d.distance(std::vector<double>{0.7}) == doctest::Approx(0.1));
    CHECK(d.contains(std::vector<double>{0.45}, std::vector<double>{0.55}));
    CHECK_FALSE(d.contains(std::vector<double>{0.45}, std::vector<double>{0.65}));
}

TEST_CASE("property: dilation is associative") {
    Gen g(21);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = g.uniform(-1.0, 1.0);
        const TargetBox box({a}, {a + g.uniform(0.0, 1.0)});
        const double r1 = g.uniform(0.0, 0.3), r2 = g.uniform(0.0, 0.3);
        CHECK(box.dilate(r1).dilate(r2) == box.dilate(r1 + r2));
        CHECK(box.dilate(0.0) == box);
    }
}

TEST_CASE("measures, entropy and level map") {
    const ProductMeasureWeights uniform({0.25, 0.25, 0.25, 0.25});
    CHECK(entropy(uniform) == doctest::Approx(std::log(4.0)));
    const ModelSpec spec = make_model({0.5, 0.5}, {{0.25, 0.75}});
    const ModelPotentials pots = build_potentials(spec);
    const ProductMeasureWeights p({0.25, 0.75});
    const double expected = (0.25 * std::log(0.25) + 0.75 * std::log(0.75)) / std::log(0.5);
    CHECK(level_map(p, pots)[0] == doctest::Approx(expected).epsilon(1e-14));

    const MarkovWeights iid({{0.25, 0.75}, {0.25, 0.75}});
    CHECK(iid.stationary()[0] == doctest::Approx(0.25));
    CHECK(entropy(iid) == doctest::Approx(entropy(p)));
    CHECK(level_map(iid, pots)[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("property: Markov measures from edge marginals") {
    Gen g(22);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = g.integer(2, 4);
        std::vector<std::vector<double>> p;
        for (int i = 0; i < n; ++i) p.push_back(g.simplex(n));
        const MarkovWeights mu(p);
        const auto& pi = mu.stationary();
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            double flow = 0.0;
            for (int i = 0; i < n; ++i) flow += pi[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            CHECK(flow == doctest::Approx(pi[static_cast<std::size_t>(j)]).epsilon(1e-10));
            total += pi[static_cast<std::size_t>(j)];
        }
        CHECK(total == doctest::Approx(1.0));
        std::vector<std::vector<double>> edge(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
        for (std::size_t i = 0; i < edge.size(); ++i) {
            for (std::size_t j = 0; j < edge.size(); ++j) edge[i][j] = pi[i] * p[i][j];
        }
        const MarkovWeights back = MarkovWeights::from_edge_measure(edge);
        CHECK(entropy(back) == doctest::Approx(entropy(mu)).epsilon(1e-10));
        CHECK(entropy(mu) <= std::log(static_cast<double>(n)) + 1e-12);
    }
}
