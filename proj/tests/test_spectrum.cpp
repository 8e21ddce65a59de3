#include <doctest.h>

#include <cmath>

#include "mfspec/logsum.hpp"
#include "mfspec/pressure.hpp"
#include "mfspec/spectrum.hpp"
#include "support/generators.hpp"

using namespace mfspec;
using mfspec::testing::Gen;

namespace {

ModelSpec quarter() { return make_model({0.5, 0.5}, {{0.25, 0.75}}); }

double beta_at(const ModelSpec& spec, std::vector<double> q) { return beta(spec, q).beta; }

}  // namespace

TEST_CASE("beta examples") {
    const ModelSpec spec = quarter();
    CHECK(beta_at(spec, {0.0}) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(beta_at(spec, {1.0})) < 1e-13);
    CHECK(beta_at(spec, {2.0}) == doctest::Approx(-0.678071905112638).epsilon(1e-12));
    const BetaPoint b0 = beta(spec, std::vector<double>{0.0});
    CHECK(b0.alpha[0] == doctest::Approx(1.207518749639422).epsilon(1e-12));
    CHECK(beta(spec, std::vector<double>{1.0}).alpha[0] == doctest::Approx(0.811278124459133).epsilon(1e-12));
    CHECK(std::abs(b0.residual) < 1e-12);
}

TEST_CASE("property: beta gradient, Hessian and Gibbs weights") {
    Gen g(61);
    for (int trial = 0; trial < 15; ++trial) {
        const int mm = 1 + trial % 2;
        const ModelSpec spec = g.spec(g.integer(2, 4), mm);
        const ModelPotentials pots = build_potentials(spec);
        std::vector<double> q(static_cast<std::size_t>(mm));
        for (double& x : q) x = g.uniform(-3.0, 3.0);
        const BetaPoint bp = beta(spec, q);
        const auto grad = beta_gradient(spec, bp);
        const auto hess = beta_hessian(spec, bp);
        const double h = 1e-5;
        for (std::size_t m = 0; m < q.size(); ++m) {
            auto qp = q, qm = q;
            qp[m] += h;
            qm[m] -= h;
            CHECK(grad[m] < 0.0);
            CHECK(grad[m] == doctest::Approx((beta_at(spec, qp) - beta_at(spec, qm)) / (2 * h)).epsilon(1e-6));
            CHECK(bp.alpha[m] == doctest::Approx(-grad[m]).epsilon(1e-14));
            const auto gp = beta_gradient(spec, beta(spec, qp));
            const auto gm = beta_gradient(spec, beta(spec, qm));
            for (std::size_t l = 0; l < q.size(); ++l) {
                CHECK(hess[l][m] == doctest::Approx((gp[l] - gm[l]) / (2 * h)).epsilon(1e-4));
            }
        }
        // Gibbs consistency: the level map of the Gibbs weights is alpha.
        const auto level = level_map(bp.gibbs_weights, pots);
        for (std::size_t m = 0; m < q.size(); ++m) CHECK(level[m] == doctest::Approx(bp.alpha[m]).epsilon(1e-10));
        // beta(0) is the Moran dimension.
        CHECK(beta_at(spec, std::vector<double>(q.size(), 0.0)) == doctest::Approx(bowen_dimension(spec)).epsilon(1e-10));
    }
}

TEST_CASE("property: beta is convex along random lines") {
    Gen g(62);
    for (int trial = 0; trial < 10; ++trial) {
        const ModelSpec spec = g.spec(3, 2);
        const std::vector<double> a{g.uniform(-2, 2), g.uniform(-2, 2)}, d{g.uniform(-1, 1), g.uniform(-1, 1)};
        std::vector<double> v;
        for (int k = -10; k <= 10; ++k) v.push_back(beta_at(spec, {a[0] + 0.1 * k * d[0], a[1] + 0.1 * k * d[1]}));
        for (std::size_t i = 1; i + 1 < v.size(); ++i) CHECK(v[i - 1] - 2 * v[i] + v[i + 1] >= -1e-10);
    }
}

TEST_CASE("Legendre transform examples") {
    const ModelSpec spec = quarter();
    const LegendreResult peak = legendre(spec, std::vector<double>{1.207518749639422});
    CHECK(peak.f == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(peak.q_star[0]) < 1e-8);
    const LegendreResult at_one = legendre(spec, std::vector<double>{0.811278124459133});
    CHECK(at_one.f == doctest::Approx(0.811278124459133).epsilon(1e-9));
    CHECK(at_one.q_star[0] == doctest::Approx(1.0).epsilon(1e-8));
    const LegendreResult edge = legendre(spec, std::vector<double>{2.0});
    CHECK(edge.status == LegendreStatus::Boundary);
    CHECK(std::abs(edge.f) < 1e-12);
    const LegendreResult outside = legendre(spec, std::vector<double>{0.3});
    CHECK(outside.status == LegendreStatus::Exterior);
    CHECK(outside.f == kNegInf);
    CHECK(legendre(spec, std::vector<double>{0.9}).f == doctest::Approx(0.888475205307).epsilon(1e-10));
}

TEST_CASE("property: duality f(alpha) <= q alpha + beta(q)") {
    Gen g(63);
    for (int trial = 0; trial < 10; ++trial) {
        const ModelSpec spec = g.spec(g.integer(2, 3));
        const auto levels = symbol_levels(spec);
        double lo = 1e9, hi = -1e9;
        for (const auto& v : levels) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        const double alpha = g.uniform(lo, hi);
        const LegendreResult lr = legendre(spec, std::vector<double>{alpha});
        for (int k = 0; k < 20; ++k) {
            const double q = g.uniform(-6.0, 6.0);
            CHECK(lr.f <= q * alpha + beta_at(spec, {q}) + 1e-10);
        }
        CHECK(lr.f <= bowen_dimension(spec) + 1e-12);
    }
}

TEST_CASE("property: two-measure Legendre tangency") {
    Gen g(64);
    for (int trial = 0; trial < 8; ++trial) {
        const ModelSpec spec = g.spec(3, 2);
        const std::vector<double> q{g.uniform(-2, 2), g.uniform(-2, 2)};
        const BetaPoint bp = beta(spec, q);
        const LegendreResult lr = legendre(spec, bp.alpha);
        CHECK(lr.status == LegendreStatus::Interior);
        CHECK(lr.f == doctest::Approx(q[0] * bp.alpha[0] + q[1] * bp.alpha[1] + bp.beta).epsilon(1e-8));
    }
}

TEST_CASE("sup spectrum") {
    const ModelSpec spec = quarter();
    const SupSpectrumResult s = sup_spectrum(spec, TargetBox::interval(0.7, 0.9));
    CHECK(s.value == doctest::Approx(0.888475205307).epsilon(1e-10));
    CHECK(s.argmax[0] == doctest::Approx(0.9));
    CHECK(sup_spectrum(spec, TargetBox::interval(1.0, 1.5)).value == doctest::Approx(1.0).epsilon(1e-12));
    const SupSpectrumResult none = sup_spectrum(spec, TargetBox::interval(0.1, 0.3));
    CHECK_FALSE(none.attainable);
    CHECK(none.value == kNegInf);
    const ModelSpec three = make_model({0.5, 0.3, 0.2}, {{0.2, 0.3, 0.5}, {0.6, 0.3, 0.1}, {0.3, 0.3, 0.4}});
    CHECK_THROWS_AS(sup_spectrum(three, TargetBox({0, 0, 0}, {1, 1, 1})), ValidationError);
}

TEST_CASE("property: sup spectrum agrees with the variational route") {
    Gen g(65);
    for (int trial = 0; trial < 12; ++trial) {
        const ModelSpec spec = g.spec(g.integer(2, 3), 1 + trial % 2);
        const TargetBox box = g.box_in_levels(spec);
        const double sup = sup_spectrum(spec, box).value;
        double var = kNegInf;
        try {
            var = variational_dimension(spec, box, MeasureFamily::Bernoulli).value;
        } catch (const InfeasibleConstraint&) {
        }
        if (sup == kNegInf || var == kNegInf) {
            CHECK(sup == var);
        } else {
            CHECK(std::abs(sup - var) < 1e-4);
        }
        CHECK(box_meets_attainable(spec, box) == (sup != kNegInf));
    }
}

TEST_CASE("spectrum sweep") {
    const ModelSpec spec = quarter();
    std::vector<std::vector<double>> grid;
    for (int k = 0; k < 16; ++k) grid.push_back({0.5 + 0.1 * k});
    const SpectrumCurve c = spectrum_sweep(spec, grid);
    REQUIRE(c.points.size() == 16);
    std::size_t best = 0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        if (c.points[i].f > c.points[best].f) best = i;
    }
    CHECK(c.points[best].alpha[0] == doctest::Approx(1.2));
    CHECK(c.points[best].f == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(c.points.front().f > 0.0);
    CHECK(c.points.back().status == LegendreStatus::Boundary);
    CHECK(std::abs(c.points.back().f) < 1e-12);
    CHECK(spectrum_sweep(spec, {{0.3}}).points[0].f == kNegInf);
}
