#include <doctest.h>

#include <cmath>

#include "mfspec/birkhoff.hpp"
#include "mfspec/cylinder_sum.hpp"
#include "mfspec/logsum.hpp"
#include "support/generators.hpp"

using namespace mfspec;
using mfspec::testing::Gen;

namespace {

ModelSpec uniform() { return make_model({0.5, 0.5}, {{0.5, 0.5}}); }

ObservableTable indicator() { return ObservableTable::from_table(PotentialTable::from_symbol_values({1.0, 0.0})); }

double binary_entropy_bits(double x) { return -(x * std::log(x) + (1 - x) * std::log(1 - x)) / std::log(2.0); }

}  // namespace

TEST_CASE("observable tables") {
    const ObservableTable f = indicator();
    CHECK(f.lip_bound == 1.0);
    CHECK(f.projection_error() == 0.5);
    ObservableTable low = f;
    low.lip_bound = 0.5;
    CHECK_THROWS_AS(low.validate(), ValidationError);
    CHECK_THROWS_AS(ObservableTable::from_table(f.f, 1.5), ValidationError);
}

TEST_CASE("Birkhoff spectrum of an indicator") {
    const ModelSpec spec = uniform();
    const ObservableTable f = indicator();
    const VariationalResult v = erg_spectrum_variational(spec, f, TargetBox::singleton({0.3}), MeasureFamily::Bernoulli);
    CHECK(v.value == doctest::Approx(binary_entropy_bits(0.3)).epsilon(1e-9));
    CHECK(v.level[0] == doctest::Approx(0.3).epsilon(1e-9));
    const VariationalResult m = erg_spectrum_variational(spec, f, TargetBox::singleton({0.3}), MeasureFamily::Markov1);
    CHECK(m.value == doctest::Approx(v.value).epsilon(1e-7));
    MfBowenOptions o;
    o.n_max = 300;
    const auto radii = default_radius_schedule();
    CHECK(std::abs(erg_bowen_shrinking(spec, f, TargetBox::singleton({0.3}), radii, o).extrapolated - v.value) < 2e-2);
    CHECK(std::abs(erg_bowen_shrinking(spec, f, TargetBox::singleton({0.5}), radii, o).extrapolated - 1.0) < 1e-2);
    CHECK(std::abs(erg_bowen_shrinking(spec, f, TargetBox::singleton({0.0}), radii, o).extrapolated) < 1e-2);
    CHECK_THROWS_AS(erg_bowen_fixed(spec, f, TargetBox({0, 0}, {1, 1}), o), ValidationError);
}

TEST_CASE("property: Birkhoff spectrum is the binary entropy curve") {
    Gen g(71);
    for (int trial = 0; trial < 10; ++trial) {
        const double x = g.uniform(0.05, 0.95);
        const double v = erg_spectrum_variational(uniform(), indicator(), TargetBox::singleton({x}),
                                                  MeasureFamily::Bernoulli)
                             .value;
        CHECK(v == doctest::Approx(binary_entropy_bits(x)).epsilon(1e-8));
    }
}

TEST_CASE("property: vacuous ergodic target reproduces the cylinder sum") {
    Gen g(72);
    for (int trial = 0; trial < 10; ++trial) {
        const int n_symbols = g.integer(2, 3);
        const ModelSpec spec = g.spec(n_symbols);
        const ObservableTable f = ObservableTable::from_table(g.table(n_symbols, g.integer(1, 2), -1.0, 1.0));
        const PotentialTable phi = g.table(n_symbols, g.integer(1, 2), -1.0, 1.0);
        for (int n = 1; n <= 8; ++n) {
            CHECK(erg_constrained_coefficient(spec, f, TargetBox::interval(-10.0, 10.0), phi, n) ==
                  cylinder_log_sum(phi, n));
        }
    }
}

TEST_CASE("property: cylinder midpoint vs periodic point") {
    Gen g(73);
    for (int trial = 0; trial < 40; ++trial) {
        const int n_symbols = g.integer(2, 3);
        const double gamma = g.uniform(0.2, 0.8);
        const ObservableTable f = ObservableTable::from_table(g.table(n_symbols, g.integer(1, 4), -1.0, 1.0), gamma);
        std::vector<int> word(static_cast<std::size_t>(g.integer(1, 7)));
        for (int& s : word) s = g.integer(0, n_symbols - 1);
        CHECK(cylinder_periodic_discrepancy(f, word) <= f.lip_bound * gamma / (1.0 - gamma) + 1e-12);
    }
}
