#include <doctest.h>

#include <cmath>
#include <map>

#include "mfspec/symbolic.hpp"
#include "support/generators.hpp"

using namespace mfspec;
using mfspec::testing::Gen;

TEST_CASE("word and composition counts") {
    CHECK(word_count(10, 2) == 1024);
    CHECK(word_count(64, 2) == UINT64_MAX);
    CHECK(composition_count(10, 2) == 11);
    CHECK(composition_count(5, 3) == 21);
    const std::vector<int> counts{3, 7};
    CHECK(multinomial_exact(counts) == 120);
    CHECK(log_multinomial(counts) == std::log(120.0));
    CHECK_THROWS_AS(multinomial_exact(std::vector<int>{11, 10}), ValidationError);
}

TEST_CASE("budget guard") {
    CHECK_NOTHROW(require_word_budget(10, 2, 1024));
    CHECK_THROWS_AS(require_word_budget(11, 2, 1024), BudgetExceeded);
    CHECK_THROWS_AS(enumerate_words(30, 3), BudgetExceeded);
}

TEST_CASE("word validation") {
    CHECK_THROWS_AS(Word({}, 2), ValidationError);
    CHECK_THROWS_AS(Word({0, 2}, 2), ValidationError);
    const Word w({1, 0, 1}, 2);
    CHECK(w.size() == 3);
    CHECK(w[0] == 1);
}

TEST_CASE("word odometer is lexicographic and complete") {
    WordOdometer odo(3, 3);
    std::vector<std::vector<int>> seen;
    do {
        seen.emplace_back(odo.current().begin(), odo.current().end());
    } while (odo.next());
    REQUIRE(seen.size() == 27);
    CHECK(seen.front() == std::vector<int>{0, 0, 0});
    CHECK(seen[1] == std::vector<int>{0, 0, 1});
    CHECK(seen.back() == std::vector<int>{2, 2, 2});
    CHECK(std::is_sorted(seen.begin(), seen.end()));
}

TEST_CASE("property: compositions partition the words") {
    Gen g(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = g.integer(1, 9);
        const int alphabet = g.integer(2, 4);
        double total = 0.0;
        std::size_t classes = 0;
        for (const auto& c : enumerate_compositions(n, alphabet)) {
            CHECK(c.length() == n);
            total += std::exp(c.log_multiplicity);
            ++classes;
        }
        CHECK(classes == composition_count(n, alphabet));
        CHECK(total == doctest::Approx(static_cast<double>(word_count(n, alphabet))).epsilon(1e-12));

        std::map<std::vector<int>, int> histogram;
        for (const auto& w : enumerate_words(n, alphabet)) {
            std::vector<int> counts(static_cast<std::size_t>(alphabet), 0);
            for (int s : w.symbols()) ++counts[static_cast<std::size_t>(s)];
            ++histogram[counts];
        }
        CHECK(histogram.size() == classes);
    }
}

TEST_CASE("potential table construction and access") {
    CHECK_THROWS_AS(PotentialTable(2, 2, {1.0, 2.0, 3.0}), ValidationError);
    CHECK_THROWS_AS(PotentialTable(2, 0, {}), ValidationError);
    CHECK_THROWS_AS(PotentialTable(2, 1, {1.0, NAN}), ValidationError);
    const PotentialTable t(2, 2, {0.0, 1.0, 2.0, 3.0});
    CHECK(t.at(std::vector<int>{1, 0}) == 2.0);
    CHECK(t.at(std::vector<int>{0, 1, 1, 1}) == 1.0);
    CHECK(t.min_value() == 0.0);
    CHECK(t.max_value() == 3.0);
    CHECK(t.oscillation(0) == 3.0);
    CHECK(t.oscillation(1) == 1.0);
    CHECK(t.scaled(2.0).at_index(3) == 6.0);
    CHECK_THROWS_AS((void)t.lifted(1), DepthUnsupported);
}

TEST_CASE("property: lifting keeps the function") {
    Gen g(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int alphabet = g.integer(2, 3);
        const PotentialTable t = g.table(alphabet, g.integer(1, 2), -1.0, 1.0);
        const PotentialTable up = t.lifted(3);
        CHECK(up.depth() == 3);
        for (const auto& w : enumerate_words(3, alphabet)) CHECK(up.at(w.symbols()) == t.at(w.symbols()));
        CHECK(up.oscillation(t.depth()) == 0.0);
    }
}

TEST_CASE("combine takes the larger depth") {
    const PotentialTable a = PotentialTable::from_symbol_values({1.0, 2.0});
    const PotentialTable b(2, 2, {0.0, 1.0, 2.0, 3.0});
    const PotentialTable c = combine(2.0, a, -1.0, b);
    CHECK(c.depth() == 2);
    CHECK(c.at(std::vector<int>{1, 1}) == 1.0);
}

TEST_CASE("cylinder ranges") {
    const PotentialTable d1 = PotentialTable::from_symbol_values({-1.0, -2.0});
    const std::vector<int> w{0, 1, 1};
    const BirkhoffRange r = cylinder_birkhoff_range(d1, w);
    CHECK(r.lo == -5.0);
    CHECK(r.hi == -5.0);
    CHECK(periodic_birkhoff_sum(d1, w) == -5.0);

    const PotentialTable d2(2, 2, {0.0, 1.0, 10.0, 100.0});
    const BirkhoffRange r2 = cylinder_birkhoff_range(d2, std::vector<int>{0, 1});
    CHECK(r2.lo == 11.0);
    CHECK(r2.hi == 101.0);
    CHECK(periodic_birkhoff_sum(d2, std::vector<int>{0, 1}) == 11.0);
}

TEST_CASE("property: periodic sum lies in the cylinder range") {
    Gen g(13);
    for (int trial = 0; trial < 40; ++trial) {
        const int alphabet = g.integer(2, 3);
        const PotentialTable t = g.table(alphabet, g.integer(1, 3), -2.0, 2.0);
        std::vector<int> word(static_cast<std::size_t>(g.integer(1, 6)));
        for (int& s : word) s = g.integer(0, alphabet - 1);
        const BirkhoffRange r = cylinder_birkhoff_range(t, word);
        const double p = periodic_birkhoff_sum(t, word);
        CHECK(r.lo <= p);
        CHECK(p <= r.hi);
        CHECK(r.hi - r.lo <= t.oscillation(1) * static_cast<double>(t.depth()) + 1e-12);
    }
}
