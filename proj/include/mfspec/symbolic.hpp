#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfspec/errors.hpp"

namespace mfspec {

/// A finite word over the alphabet {0, ..., N-1}. Symbols are stored as
/// zero-based indices; user-facing output adds one.
class Word {
public:
    Word() = default;
    Word(std::vector<int> symbols, int alphabet_size);

    [[nodiscard]] std::size_t size() const { return symbols_.size(); }
    [[nodiscard]] int operator[](std::size_t i) const { return symbols_[i]; }
    [[nodiscard]] std::span<const int> symbols() const { return symbols_; }

    friend bool operator==(const Word&, const Word&) = default;

private:
    std::vector<int> symbols_;
};

/// Symbol counts (k_1, ..., k_N) of a word together with the log of the
/// number of words sharing them.
struct CompositionClass {
    std::vector<int> counts;
    double log_multiplicity = 0.0;

    [[nodiscard]] int length() const;
};

/// Extremes of S_n phi over all points of a cylinder.
struct BirkhoffRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// A real function on the full shift that only looks at the first `depth`
/// symbols, stored as N^depth values in lexicographic word order.
class PotentialTable {
public:
    PotentialTable() = default;
    PotentialTable(int alphabet_size, int depth, std::vector<double> values);

    /// Depth-1 table from one value per symbol.
    static PotentialTable from_symbol_values(std::vector<double> values);
    /// Same function re-expressed as a table of larger depth.
    [[nodiscard]] PotentialTable lifted(int new_depth) const;

    [[nodiscard]] int alphabet_size() const { return alphabet_size_; }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    /// Value on the cylinder spelled by the first `depth` entries of `window`.
    [[nodiscard]] double at(std::span<const int> window) const;
    [[nodiscard]] double at_index(std::size_t index) const { return values_[index]; }

    [[nodiscard]] double min_value() const;
    [[nodiscard]] double max_value() const;

    /// Largest spread of the table among arguments sharing a prefix of
    /// length `prefix` (prefix = 0 is the full range).
    [[nodiscard]] double oscillation(int prefix) const;

    /// t * table, same depth.
    [[nodiscard]] PotentialTable scaled(double t) const;

    friend bool operator==(const PotentialTable&, const PotentialTable&) = default;

private:
    int alphabet_size_ = 0;
    int depth_ = 0;
    std::vector<double> values_;
};

/// a * x + b * y pointwise; the result takes the larger depth.
PotentialTable combine(double a, const PotentialTable& x, double b, const PotentialTable& y);

/// Odometer over all words of a fixed length, lexicographic order.
class WordOdometer {
public:
    WordOdometer(int length, int alphabet_size);

    [[nodiscard]] std::span<const int> current() const { return digits_; }
    /// Advances; returns false once every word has been visited.
    bool next();

private:
    std::vector<int> digits_;
    int alphabet_size_;
};

/// Odometer over all compositions of n into N non-negative parts, in reverse
/// lexicographic order of the counts: (n,0,...,0) first, (0,...,0,n) last.
class CompositionOdometer {
public:
    CompositionOdometer(int n, int alphabet_size);

    [[nodiscard]] std::span<const int> current() const { return counts_; }
    bool next();

private:
    std::vector<int> counts_;
    int total_;
};

/// N^n, saturating at UINT64_MAX.
std::uint64_t word_count(int n, int alphabet_size);

/// Number of compositions C(n+N-1, N-1), saturating.
std::uint64_t composition_count(int n, int alphabet_size);

/// log(n! / (k_1! ... k_N!)); exact integer arithmetic when n <= 20.
double log_multinomial(std::span<const int> counts);

/// n! / (k_1! ... k_N!) for n <= 20.
std::uint64_t multinomial_exact(std::span<const int> counts);

/// Throws BudgetExceeded unless N^n fits within the budget.
void require_word_budget(int n, int alphabet_size, std::uint64_t budget);

std::vector<Word> enumerate_words(int n, int alphabet_size, std::uint64_t budget = kDefaultBudget);

std::vector<CompositionClass> enumerate_compositions(int n, int alphabet_size);

/// Exact min and max of S_n phi over the cylinder [w], obtained by
/// enumerating the N^(k-1) tails that a depth-k table can see.
BirkhoffRange cylinder_birkhoff_range(const PotentialTable& phi, std::span<const int> word,
                                      std::uint64_t budget = kDefaultBudget);

/// S_n phi at the periodic point www..., summed in the same order as
/// cylinder_birkhoff_range so the value matches its tail bit for bit.
double periodic_birkhoff_sum(const PotentialTable& phi, std::span<const int> word);

/// Sequential S_n phi over the first n windows of an extended word whose
/// length is at least n + depth - 1.
double birkhoff_sum_prefix(const PotentialTable& phi, std::span<const int> extended, int n);

}  // namespace mfspec
