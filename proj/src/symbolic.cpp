#include "mfspec/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mfspec {

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a * b;
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

}  // namespace

Word::Word(std::vector<int> symbols, int alphabet_size) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw ValidationError("word must have positive length");
    for (int s : symbols_) {
        if (s < 0 || s >= alphabet_size) {
            throw ValidationError("word symbol " + std::to_string(s + 1) + " outside alphabet of size " +
                                  std::to_string(alphabet_size));
        }
    }
}

int CompositionClass::length() const { return std::accumulate(counts.begin(), counts.end(), 0); }

PotentialTable::PotentialTable(int alphabet_size, int depth, std::vector<double> values)
    : alphabet_size_(alphabet_size), depth_(depth), values_(std::move(values)) {
    if (alphabet_size_ < 1) throw ValidationError("alphabet size must be positive");
    if (depth_ < 1) throw ValidationError("potential depth must be at least 1");
    if (word_count(depth_, alphabet_size_) != values_.size()) {
        throw ValidationError("potential table of depth " + std::to_string(depth_) + " needs N^depth = " +
                              std::to_string(word_count(depth_, alphabet_size_)) + " values, got " +
                              std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw ValidationError("potential table entries must be finite");
    }
}

PotentialTable PotentialTable::from_symbol_values(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return PotentialTable(n, 1, std::move(values));
}

PotentialTable PotentialTable::lifted(int new_depth) const {
    if (new_depth < depth_) throw DepthUnsupported("cannot lower the depth of a potential table");
    if (new_depth == depth_) return *this;
    const std::size_t stride = word_count(new_depth - depth_, alphabet_size_);
    std::vector<double> out(values_.size() * stride);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i / stride];
    return PotentialTable(alphabet_size_, new_depth, std::move(out));
}

double PotentialTable::at(std::span<const int> window) const {
    std::size_t index = 0;
    for (int j = 0; j < depth_; ++j) {
        index = index * static_cast<std::size_t>(alphabet_size_) + static_cast<std::size_t>(window[j]);
    }
    return values_[index];
}

double PotentialTable::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double PotentialTable::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double PotentialTable::oscillation(int prefix) const {
    if (prefix >= depth_) return 0.0;
    const std::size_t block = word_count(depth_ - prefix, alphabet_size_);
    double worst = 0.0;
    for (std::size_t start = 0; start < values_.size(); start += block) {
        auto first = values_.begin() + static_cast<std::ptrdiff_t>(start);
        auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(block));
        worst = std::max(worst, *hi - *lo);
    }
    return worst;
}

PotentialTable PotentialTable::scaled(double t) const {
    std::vector<double> out(values_);
    for (double& v : out) v *= t;
    return PotentialTable(alphabet_size_, depth_, std::move(out));
}

PotentialTable combine(double a, const PotentialTable& x, double b, const PotentialTable& y) {
    if (x.alphabet_size() != y.alphabet_size()) throw ValidationError("alphabet sizes differ");
    const int depth = std::max(x.depth(), y.depth());
    const PotentialTable xl = x.lifted(depth);
    const PotentialTable yl = y.lifted(depth);
    std::vector<double> out(xl.values().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * xl.at_index(i) + b * yl.at_index(i);
    return PotentialTable(x.alphabet_size(), depth, std::move(out));
}

WordOdometer::WordOdometer(int length, int alphabet_size)
    : digits_(static_cast<std::size_t>(length), 0), alphabet_size_(alphabet_size) {}

bool WordOdometer::next() {
    for (auto i = static_cast<std::ptrdiff_t>(digits_.size()) - 1; i >= 0; --i) {
        if (++digits_[static_cast<std::size_t>(i)] < alphabet_size_) return true;
        digits_[static_cast<std::size_t>(i)] = 0;
    }
    return false;
}

CompositionOdometer::CompositionOdometer(int n, int alphabet_size)
    : counts_(static_cast<std::size_t>(alphabet_size), 0), total_(n) {
    counts_[0] = n;
}

bool CompositionOdometer::next() {
    const std::size_t last_index = counts_.size() - 1;
    if (last_index == 0) return false;
    const int last = counts_[last_index];
    counts_[last_index] = 0;
    for (auto i = static_cast<std::ptrdiff_t>(last_index) - 1; i >= 0; --i) {
        auto u = static_cast<std::size_t>(i);
        if (counts_[u] > 0) {
            --counts_[u];
            counts_[u + 1] = last + 1;
            return true;
        }
    }
    counts_[last_index] = total_;
    return false;
}

std::uint64_t word_count(int n, int alphabet_size) {
    std::uint64_t count = 1;
    for (int i = 0; i < n; ++i) count = saturating_mul(count, static_cast<std::uint64_t>(alphabet_size));
    return count;
}

std::uint64_t composition_count(int n, int alphabet_size) {
    // C(n + N - 1, N - 1) by the multiplicative formula; exact while it fits.
    std::uint64_t result = 1;
    const auto k = static_cast<std::uint64_t>(alphabet_size - 1);
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t factor = static_cast<std::uint64_t>(n) + i;
        const std::uint64_t next = saturating_mul(result, factor);
        if (next == std::numeric_limits<std::uint64_t>::max()) return next;
        result = next / i;
    }
    return result;
}

std::uint64_t multinomial_exact(std::span<const int> counts) {
    std::uint64_t result = 1;
    std::uint64_t running = 0;
    for (int k : counts) {
        running += static_cast<std::uint64_t>(k);
        if (running > 20) throw ValidationError("exact multinomial limited to n <= 20");
        result *= binomial_u64(running, static_cast<std::uint64_t>(k));
    }
    return result;
}

double log_multinomial(std::span<const int> counts) {
    const int n = std::accumulate(counts.begin(), counts.end(), 0);
    if (n <= 20) return std::log(static_cast<double>(multinomial_exact(counts)));
    double value = std::lgamma(static_cast<double>(n) + 1.0);
    for (int k : counts) value -= std::lgamma(static_cast<double>(k) + 1.0);
    return std::max(value, 0.0);
}

void require_word_budget(int n, int alphabet_size, std::uint64_t budget) {
    const std::uint64_t count = word_count(n, alphabet_size);
    if (count > budget) {
        throw BudgetExceeded("enumerating " + std::to_string(alphabet_size) + "^" + std::to_string(n) +
                             " words exceeds the budget of " + std::to_string(budget) +
                             "; use composition aggregation");
    }
}

std::vector<Word> enumerate_words(int n, int alphabet_size, std::uint64_t budget) {
    if (n < 1) throw ValidationError("word length must be at least 1");
    require_word_budget(n, alphabet_size, budget);
    std::vector<Word> out;
    out.reserve(word_count(n, alphabet_size));
    WordOdometer odo(n, alphabet_size);
    do {
        out.emplace_back(std::vector<int>(odo.current().begin(), odo.current().end()), alphabet_size);
    } while (odo.next());
    return out;
}

std::vector<CompositionClass> enumerate_compositions(int n, int alphabet_size) {
    if (n < 1) throw ValidationError("composition length must be at least 1");
    if (alphabet_size < 2) throw ValidationError("alphabet size must be at least 2");
    std::vector<CompositionClass> out;
    CompositionOdometer odo(n, alphabet_size);
    do {
        std::vector<int> counts(odo.current().begin(), odo.current().end());
        const double lm = log_multinomial(counts);
        out.push_back({std::move(counts), lm});
    } while (odo.next());
    return out;
}

double birkhoff_sum_prefix(const PotentialTable& phi, std::span<const int> extended, int n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += phi.at(extended.subspan(static_cast<std::size_t>(j)));
    return s;
}

BirkhoffRange cylinder_birkhoff_range(const PotentialTable& phi, std::span<const int> word,
                                      std::uint64_t budget) {
    const int n = static_cast<int>(word.size());
    if (n < 1) throw ValidationError("cylinder word must have positive length");
    const int k = phi.depth();
    const int tail_len = k - 1;
    if (word_count(tail_len, phi.alphabet_size()) > budget) {
        throw DepthExceedsBudget("depth-" + std::to_string(k) + " table needs " +
                                 std::to_string(phi.alphabet_size()) + "^" + std::to_string(tail_len) +
                                 " tails, beyond the budget");
    }

    std::vector<int> extended(word.begin(), word.end());
    extended.resize(static_cast<std::size_t>(n + tail_len), 0);

    // Windows starting at j <= n - k lie inside the word.
    const int fixed = std::max(0, n - k + 1);
    double head = 0.0;
    for (int j = 0; j < fixed; ++j) head += phi.at(std::span<const int>(extended).subspan(static_cast<std::size_t>(j)));
    if (tail_len == 0) return {head, head};

    BirkhoffRange range{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    WordOdometer tails(tail_len, phi.alphabet_size());
    do {
        std::copy(tails.current().begin(), tails.current().end(), extended.begin() + n);
        double s = head;
        for (int j = fixed; j < n; ++j) s += phi.at(std::span<const int>(extended).subspan(static_cast<std::size_t>(j)));
        range.lo = std::min(range.lo, s);
        range.hi = std::max(range.hi, s);
    } while (tails.next());
    return range;
}

double periodic_birkhoff_sum(const PotentialTable& phi, std::span<const int> word) {
    const int n = static_cast<int>(word.size());
    if (n < 1) throw ValidationError("periodic word must have positive length");
    const int k = phi.depth();
    std::vector<int> extended(static_cast<std::size_t>(n + k - 1));
    for (std::size_t i = 0; i < extended.size(); ++i) extended[i] = word[i % static_cast<std::size_t>(n)];
    return birkhoff_sum_prefix(phi, extended, n);
}

}  // namespace mfspec
