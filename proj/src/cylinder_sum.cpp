#include "mfspec/cylinder_sum.hpp"

#include <algorithm>

#include "mfspec/logsum.hpp"

namespace mfspec {

namespace {

double class_term(const PotentialTable& phi, std::span<const int> counts, double log_mult) {
    double s = log_mult;
    for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i] * phi.at_index(i);
    return s;
}

}  // namespace

double composition_log_sum(const PotentialTable& phi, int n, const CompositionFilter* filter) {
    if (phi.depth() != 1) throw DepthUnsupported("composition aggregation requires a depth-1 potential");
    if (n < 1) throw ValidationError("word length must be at least 1");
    const int alphabet = phi.alphabet_size();

    double shift = kNegInf;
    {
        CompositionOdometer odo(n, alphabet);
        do {
            shift = std::max(shift, class_term(phi, odo.current(), log_multinomial(odo.current())));
        } while (odo.next());
    }

    ShiftedLogSum acc(shift);
    CompositionOdometer odo(n, alphabet);
    do {
        const auto counts = odo.current();
        if (filter == nullptr || (*filter)(counts)) acc.add(class_term(phi, counts, log_multinomial(counts)));
    } while (odo.next());
    return acc.value();
}

double word_log_sum(const PotentialTable& phi, int n, const WordFilter* filter, std::uint64_t budget) {
    if (n < 1) throw ValidationError("word length must be at least 1");
    const int alphabet = phi.alphabet_size();
    require_word_budget(n, alphabet, budget);

    ShiftedLogSum acc(static_cast<double>(n) * phi.max_value());
    WordOdometer odo(n, alphabet);
    do {
        const auto word = odo.current();
        if (filter == nullptr || (*filter)(word)) acc.add(cylinder_birkhoff_range(phi, word, budget).hi);
    } while (odo.next());
    return acc.value();
}

double cylinder_log_sum(const PotentialTable& phi, int n, std::uint64_t budget) {
    if (phi.depth() == 1) return composition_log_sum(phi, n, nullptr);
    return word_log_sum(phi, n, nullptr, budget);
}

}  // namespace mfspec
