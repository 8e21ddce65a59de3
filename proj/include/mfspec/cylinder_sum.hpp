#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "mfspec/symbolic.hpp"

namespace mfspec {

/// Admits a composition class (symbol counts) into a cylinder sum.
using CompositionFilter = std::function<bool(std::span<const int> counts)>;
/// Admits a word into a cylinder sum.
using WordFilter = std::function<bool(std::span<const int> word)>;

/// log sum_{|i|=n, admitted} sup_{u in [i]} exp S_n phi(u) for a depth-1 phi,
/// aggregated over composition classes. A null filter admits everything.
///
/// The accumulation shift is the largest unfiltered term, so the result is
/// monotone in the admitted set and equals the unfiltered sum bit for bit
/// when every class is admitted.
double composition_log_sum(const PotentialTable& phi, int n, const CompositionFilter* filter);

/// Same sum by literal enumeration of words; phi may have any depth.
double word_log_sum(const PotentialTable& phi, int n, const WordFilter* filter,
                    std::uint64_t budget = kDefaultBudget);

/// Dispatches to composition aggregation for depth-1 phi and to word
/// enumeration otherwise (no filter).
double cylinder_log_sum(const PotentialTable& phi, int n, std::uint64_t budget = kDefaultBudget);

}  // namespace mfspec
