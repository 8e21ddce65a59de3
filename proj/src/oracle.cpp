#include "mfspec/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "mfspec/logsum.hpp"
#include "mfspec/spectrum.hpp"

namespace mfspec {

namespace {

// S_n g at the point word + tail (+ anything), windows read off directly.
double sum_with_tail(const PotentialTable& g, const std::vector<int>& word, const std::vector<int>& tail) {
    const int n = static_cast<int>(word.size());
    const int k = g.depth();
    auto symbol = [&](int pos) { return pos < n ? word[static_cast<std::size_t>(pos)] : tail[static_cast<std::size_t>(pos - n)]; };
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        std::vector<int> window;
        for (int t = 0; t < k; ++t) window.push_back(symbol(j + t));
        s += g.at(window);
    }
    return s;
}

std::vector<std::vector<int>> all_words(int length, int alphabet) {
    std::vector<std::vector<int>> out{{}};
    for (int l = 0; l < length; ++l) {
        std::vector<std::vector<int>> next;
        for (const auto& w : out) {
            for (int a = 0; a < alphabet; ++a) {
                auto v = w;
                v.push_back(a);
                next.push_back(std::move(v));
            }
        }
        out = std::move(next);
    }
    return out;
}

double relative(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

double brute_constrained_sum(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target, int n,
                             ConstraintMode mode, std::uint64_t budget) {
    if (n < 1) throw ValidationError("word length must be at least 1");
    const ModelPotentials pots = build_potentials(spec);
    const int alphabet = spec.alphabet_size;
    require_word_budget(n, alphabet, budget);
    int tail_len = std::max(phi.depth(), pots.depth()) - 1;
    const auto tails = all_words(tail_len, alphabet);
    const std::size_t mm = pots.measures.size();

    LogSumExp acc;
    for (const auto& word : all_words(n, alphabet)) {
        std::vector<double> lo(mm, std::numeric_limits<double>::infinity());
        std::vector<double> hi(mm, -std::numeric_limits<double>::infinity());
        auto take = [&](const std::vector<int>& tail) {
            const double den = sum_with_tail(pots.scaling, word, tail);
            for (std::size_t m = 0; m < mm; ++m) {
                const double v = sum_with_tail(pots.measures[m], word, tail) / den;
                lo[m] = std::min(lo[m], v);
                hi[m] = std::max(hi[m], v);
            }
        };
        if (mode == ConstraintMode::M) {
            std::vector<int> periodic;
            for (int i = 0; i < tail_len; ++i) periodic.push_back(word[static_cast<std::size_t>(i % n)]);
            take(periodic);
        } else {
            for (const auto& t : tails) take(t);
        }
        if (!target.contains(lo, hi)) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& t : tails) best = std::max(best, sum_with_tail(phi, word, t));
        acc.add(best);
    }
    return acc.value();
}

double default_grid_step(int alphabet_size) { return alphabet_size <= 2 ? 1e-3 : 2e-3; }

BruteVariational brute_variational(const ModelSpec& spec, const TargetBox& target, const PotentialTable* phi,
                                   double grid_step) {
    const int n = spec.alphabet_size;
    if (n < 2 || n > 3) throw ValidationError("brute_variational scans N = 2 or 3 only");
    const ModelPotentials pots = build_potentials(spec);
    if (pots.depth() != 1 || (phi != nullptr && phi->depth() != 1)) {
        throw DepthUnsupported("brute_variational scans depth-1 potentials");
    }
    if (grid_step <= 0.0) grid_step = default_grid_step(n);
    const int steps = static_cast<int>(std::llround(1.0 / grid_step));
    const std::size_t mm = pots.measures.size();
    BruteVariational out;
    out.value = kNegInf;

    auto visit = [&](const std::vector<double>& w) {
        double lam = 0.0, h = 0.0;
        for (int i = 0; i < n; ++i) {
            lam += w[static_cast<std::size_t>(i)] * pots.scaling.at_index(static_cast<std::size_t>(i));
            if (w[static_cast<std::size_t>(i)] > 0.0) h -= w[static_cast<std::size_t>(i)] * std::log(w[static_cast<std::size_t>(i)]);
        }
        double dist = 0.0;
        for (std::size_t m = 0; m < mm; ++m) {
            double num = 0.0;
            for (int i = 0; i < n; ++i) num += w[static_cast<std::size_t>(i)] * pots.measures[m].at_index(static_cast<std::size_t>(i));
            const double level = num / lam;
            // d level / d w_i = (Phi_i - level Lambda_i) / lam; a grid move
            // shifts weight between two symbols.
            double gmin = std::numeric_limits<double>::infinity(), gmax = -gmin;
            for (int i = 0; i < n; ++i) {
                const double g = (pots.measures[m].at_index(static_cast<std::size_t>(i)) -
                                  level * pots.scaling.at_index(static_cast<std::size_t>(i))) / lam;
                gmin = std::min(gmin, g);
                gmax = std::max(gmax, g);
            }
            // Only coordinates thinner than the grid resolution are widened.
            double tol = grid_step * (gmax - gmin);
            if (target.hi(m) - target.lo(m) >= tol) tol = 0.0;
            const double excess = std::max(target.lo(m) - level, level - target.hi(m));
            dist = std::max(dist, excess - tol);
        }
        if (dist > 0.0) return;
        double value = -h / lam;
        if (phi != nullptr) {
            value = h;
            for (int i = 0; i < n; ++i) value += w[static_cast<std::size_t>(i)] * phi->at_index(static_cast<std::size_t>(i));
        }
        if (!out.feasible || value > out.value) {
            out.value = value;
            out.weights = w;
            out.feasible = true;
        }
    };
    if (n == 2) {
        for (int a = 0; a <= steps; ++a) {
            const double x = static_cast<double>(a) / steps;
            visit({x, 1.0 - x});
        }
    } else {
        for (int a = 0; a <= steps; ++a) {
            for (int b = 0; a + b <= steps; ++b) {
                const double x = static_cast<double>(a) / steps;
                const double y = static_cast<double>(b) / steps;
                visit({x, y, std::max(0.0, 1.0 - x - y)});
            }
        }
    }
    return out;
}

OracleReport compare_constrained_sum(const ModelSpec& spec, const PotentialTable& phi, const TargetBox& target, int n,
                                     ConstraintMode mode, std::uint64_t budget) {
    OracleReport r;
    r.quantity = std::string("constrained_coefficient mode=") + (mode == ConstraintMode::L ? "L" : "M");
    r.n = n;
    r.naive = brute_constrained_sum(spec, phi, target, n, mode, budget);
    r.fast = constrained_coefficient(spec, phi, target, n, mode, budget);
    r.infeasible = r.naive == kNegInf;
    if (r.naive == r.fast) return r;
    r.abs_deviation = std::abs(r.naive - r.fast);
    r.rel_deviation = relative(r.naive, r.fast);
    return r;
}

OracleReport compare_variational(const ModelSpec& spec, const TargetBox& target, const PotentialTable* phi,
                                 double grid_step) {
    OracleReport r;
    r.quantity = phi == nullptr ? "variational dimension" : "variational pressure";
    r.grid_step = grid_step > 0.0 ? grid_step : default_grid_step(spec.alphabet_size);
    const BruteVariational naive = brute_variational(spec, target, phi, r.grid_step);
    r.naive = naive.value;
    try {
        r.fast = phi == nullptr ? variational_dimension(spec, target, MeasureFamily::Bernoulli).value
                                : variational_solve(spec, target, *phi, MeasureFamily::Bernoulli).value;
    } catch (const InfeasibleConstraint&) {
        r.fast = kNegInf;
    }
    r.infeasible = !naive.feasible;
    if (r.naive == r.fast) return r;
    r.abs_deviation = std::abs(r.naive - r.fast);
    r.rel_deviation = relative(r.naive, r.fast);
    return r;
}

}  // namespace mfspec
