#pragma once

// Small hand-rolled generators for property tests. Every generator draws from
// one seeded engine so a failing case is reproduced by its seed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <random>
#include <vector>

#include "mfspec/model.hpp"
#include "mfspec/spectrum.hpp"

namespace mfspec::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    /// Probability vector with every entry at least `floor`.
    std::vector<double> simplex(int n, double floor = 0.05) {
        std::vector<double> raw(static_cast<std::size_t>(n));
        double total = 0.0;
        for (double& x : raw) {
            x = uniform(0.0, 1.0);
            total += x;
        }
        for (double& x : raw) x = floor + (1.0 - n * floor) * x / total;
        return raw;
    }

    /// Ratios in [0.1, 0.6]; the sum may exceed 1 (overlaps are allowed by
    /// the symbolic model).
    std::vector<double> ratios(int n) {
        std::vector<double> r(static_cast<std::size_t>(n));
        for (double& x : r) x = uniform(0.1, 0.6);
        return r;
    }

    ModelSpec spec(int n, int measures = 1) {
        std::vector<std::vector<double>> ps;
        for (int m = 0; m < measures; ++m) ps.push_back(simplex(n));
        return make_model(ratios(n), std::move(ps));
    }

    PotentialTable table(int n, int depth, double lo, double hi) {
        std::size_t size = 1;
        for (int d = 0; d < depth; ++d) size *= static_cast<std::size_t>(n);
        std::vector<double> v(size);
        for (double& x : v) x = uniform(lo, hi);
        return PotentialTable(n, depth, std::move(v));
    }

    /// Depth-2 model: the depth-1 logs plus a perturbation of size `eps` that
    /// depends on the next symbol.
    ModelSpec depth2_spec(int n, double eps) {
        ModelSpec spec = this->spec(n);
        std::vector<double> lam, phi;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                lam.push_back(std::log(spec.ratios[static_cast<std::size_t>(i)]) + uniform(-eps, eps));
                phi.push_back(std::log(spec.measures[0][static_cast<std::size_t>(i)]) + uniform(-eps, eps));
            }
        }
        spec.scaling_table = PotentialTable(n, 2, std::move(lam));
        spec.measure_tables = {PotentialTable(n, 2, std::move(phi))};
        spec.validate();
        return spec;
    }

    /// Box inside the range of the level map, sometimes a singleton.
    TargetBox box_in_levels(const ModelSpec& spec) {
        const auto [a, b] = level_bounds(spec);
        std::vector<double> lo, hi;
        for (std::size_t m = 0; m < a.size(); ++m) {
            double x = uniform(a[m], b[m]), y = uniform(a[m], b[m]);
            if (x > y) std::swap(x, y);
            if (integer(0, 4) == 0) y = x;
            lo.push_back(x);
            hi.push_back(y);
        }
        return TargetBox(lo, hi);
    }

    /// Per-coordinate bounds of the level map: the extremes of the cell
    /// ratios Phi_m / Lambda, which bound every ratio of Birkhoff sums.
    static std::pair<std::vector<double>, std::vector<double>> level_bounds(const ModelSpec& spec) {
        const ModelPotentials pots = build_potentials(spec);
        const int depth = pots.depth();
        const PotentialTable lam = pots.scaling.lifted(depth);
        std::vector<double> lo, hi;
        for (const auto& phi_m : pots.measures) {
            const PotentialTable phi = phi_m.lifted(depth);
            double a = std::numeric_limits<double>::infinity(), b = -a;
            for (std::size_t c = 0; c < lam.values().size(); ++c) {
                const double v = phi.at_index(c) / lam.at_index(c);
                a = std::min(a, v);
                b = std::max(b, v);
            }
            lo.push_back(a);
            hi.push_back(b);
        }
        return {lo, hi};
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double relative_gap(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace mfspec::testing
