#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfspec/symbolic.hpp"

namespace mfspec {

/// A self-similar IFS S_1..S_N with contraction ratios r_i and M probability
/// vectors p_m attached to it.
///
/// The scaling potential and measure potentials are the depth-1 tables
/// log r_i and log p_{m,i} unless explicit tables are supplied; explicit
/// tables let callers study level maps of larger depth (e.g. perturbed
/// scalings that depend on the next symbol as well).
struct ModelSpec {
    std::string label;
    int alphabet_size = 0;
    std::vector<double> ratios;
    std::vector<std::vector<double>> measures;
    int potential_depth = 1;
    std::optional<PotentialTable> scaling_table;
    std::vector<PotentialTable> measure_tables;

    [[nodiscard]] int measure_count() const { return static_cast<int>(measures.size()); }
    /// True when the level map is the closed-form depth-1 one.
    [[nodiscard]] bool is_self_similar() const { return !scaling_table && measure_tables.empty(); }

    /// Throws ValidationError naming the violated invariant.
    void validate() const;
};

/// Convenience constructor for the common single-measure model.
ModelSpec make_model(std::vector<double> ratios, std::vector<std::vector<double>> measures,
                     std::string label = {});

/// Scaling potential Lambda and measure potentials Phi_1..Phi_M.
struct ModelPotentials {
    PotentialTable scaling;
    std::vector<PotentialTable> measures;

    /// Depth of the joint level map (largest table depth).
    [[nodiscard]] int depth() const;
};

ModelPotentials build_potentials(const ModelSpec& spec);

/// Closed axis-aligned box in R^M, optionally dilated by a sup-norm radius.
///
/// The dilation radius is kept separately from the core box so that
/// dilating by r1 then r2 is the same value as dilating by r1 + r2.
class TargetBox {
public:
    TargetBox() = default;
    TargetBox(std::vector<double> lo, std::vector<double> hi, double radius = 0.0);

    static TargetBox singleton(std::vector<double> point);
    static TargetBox interval(double lo, double hi);

    [[nodiscard]] std::size_t dimension() const { return lo_.size(); }
    [[nodiscard]] const std::vector<double>& core_lo() const { return lo_; }
    [[nodiscard]] const std::vector<double>& core_hi() const { return hi_; }
    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] double lo(std::size_t m) const { return lo_[m] - radius_; }
    [[nodiscard]] double hi(std::size_t m) const { return hi_[m] + radius_; }
    [[nodiscard]] bool is_singleton() const;

    [[nodiscard]] TargetBox dilate(double r) const;
    [[nodiscard]] bool contains(std::span<const double> point) const;
    /// Full inclusion of the interval box prod [lo_m, hi_m].
    [[nodiscard]] bool contains(std::span<const double> lo, std::span<const double> hi) const;
    /// Sup-norm distance from a point to the box.
    [[nodiscard]] double distance(std::span<const double> point) const;

    friend bool operator==(const TargetBox&, const TargetBox&) = default;

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
    double radius_ = 0.0;
};

/// Bernoulli (product) measure with weights w_i.
class ProductMeasureWeights {
public:
    explicit ProductMeasureWeights(std::vector<double> weights);
    [[nodiscard]] const std::vector<double>& weights() const { return w_; }
    [[nodiscard]] int alphabet_size() const { return static_cast<int>(w_.size()); }

private:
    std::vector<double> w_;
};

/// Stationary memory-1 Markov measure.
class MarkovWeights {
public:
    /// Row-stochastic N x N matrix (row-major); the stationary vector is
    /// solved for, or taken from `stationary` when given.
    MarkovWeights(std::vector<std::vector<double>> transition,
                  std::optional<std::vector<double>> stationary = std::nullopt);

    /// From the two-symbol marginal Q_ij = pi_i P_ij of a shift-invariant
    /// measure (rows with zero mass get uniform transitions).
    static MarkovWeights from_edge_measure(const std::vector<std::vector<double>>& edge);

    [[nodiscard]] const std::vector<std::vector<double>>& transition() const { return p_; }
    [[nodiscard]] const std::vector<double>& stationary() const { return pi_; }
    [[nodiscard]] int alphabet_size() const { return static_cast<int>(pi_.size()); }

private:
    std::vector<std::vector<double>> p_;
    std::vector<double> pi_;
};

/// Binary/Shannon entropy in nats, 0 log 0 = 0.
double entropy(const ProductMeasureWeights& mu);
double entropy(const MarkovWeights& mu);

double integrate(const ProductMeasureWeights& mu, const PotentialTable& phi);
/// Exact for depth <= 2; DepthUnsupported beyond.
double integrate(const MarkovWeights& mu, const PotentialTable& phi);

/// (int Phi_m dmu / int Lambda dmu)_m.
std::vector<double> level_map(const ProductMeasureWeights& mu, const ModelPotentials& pots);
std::vector<double> level_map(const MarkovWeights& mu, const ModelPotentials& pots);

}  // namespace mfspec
