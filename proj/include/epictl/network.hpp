#pragma once

#include <span>
#include <vector>

namespace epictl {

/**
 * Discrete degree law P(k) of an uncorrelated network.
 *
 * Only degree classes are stored; no explicit graph is ever built. The
 * object is validated on construction and immutable afterwards.
 */
class DegreeDistribution {
public:
    /// Throws ParameterError unless degrees are strictly increasing and >= 1,
    /// probabilities are nonnegative and sum to 1 within 1e-12.
    DegreeDistribution(std::vector<int> degrees, std::vector<double> probabilities);

    std::span<const int> degrees() const noexcept { return degrees_; }
    std::span<const double> probabilities() const noexcept { return probabilities_; }
    std::size_t size() const noexcept { return degrees_.size(); }

    /// Sum_k k^order P(k).
    double moment(int order) const;

    double mean_degree() const noexcept { return mean_; }
    double second_moment() const noexcept { return second_; }
    /// <k^2>/<k>, the factor that turns psi into a threshold.
    double moment_ratio() const noexcept { return second_ / mean_; }

    friend bool operator==(const DegreeDistribution&, const DegreeDistribution&) = default;

private:
    std::vector<int> degrees_;
    std::vector<double> probabilities_;
    double mean_ = 0.0;
    double second_ = 0.0;
};

inline constexpr double kDefaultScaleFreeExponent = 3.0;
inline constexpr int kDefaultKMin = 2;
inline constexpr int kDefaultKMax = 100;

/// Truncated power law P(k) proportional to k^-exponent on [k_min, k_max].
DegreeDistribution make_scale_free(double exponent = kDefaultScaleFreeExponent, int k_min = kDefaultKMin,
                                   int k_max = kDefaultKMax);

/// Free-function form of DegreeDistribution::moment.
inline double moment(const DegreeDistribution& dist, int order) { return dist.moment(order); }

} // namespace epictl
