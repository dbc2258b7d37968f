#include "epictl/network.hpp"

#include "epictl/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace epictl {

DegreeDistribution::DegreeDistribution(std::vector<int> degrees, std::vector<double> probabilities)
    : degrees_(std::move(degrees)), probabilities_(std::move(probabilities))
{
    if (degrees_.empty())
        throw ParameterError("degree distribution: empty support");
    if (degrees_.size() != probabilities_.size())
        throw ParameterError("degree distribution: " + std::to_string(degrees_.size()) + " degrees but " +
                             std::to_string(probabilities_.size()) + " probabilities");
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        if (degrees_[i] < 1)
            throw ParameterError("degree distribution: degrees must be >= 1");
        if (i > 0 && degrees_[i] <= degrees_[i - 1])
            throw ParameterError("degree distribution: degrees must be strictly increasing");
        if (!(probabilities_[i] >= 0.0) || !std::isfinite(probabilities_[i]))
            throw ParameterError("degree distribution: probabilities must be finite and nonnegative");
    }
    const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12)
        throw ParameterError("degree distribution: probabilities sum to " + std::to_string(total) + ", not 1");

    mean_ = moment(1);
    second_ = moment(2);
    if (!(mean_ > 0.0))
        throw ParameterError("degree distribution: mean degree must be positive");
}

double DegreeDistribution::moment(int order) const
{
    if (order < 0)
        throw ParameterError("moment order must be >= 0");
    double sum = 0.0;
    for (std::size_t i = 0; i < degrees_.size(); ++i)
        sum += std::pow(static_cast<double>(degrees_[i]), order) * probabilities_[i];
    return sum;
}

DegreeDistribution make_scale_free(double exponent, int k_min, int k_max)
{
    if (!(exponent > 1.0) || !std::isfinite(exponent))
        throw ParameterError("scale-free exponent must be > 1");
    if (k_min < 1 || k_max < k_min)
        throw ParameterError("scale-free degree range requires 1 <= k_min <= k_max");

    std::vector<int> degrees(static_cast<std::size_t>(k_max - k_min + 1));
    std::iota(degrees.begin(), degrees.end(), k_min);

    std::vector<double> weights;
    weights.reserve(degrees.size());
    for (int k : degrees)
        weights.push_back(std::pow(static_cast<double>(k), -exponent));
    // Sum smallest-first; the tail terms are tiny.
    double total = 0.0;
    for (auto it = weights.rbegin(); it != weights.rend(); ++it)
        total += *it;
    for (double& w : weights)
        w /= total;

    return DegreeDistribution(std::move(degrees), std::move(weights));
}

} // namespace epictl
