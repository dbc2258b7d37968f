#pragma once

#include <array>
#include <string_view>

namespace epictl {

enum class Strain { One = 0, Two = 1 };

inline constexpr std::size_t index_of(Strain s) noexcept { return static_cast<std::size_t>(s); }
inline constexpr Strain other(Strain s) noexcept { return s == Strain::One ? Strain::Two : Strain::One; }

/// Spreading rate zeta and recovery rate gamma per strain (both 1/time).
struct StrainParams {
    std::array<double, 2> zeta{};
    std::array<double, 2> gamma{};

    double spreading(Strain s) const noexcept { return zeta[index_of(s)]; }
    double recovery(Strain s) const noexcept { return gamma[index_of(s)]; }

    /// Throws ParameterError unless all rates are finite and positive.
    void validate() const;

    friend bool operator==(const StrainParams&, const StrainParams&) = default;
};

/// Nonnegative control effort (u1, u2), an extra removal rate per strain.
struct ControlPair {
    double u1 = 0.0;
    double u2 = 0.0;

    double operator[](Strain s) const noexcept { return s == Strain::One ? u1 : u2; }
    double& operator[](Strain s) noexcept { return s == Strain::One ? u1 : u2; }

    void validate() const;

    friend bool operator==(const ControlPair&, const ControlPair&) = default;
};

/// psi_i = zeta_i / (gamma_i + u_i).
inline double effective_ratio(const StrainParams& params, const ControlPair& control, Strain s) noexcept
{
    return params.spreading(s) / (params.recovery(s) + control[s]);
}

enum class EquilibriumClass { E1, E2, E3, Degenerate };

std::string_view to_string(EquilibriumClass c) noexcept;
/// Throws ParameterError on an unknown label.
EquilibriumClass equilibrium_class_from_string(std::string_view label);

/// Strain that survives in an exclusive equilibrium; E2 -> One, E3 -> Two.
inline constexpr Strain surviving_strain(EquilibriumClass c) noexcept
{
    return c == EquilibriumClass::E3 ? Strain::Two : Strain::One;
}

} // namespace epictl
