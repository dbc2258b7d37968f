#include "epictl/model.hpp"

#include "epictl/errors.hpp"

#include <cmath>
#include <string>

namespace epictl {

void StrainParams::validate() const
{
    for (std::size_t i = 0; i < 2; ++i) {
        const std::string idx = std::to_string(i + 1);
        if (!(zeta[i] > 0.0) || !std::isfinite(zeta[i]))
            throw ParameterError("zeta" + idx + " must be positive and finite");
        if (!(gamma[i] > 0.0) || !std::isfinite(gamma[i]))
            throw ParameterError("gamma" + idx + " must be positive and finite");
    }
}

void ControlPair::validate() const
{
    if (!(u1 >= 0.0) || !std::isfinite(u1))
        throw ParameterError("u1 must be nonnegative and finite");
    if (!(u2 >= 0.0) || !std::isfinite(u2))
        throw ParameterError("u2 must be nonnegative and finite");
}

std::string_view to_string(EquilibriumClass c) noexcept
{
    switch (c) {
    case EquilibriumClass::E1: return "E1";
    case EquilibriumClass::E2: return "E2";
    case EquilibriumClass::E3: return "E3";
    case EquilibriumClass::Degenerate: return "Degenerate";
    }
    return "Degenerate";
}

EquilibriumClass equilibrium_class_from_string(std::string_view label)
{
    if (label == "E1") return EquilibriumClass::E1;
    if (label == "E2") return EquilibriumClass::E2;
    if (label == "E3") return EquilibriumClass::E3;
    if (label == "Degenerate") return EquilibriumClass::Degenerate;
    throw ParameterError("unknown equilibrium class '" + std::string(label) + "'");
}

} // namespace epictl
