#pragma once

#include <string_view>

#include "json.hpp"

namespace pparab {

/// Parameters of the regularized general p-parabolic equation
///
///   u_t = (|Du|^2 + eps)^{gamma/2} (Delta u + (p-2) Delta_inf u / (|Du|^2 + eps))
///
/// together with the weight exponent `s` of the estimated quantity
/// D((|Du|^2+eps)^{(p-2+s)/4} Du).
struct Params {
    int n = 2;
    double p = 2.0;
    double gamma = 0.0;
    double s = 0.0;
    double epsilon = 0.0;

    bool operator==(const Params&) const = default;
};

/// Which parameter regime of the planar W^{2,2} result a (p, gamma) pair falls in.
///   CaseI  : 1 < p <= 5 and -1 < gamma < 1
///   CaseII : -1 < gamma < sqrt(2) - 1/2
enum class TheoremCase { CaseI, CaseII, Both, Neither };

std::string_view to_string(TheoremCase c);

/// Returns `params` unchanged or throws RangeError naming the violated bound.
Params validate(const Params& params);

/// s > max{-1 - (p-1)/(n-1), gamma + 1 - p}, strict. Requires n >= 2.
bool range_condition_smooth(const Params& params);

TheoremCase theorem_case(double p, double gamma);

/// Upper end of the gamma range of case II: sqrt(2) - 1/2.
inline constexpr double kCaseIIGammaBound = 0.91421356237309504880;

void to_json(nlohmann::json& j, const Params& params);
void from_json(const nlohmann::json& j, Params& params);

} // namespace pparab
