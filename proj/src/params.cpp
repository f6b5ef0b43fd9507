#include "pparab/params.hpp"

#include <algorithm>
#include <cmath>

#include "pparab/errors.hpp"

namespace pparab {

std::string_view to_string(TheoremCase c)
{
    switch (c) {
    case TheoremCase::CaseI: return "CaseI";
    case TheoremCase::CaseII: return "CaseII";
    case TheoremCase::Both: return "Both";
    case TheoremCase::Neither: return "Neither";
    }
    return "Neither";
}

Params validate(const Params& params)
{
    if (params.n < 1)
        throw RangeError("n", "n < 1: spatial dimension must be at least 1");
    if (!std::isfinite(params.p) || !(params.p > 1.0))
        throw RangeError("p", "p <= 1: exponent must satisfy p > 1");
    if (!std::isfinite(params.gamma) || !(params.gamma > -1.0))
        throw RangeError("gamma", "gamma <= -1: degeneracy exponent must satisfy gamma > -1");
    if (!std::isfinite(params.s))
        throw RangeError("s", "s is not finite");
    if (!std::isfinite(params.epsilon) || params.epsilon < 0.0)
        throw RangeError("epsilon", "epsilon < 0: regularization must be nonnegative");
    return params;
}

bool range_condition_smooth(const Params& params)
{
    if (params.n < 2)
        throw RangeError("n", "range condition requires n >= 2");
    const double elliptic = -1.0 - (params.p - 1.0) / (params.n - 1.0);
    const double parabolic = params.gamma + 1.0 - params.p;
    return params.s > std::max(elliptic, parabolic);
}

TheoremCase theorem_case(double p, double gamma)
{
    if (!(p > 1.0))
        throw RangeError("p", "p <= 1");
    if (!(gamma > -1.0))
        throw RangeError("gamma", "gamma <= -1");
    const bool case_i = p <= 5.0 && gamma < 1.0;
    const bool case_ii = gamma < std::sqrt(2.0) - 0.5;
    if (case_i && case_ii)
        return TheoremCase::Both;
    if (case_i)
        return TheoremCase::CaseI;
    if (case_ii)
        return TheoremCase::CaseII;
    return TheoremCase::Neither;
}

void to_json(nlohmann::json& j, const Params& params)
{
    j = nlohmann::json{{"n", params.n},
                       {"p", params.p},
                       {"gamma", params.gamma},
                       {"s", params.s},
                       {"epsilon", params.epsilon}};
}

void from_json(const nlohmann::json& j, Params& params)
{
    Params out;
    out.n = j.value("n", out.n);
    out.p = j.value("p", out.p);
    out.gamma = j.value("gamma", out.gamma);
    out.s = j.value("s", out.s);
    out.epsilon = j.value("epsilon", out.epsilon);
    params = out;
}

} // namespace pparab
