#ifndef CGUR_RELATION_HPP
#define CGUR_RELATION_HPP

#include <string>
#include <string_view>

namespace cgur
{

enum class RelationId
{
    HUR,
    RenyiCont,
    ShannonCont,
    RenyiDiscrete,
    HeisPreopt,
    HeisRect,
    HeisOptimal
};

enum class Verdict
{
    holds,
    violated,
    infeasible_inputs
};

/// Slack allowed before a negative margin counts as a failure.
inline constexpr double verdict_tolerance = 1e-9;

/// One uncertainty relation evaluated as lhs >= rhs.
///
/// Product-form relations are stored in the log domain, so margin is
/// log(lhs) - log(rhs) for those and lhs - rhs for the entropic ones.
struct RelationReport
{
    RelationId relation_id = RelationId::HUR;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    Verdict verdict = Verdict::holds;
};

inline RelationReport make_report(RelationId id, double lhs, double rhs,
                                  Verdict on_failure = Verdict::violated)
{
    const double margin = lhs - rhs;
    return {id, lhs, rhs, margin, margin >= -verdict_tolerance ? Verdict::holds : on_failure};
}

inline std::string_view to_string(RelationId id)
{
    switch (id)
    {
    case RelationId::HUR:
        return "HUR";
    case RelationId::RenyiCont:
        return "RenyiCont";
    case RelationId::ShannonCont:
        return "ShannonCont";
    case RelationId::RenyiDiscrete:
        return "RenyiDiscrete";
    case RelationId::HeisPreopt:
        return "HeisPreopt";
    case RelationId::HeisRect:
        return "HeisRect";
    case RelationId::HeisOptimal:
        return "HeisOptimal";
    }
    return "unknown";
}

inline std::string_view to_string(Verdict v)
{
    switch (v)
    {
    case Verdict::holds:
        return "holds";
    case Verdict::violated:
        return "violated";
    case Verdict::infeasible_inputs:
        return "infeasible_inputs";
    }
    return "unknown";
}

} // namespace cgur

#endif // CGUR_RELATION_HPP
