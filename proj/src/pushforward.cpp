#include "greenwalk/pushforward.hpp"

#include <cmath>

namespace greenwalk {

void validate(const PushforwardProblem& p) {
    if (!contains(p.base_domain, p.base_source))
        raise(errc::outside_domain, "pushforward source must lie in the base domain");
    if (const auto* pw = std::get_if<PowerMap>(&p.map); pw && pw->exponent < 1)
        raise(errc::invalid_argument, "power map needs exponent >= 1");
    if (const auto* da = std::get_if<DiskAutomorphism>(&p.map); da && std::abs(da->a) >= 1.0)
        raise(errc::invalid_argument, "disk automorphism needs |a| < 1");
}

GreensValue pushforward_greens(const PushforwardProblem& p, Complex w,
                               bool weight_multiplicity) {
    validate(p);
    const std::vector<Preimage> pre = preimages(p.map, w, p.base_domain);
    double sum = 0.0;
    for (const Preimage& q : pre) {
        const GreensValue g = greens_exit(p.base_domain, p.base_source, q.point);
        if (!g.is_finite())
            raise(errc::source_image, "target is the image of the source point");
        sum += (weight_multiplicity ? q.multiplicity : 1) * g.value;
    }
    return GreensValue::finite(sum);
}

ContinuityReport continuity_probe(const PushforwardProblem& p, Complex critical_value,
                                  double radius, bool weight_multiplicity) {
    if (radius <= 0.0) raise(errc::invalid_argument, "probe radius must be positive");
    ContinuityReport report;
    report.radius = radius;
    report.center_value = pushforward_greens(p, critical_value, weight_multiplicity).finite_value();
    for (int i = 0; i < 16; ++i) {
        const double ang = kTwoPi * i / 16.0;
        const Complex w = critical_value + std::polar(radius, ang);
        const double v = pushforward_greens(p, w, weight_multiplicity).finite_value();
        report.max_discrepancy = std::max(report.max_discrepancy,
                                          std::abs(v - report.center_value));
    }
    return report;
}

} // namespace greenwalk
