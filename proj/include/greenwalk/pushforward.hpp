#pragma once

#include "greenwalk/closed_form.hpp"
#include "greenwalk/complex_geometry.hpp"

namespace greenwalk {

// Green's function of a projected stopping time: target values pull back to a
// multiplicity-weighted sum of base-domain values over the preimages.
struct PushforwardProblem {
    AnalyticMap map;
    Domain base_domain;
    Complex base_source{0.0, 0.0};
};

void validate(const PushforwardProblem& p);

// Sum of multiplicity * G_base(source, w') over preimages w' of w inside the
// base domain. Raises source_image when w = f(source) (a singular term).
// `weight_multiplicity = false` is a diagnostic mode that drops the
// multiplicity weights; it exists only to demonstrate the loss of continuity
// at critical values and is never used by production paths.
GreensValue pushforward_greens(const PushforwardProblem& p, Complex w,
                               bool weight_multiplicity = true);

struct ContinuityReport {
    double radius = 0.0;
    double center_value = 0.0;
    double max_discrepancy = 0.0;   // max |G(w) - G(wc)| over 16 circle points
};

ContinuityReport continuity_probe(const PushforwardProblem& p, Complex critical_value,
                                  double radius, bool weight_multiplicity = true);

} // namespace greenwalk
