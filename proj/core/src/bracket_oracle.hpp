#pragma once

// Lie brackets of projectable fields on TΣ computed from the bracket
// relations of horizontal and vertical lifts:
//   [A^h, B^h] = ([A, B]^h, -R(A, B)V),  [A^h, B^v] = (∇_A B)^v,  [A^v, B^v] = 0.
// Used only to check that D is torsion-free; not part of the public API.

#include "pkgeo/tbundle.hpp"

namespace pkgeo::detail {

inline SplitTangent lift_bracket(const ConformalChart& chart, const TBPoint& tb,
                                 const ProjectableField& x, const ProjectableField& y) {
  const PointMetric m = chart.at(tb.p);
  const ProjectableJet jx = x.jet(tb.p);
  const ProjectableJet jy = y.jet(tb.p);
  const Vec2 base = jy.dh * jx.h - jx.dh * jy.h;
  const Vec2 fiber = -m.curvature(jx.h, jy.h, tb.V) + (jy.dv * jx.h + m.gamma(jx.h, jy.v)) -
                     (jx.dv * jy.h + m.gamma(jy.h, jx.v));
  return {base, fiber};
}

/// Nijenhuis tensor of 𝕁 on constant-component extensions, via lift brackets.
inline SplitTangent lift_nijenhuis(const ConformalChart& chart, const TBPoint& tb,
                                   const SplitTangent& x, const SplitTangent& y) {
  const auto fx = ProjectableField::constant(x);
  const auto fy = ProjectableField::constant(y);
  const auto jx = ProjectableField::constant(jmap(x));
  const auto jy = ProjectableField::constant(jmap(y));
  return lift_bracket(chart, tb, jx, jy) - jmap(lift_bracket(chart, tb, jx, fy)) -
         jmap(lift_bracket(chart, tb, fx, jy)) - lift_bracket(chart, tb, fx, fy);
}

}  // namespace pkgeo::detail
