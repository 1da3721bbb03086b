#pragma once

#include "knotgeo/metric.hpp"

namespace knotgeo {

/// Covector over vertex coordinates with <grad_metric(c,s,u,v), w> equal to
/// the exact derivative of γ ↦ G_γ(u,v) in direction w, for the discrete G.
/// The vertex values of u and v are held fixed; the arc-length derivatives
/// inside G still vary through the edge lengths.
Covector grad_metric(const Curve& c, double s, const TangentField& u, const TangentField& v);

/// Covector over the remaining field slot: u ↦ (DG(γ)w)(v,u).
/// Slot-symmetric cross-check: <apply_dG(c,s,w,v), u> = <grad_metric(c,s,v,u), w>.
Covector apply_dG(const Curve& c, double s, const TangentField& w, const TangentField& v);

/// Christoffel application A_γ(v)v = J⁻¹( (DG(γ)v)(v,·) − ½ (DG(γ)·)(v,v) ).
TangentField christoffel_apply(const GramOperator& gram, const TangentField& v);
TangentField christoffel_apply(const Curve& c, double s, const TangentField& v);

} // namespace knotgeo
