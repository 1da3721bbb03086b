#pragma once

#include "knotgeo/kernel.hpp"

namespace knotgeo {

/// Snapshot of the scalar diagnostics for one curve.
struct EnergyReport {
    double energy = 0.0;
    double length = 0.0;
    double scale_invariant = 0.0;  // E · L^{2s-3}
    double distortion = 0.0;
    double min_separation = 0.0;
    bool lower_bound_ok = true;    // π² <= E · L^{2s-3}; false warns of under-resolution
};

/// Tangent-point energy of the polyline: Σ_{i≠j} |R^s_γ γ(i,j)|² w_ij.
double energy(const PairTable& t, Reduction mode = Reduction::Ordered);
double energy(const Curve& c, double s, Reduction mode = Reduction::Ordered);

/// Exact gradient of the discrete energy with respect to vertex coordinates.
/// <grad_energy(c), w> is the derivative of energy(c) in direction w.
Covector grad_energy(const Curve& c, double s);

/// First-variation form 2 B¹(γ,u) - (2s+1) B²(γ,u) + B³(γ,u). Agrees with
/// <grad_energy, u> only under refinement; kept as a consistency diagnostic.
double de_form(const Curve& c, const TangentField& u, double s);

/// Energy of the round circle: radius^{3-2s} · π · 2^{3-2s} · √π · Γ(2-s) / Γ((5-2s)/2).
double circle_energy_closed_form(double s, double radius);

/// skip_adjacent evaluates the comparison mode that drops neighboring edge
/// pairs from the quadrature (see build_pair_table).
EnergyReport energy_report(const Curve& c, double s, bool skip_adjacent = false);

} // namespace knotgeo
