#pragma once

#include "knotgeo/curve.hpp"

namespace knotgeo {

/// Precomputed per-edge-pair kernel quantities shared by the energy and the
/// metric. Midpoint quadrature: one node per edge, ordered pairs (i, j) with
/// i != j; the diagonal entries of the n x n tables are unused (zero).
/// Adjacent edge pairs are included — their midpoints are distinct.
struct PairTable {
    double s = 0.0;
    int n = 0;
    int dim = 0;
    EdgeData edges;

    Mat chord;      // |Δ_ij|, chord between edge midpoints
    Mat chord_pow;  // |Δ_ij|^s
    Mat weight;     // w_ij = l_i l_j / |Δ_ij|
    Mat chi;        // <τ_i, Δ_ij>  (anchored at the first index of the pair)
    Mat rgamma;     // cached R^s_γ γ, row idx(i,j), (n·n) x dim
    Mat rgamma_sq;  // |R^s_γ γ(i,j)|², n x n

    int idx(int i, int j) const { return i * n + j; }
    RowVec delta(int i, int j) const {
        return edges.midpoint.row(j) - edges.midpoint.row(i);
    }
};

/// Kernel applied to the curve itself: (Δ - τ <τ, Δ>) / |Δ|^s.
/// Exposed separately so degenerate fixtures (e.g. collinear edges) can be
/// probed without a closed curve.
RowVec rs_gamma_pair(const RowVec& delta, const RowVec& tau, double s);

/// Arc-length derivatives of a field, anchored per edge.
struct EdgeDerivatives {
    Mat du;    // D_γu|_i = (u_{i+1} - u_i)/l_i, n x m
    Mat ubar;  // edge-midpoint averages, n x m

    /// 𝒟_γu|_i = (D_γu|_i)ᵀ τ_i, the rank-<=1 full derivative. For u = γ this
    /// is τ τᵀ, the orthogonal projector onto the edge tangent.
    static Mat full(const RowVec& du_i, const RowVec& tau_i) {
        return du_i.transpose() * tau_i;
    }
};

EdgeDerivatives edge_derivatives(const EdgeData& e, const Mat& u);

/// Builds the table. Throws EmbeddingError on coincident edge midpoints.
/// skip_adjacent zeroes the weights of cyclically neighboring edge pairs —
/// a comparison mode for codes that drop neighbor interactions; the default
/// keeps them (midpoints are distinct and the integrand is finite).
PairTable build_pair_table(const Curve& c, double s, bool skip_adjacent = false);

/// R^s_γ u(i,j) = (ū_j - ū_i - D_γu|_i <τ_i, Δ_ij>) / |Δ_ij|^s, with ū the
/// edge-midpoint average of u and D_γu|_i = (u_{i+1} - u_i)/l_i.
/// Returns one row per ordered pair, layout as PairTable::idx. Linear in u.
Mat rs_apply(const PairTable& t, const Mat& u);

/// (reference separation / chord)^β per ordered pair; 1 on the diagonal.
/// The reference separation is the cyclic distance of edge midpoints under an
/// index-uniform parameterization of total length L(γ).
Mat lambda_ratio(const Curve& c, double beta);

} // namespace knotgeo
