#pragma once

#include "knotgeo/kernel.hpp"

#include <Eigen/Cholesky>

namespace knotgeo {

/// The five bilinear forms making up the metric, plus the combined value
/// G = 2 B¹ + (2s+1) B² + B³ + H¹ + L².
struct FormValues {
    double s = 0.0;
    double B1 = 0.0, B2 = 0.0, B3 = 0.0, H1 = 0.0, L2 = 0.0;
    double G() const { return 2.0 * B1 + (2.0 * s + 1.0) * B2 + B3 + H1 + L2; }
};

FormValues bilinear_forms(const PairTable& t, const TangentField& u, const TangentField& v);
FormValues bilinear_forms(const Curve& c, double s, const TangentField& u, const TangentField& v);

/// The Riesz map of the metric at a fixed curve.
///
/// Every term of G couples ambient components only through Euclidean inner
/// products of fields that are built componentwise from vertex values, so the
/// full (n·m)² Gram matrix is S ⊗ I_m for an n×n SPD kernel S. We assemble
/// and factorize S once; the dense (n·m)² view is materialized on demand.
class GramOperator {
public:
    GramOperator(Curve curve, double s, Mat scalar_kernel);

    int n() const { return curve_.n(); }
    int dim() const { return curve_.dim(); }
    double exponent() const { return s_; }
    const Curve& curve() const { return curve_; }

    bool matches(const Curve& c, double s) const { return s == s_ && c == curve_; }

    /// n×n kernel S with G(u,v) = Σ_c u_c' S v_c over ambient components.
    const Mat& scalar_matrix() const { return S_; }

    /// Full (n·m)×(n·m) matrix, vertex-major flattening (vertex, component).
    Mat dense() const;

    /// Covector G(u, ·) of a field u (same layout as u).
    Covector apply(const TangentField& u) const;

    /// Riesz solve: field u with G(u, ·) = rhs.
    TangentField solve(const Covector& rhs) const;

    double quadratic(const TangentField& u, const TangentField& v) const;
    double norm(const TangentField& u) const;

private:
    Curve curve_;
    double s_;
    Mat S_;
    Eigen::LLT<Mat> llt_;
};

/// Assembles and factorizes the Gram operator of G at (c, s).
GramOperator assemble_gram(const Curve& c, double s, Reduction mode = Reduction::Ordered);

/// u with G(u, ·) = rhs; the operator must have been built for the curve the
/// covector was computed on.
TangentField riesz_solve(const GramOperator& g, const Covector& rhs);

double g_norm(const Curve& c, double s, const TangentField& u);

} // namespace knotgeo
