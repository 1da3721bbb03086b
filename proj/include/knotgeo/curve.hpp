#pragma once

#include "knotgeo/types.hpp"

namespace knotgeo {

/// Closed polyline in R^m, m >= 2. Vertices are cyclic; edge i joins vertex i
/// to vertex i+1 (mod n). Vertex 0 is an arbitrary but persisted phase.
class Curve {
public:
    /// Validates n >= 3, dim >= 2, finite entries, and positive edge lengths.
    /// The embeddedness proxy is a separate, configurable check
    /// (see require_embedded / min_separation).
    explicit Curve(Mat vertices);

    int n() const { return static_cast<int>(verts_.rows()); }
    int dim() const { return static_cast<int>(verts_.cols()); }
    const Mat& vertices() const { return verts_; }

    RowVec vertex(int i) const { return verts_.row(mod(i)); }
    int mod(int i) const {
        const int m = n();
        return ((i % m) + m) % m;
    }

    bool operator==(const Curve& other) const {
        return verts_.rows() == other.verts_.rows() && verts_ == other.verts_;
    }

private:
    Mat verts_;
};

/// Per-edge geometry: lengths, unit tangents, midpoints, and total length.
struct EdgeData {
    Vec length;     // l_i = |γ_{i+1} - γ_i|
    Mat tangent;    // unit tangents, n x m
    Mat midpoint;   // edge midpoints, n x m
    double total;   // L = Σ l_i
};

EdgeData edge_data(const Curve& c);

/// Total length L = Σ l_i.
double arc_length(const Curve& c);

/// Worst-case ratio of intrinsic to extrinsic distance, maximized over pairs
/// of distinct edge midpoints (the quadrature nodes of the pairwise layer).
/// π/2 in the round-circle limit; >= 1 always. A non-finite value signals a
/// violated embeddedness proxy.
double distortion(const Curve& c);

/// Minimum Euclidean distance between all pairs of non-adjacent edge
/// segments. Zero signals self-intersection.
double min_separation(const Curve& c);

/// Throws EmbeddingError unless min_separation(c) > threshold_factor * L.
void require_embedded(const Curve& c, double threshold_factor = 1e-8);

/// Re-nodes the polyline at n_new equal arc-length stations, keeping the
/// phase of vertex 0.
Curve resample_uniform(const Curve& c, int n_new);

// Generators. Each returned curve passes the embeddedness proxy.
Curve make_circle(int n, double radius = 1.0, int dim = 3);
Curve make_torus_knot(int p, int q, int n, double major = 2.0, double minor = 1.0);
Curve make_figure_eight(int n);
Curve from_samples(Mat vertices);

} // namespace knotgeo
