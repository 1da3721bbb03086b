#include "knotgeo/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace knotgeo {

Curve::Curve(Mat vertices) : verts_(std::move(vertices)) {
    if (verts_.rows() < 3)
        throw std::invalid_argument("curve needs at least 3 vertices, got " +
                                    std::to_string(verts_.rows()));
    if (verts_.cols() < 2)
        throw std::invalid_argument("ambient dimension must be >= 2, got " +
                                    std::to_string(verts_.cols()));
    if (!verts_.allFinite())
        throw std::invalid_argument("curve vertices contain non-finite entries");
    const int m = n();
    for (int i = 0; i < m; ++i) {
        const double l = (verts_.row((i + 1) % m) - verts_.row(i)).norm();
        if (!(l > 0.0))
            throw std::invalid_argument("degenerate edge " + std::to_string(i) +
                                        " (zero length)");
    }
}

EdgeData edge_data(const Curve& c) {
    const int n = c.n();
    EdgeData e;
    e.length.resize(n);
    e.tangent.resize(n, c.dim());
    e.midpoint.resize(n, c.dim());
    const Mat& v = c.vertices();
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const RowVec d = v.row(j) - v.row(i);
        const double l = d.norm();
        e.length[i] = l;
        e.tangent.row(i) = d / l;
        e.midpoint.row(i) = 0.5 * (v.row(i) + v.row(j));
    }
    e.total = e.length.sum();
    return e;
}

double arc_length(const Curve& c) {
    return edge_data(c).total;
}

double distortion(const Curve& c) {
    const EdgeData e = edge_data(c);
    const int n = c.n();
    // Arc-length station of edge midpoint i, measured from vertex 0.
    Vec station(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        station[i] = acc + 0.5 * e.length[i];
        acc += e.length[i];
    }
    const double L = e.total;
    double worst = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double fwd = station[j] - station[i];
            const double arc = std::min(fwd, L - fwd);
            const double chord = (e.midpoint.row(j) - e.midpoint.row(i)).norm();
            worst = std::max(worst, arc / chord);  // chord 0 -> inf, by design of the proxy
        }
    }
    return worst;
}

namespace {

// Distance between segments a0-a1 and b0-b1 (standard clamped closest-point pair).
double segment_distance(const RowVec& a0, const RowVec& a1, const RowVec& b0, const RowVec& b1) {
    const RowVec d1 = a1 - a0;
    const RowVec d2 = b1 - b0;
    const RowVec r = a0 - b0;
    const double A = d1.squaredNorm();
    const double E = d2.squaredNorm();
    const double F = d2.dot(r);
    const double B = d1.dot(d2);
    const double C = d1.dot(r);
    const double den = A * E - B * B;
    double t1 = 0.0;
    if (den > 0.0) t1 = std::clamp((B * F - C * E) / den, 0.0, 1.0);
    double t2 = (B * t1 + F) / E;
    if (t2 < 0.0) {
        t2 = 0.0;
        t1 = std::clamp(-C / A, 0.0, 1.0);
    } else if (t2 > 1.0) {
        t2 = 1.0;
        t1 = std::clamp((B - C) / A, 0.0, 1.0);
    }
    return (a0 + t1 * d1 - b0 - t2 * d2).norm();
}

} // namespace

double min_separation(const Curve& c) {
    const int n = c.n();
    const Mat& v = c.vertices();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // cyclically adjacent
            const double d = segment_distance(v.row(i), v.row((i + 1) % n),
                                              v.row(j), v.row((j + 1) % n));
            best = std::min(best, d);
        }
    }
    return best;
}

void require_embedded(const Curve& c, double threshold_factor) {
    const double L = arc_length(c);
    const double sep = min_separation(c);
    if (!(sep > threshold_factor * L))
        throw EmbeddingError("embeddedness proxy violated: min_separation " +
                             std::to_string(sep) + " <= " +
                             std::to_string(threshold_factor * L));
}

Curve resample_uniform(const Curve& c, int n_new) {
    if (n_new < 3)
        throw std::invalid_argument("resample target must be >= 3");
    const int n = c.n();
    const Mat& v = c.vertices();
    Vec cum(n + 1);
    cum[0] = 0.0;
    for (int i = 0; i < n; ++i)
        cum[i + 1] = cum[i] + (v.row((i + 1) % n) - v.row(i)).norm();
    const double L = cum[n];
    Mat out(n_new, c.dim());
    int seg = 0;
    for (int k = 0; k < n_new; ++k) {
        const double target = L * k / n_new;
        while (seg + 1 < n && cum[seg + 1] < target) ++seg;
        const double t = (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
        out.row(k) = (1.0 - t) * v.row(seg) + t * v.row((seg + 1) % n);
    }
    return Curve(std::move(out));
}

Curve make_circle(int n, double radius, int dim) {
    if (n < 3) throw std::invalid_argument("circle needs n >= 3");
    if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
    if (dim < 2) throw std::invalid_argument("ambient dimension must be >= 2");
    Mat v = Mat::Zero(n, dim);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        v(i, 0) = radius * std::cos(t);
        v(i, 1) = radius * std::sin(t);
    }
    Curve c(std::move(v));
    require_embedded(c);
    return c;
}

Curve make_torus_knot(int p, int q, int n, double major, double minor) {
    if (n < 3) throw std::invalid_argument("torus knot needs n >= 3");
    if (p == 0 || q == 0) throw std::invalid_argument("torus knot indices must be nonzero");
    if (std::gcd(std::abs(p), std::abs(q)) != 1)
        throw std::invalid_argument("torus knot indices must be coprime");
    if (!(major > 0.0) || !(minor > 0.0) || !(major > minor))
        throw std::invalid_argument("torus knot needs major > minor > 0");
    Mat v(n, 3);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        const double w = major + minor * std::cos(q * t);
        v(i, 0) = w * std::cos(p * t);
        v(i, 1) = w * std::sin(p * t);
        v(i, 2) = minor * std::sin(q * t);
    }
    Curve c(std::move(v));
    require_embedded(c);
    return c;
}

Curve make_figure_eight(int n) {
    if (n < 3) throw std::invalid_argument("figure eight needs n >= 3");
    Mat v(n, 3);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        v(i, 0) = (2.0 + std::cos(2.0 * t)) * std::cos(3.0 * t);
        v(i, 1) = (2.0 + std::cos(2.0 * t)) * std::sin(3.0 * t);
        v(i, 2) = std::sin(4.0 * t);
    }
    Curve c(std::move(v));
    require_embedded(c);
    return c;
}

Curve from_samples(Mat vertices) {
    Curve c(std::move(vertices));
    require_embedded(c);
    return c;
}

} // namespace knotgeo
