#include "knotgeo/kernel.hpp"

#include <cmath>

namespace knotgeo {

RowVec rs_gamma_pair(const RowVec& delta, const RowVec& tau, double s) {
    const double r = delta.norm();
    if (!(r > 0.0)) throw EmbeddingError("coincident quadrature nodes in pair kernel");
    return (delta - tau * tau.dot(delta)) / std::pow(r, s);
}

EdgeDerivatives edge_derivatives(const EdgeData& e, const Mat& u) {
    const int n = static_cast<int>(u.rows());
    EdgeDerivatives d;
    d.du.resize(n, u.cols());
    d.ubar.resize(n, u.cols());
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        d.du.row(i) = (u.row(j) - u.row(i)) / e.length[i];
        d.ubar.row(i) = 0.5 * (u.row(i) + u.row(j));
    }
    return d;
}

PairTable build_pair_table(const Curve& c, double s, bool skip_adjacent) {
    require_exponent(s);
    PairTable t;
    t.s = s;
    t.n = c.n();
    t.dim = c.dim();
    t.edges = edge_data(c);
    const int n = t.n;
    t.chord = Mat::Zero(n, n);
    t.chord_pow = Mat::Zero(n, n);
    t.weight = Mat::Zero(n, n);
    t.chi = Mat::Zero(n, n);
    t.rgamma = Mat::Zero(n * n, t.dim);
    t.rgamma_sq = Mat::Zero(n, n);

    const Mat& mid = t.edges.midpoint;
    const Mat& tau = t.edges.tangent;
    const Vec& len = t.edges.length;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const RowVec d = mid.row(j) - mid.row(i);
            const double r = d.norm();
            if (!(r > 0.0))
                throw EmbeddingError("coincident midpoints of edges " + std::to_string(i) +
                                     " and " + std::to_string(j));
            const double rs = std::pow(r, s);
            const double ch = tau.row(i).dot(d);
            const int gap = std::abs(i - j);
            const bool adjacent = gap == 1 || gap == n - 1;
            t.chord(i, j) = r;
            t.chord_pow(i, j) = rs;
            t.weight(i, j) = (skip_adjacent && adjacent) ? 0.0 : len[i] * len[j] / r;
            t.chi(i, j) = ch;
            const RowVec rg = (d - tau.row(i) * ch) / rs;
            t.rgamma.row(t.idx(i, j)) = rg;
            t.rgamma_sq(i, j) = rg.squaredNorm();
        }
    }
    return t;
}

Mat rs_apply(const PairTable& t, const Mat& u) {
    const int n = t.n;
    if (u.rows() != n || u.cols() != t.dim)
        throw std::invalid_argument("tangent field shape does not match pair table");
    const EdgeDerivatives d = edge_derivatives(t.edges, u);
    Mat out = Mat::Zero(n * n, t.dim);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            out.row(t.idx(i, j)) =
                (d.ubar.row(j) - d.ubar.row(i) - d.du.row(i) * t.chi(i, j)) / t.chord_pow(i, j);
        }
    }
    return out;
}

Mat lambda_ratio(const Curve& c, double beta) {
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
    const EdgeData e = edge_data(c);
    const int n = c.n();
    const double L = e.total;
    Mat out = Mat::Ones(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const int k = std::abs(j - i);
            const double ref = L * std::min(k, n - k) / n;
            const double chord = (e.midpoint.row(j) - e.midpoint.row(i)).norm();
            if (!(chord > 0.0))
                throw EmbeddingError("zero chord between edge midpoints " + std::to_string(i) +
                                     " and " + std::to_string(j));
            out(i, j) = std::pow(ref / chord, beta);
        }
    }
    return out;
}

} // namespace knotgeo
