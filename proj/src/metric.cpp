#include "knotgeo/metric.hpp"

#include <cmath>

namespace knotgeo {

namespace {

struct Lifted {
    Mat ubar;  // edge-midpoint averages
    Mat du;    // arc-length derivatives
};

Lifted lift(const EdgeData& e, const Mat& u) {
    const int n = static_cast<int>(u.rows());
    Lifted l;
    l.ubar.resize(n, u.cols());
    l.du.resize(n, u.cols());
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        l.ubar.row(i) = 0.5 * (u.row(i) + u.row(j));
        l.du.row(i) = (u.row(j) - u.row(i)) / e.length[i];
    }
    return l;
}

} // namespace

FormValues bilinear_forms(const PairTable& t, const TangentField& u, const TangentField& v) {
    const int n = t.n;
    if (u.rows() != n || u.cols() != t.dim || v.rows() != n || v.cols() != t.dim)
        throw std::invalid_argument("tangent field shape does not match pair table");
    const Lifted lu = lift(t.edges, u);
    const Lifted lv = lift(t.edges, v);
    const Vec& len = t.edges.length;

    FormValues f;
    f.s = t.s;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = t.weight(i, j);
            const double r = t.chord(i, j);
            const double psi = t.chi(i, j) / len[i];
            const RowVec dbu = lu.ubar.row(j) - lu.ubar.row(i);
            const RowVec dbv = lv.ubar.row(j) - lv.ubar.row(i);
            const RowVec zu = dbu - psi * (len[i] * lu.du.row(i));
            const RowVec zv = dbv - psi * (len[i] * lv.du.row(i));
            const double q2 = 1.0 / (t.chord_pow(i, j) * t.chord_pow(i, j));
            f.B1 += q2 * zu.dot(zv) * w;
            f.B2 += t.rgamma_sq(i, j) * dbu.dot(dbv) / (r * r) * w;
            f.B3 += t.rgamma_sq(i, j) *
                    (lu.du.row(i).dot(lv.du.row(i)) + lu.du.row(j).dot(lv.du.row(j))) * w;
        }
    }
    for (int i = 0; i < n; ++i) {
        f.H1 += lu.du.row(i).dot(lv.du.row(i)) * len[i];
        f.L2 += lu.ubar.row(i).dot(lv.ubar.row(i)) * len[i];
    }
    return f;
}

FormValues bilinear_forms(const Curve& c, double s, const TangentField& u, const TangentField& v) {
    return bilinear_forms(build_pair_table(c, s), u, v);
}

GramOperator::GramOperator(Curve curve, double s, Mat scalar_kernel)
    : curve_(std::move(curve)), s_(s), S_(std::move(scalar_kernel)) {
    llt_.compute(S_);
    if (llt_.info() != Eigen::Success)
        throw std::runtime_error("Gram factorization failed: discrete positivity lost "
                                 "(this should be impossible for an embedded polyline)");
}

Mat GramOperator::dense() const {
    const int nn = n(), m = dim();
    Mat M = Mat::Zero(nn * m, nn * m);
    for (int i = 0; i < nn; ++i)
        for (int j = 0; j < nn; ++j)
            for (int c = 0; c < m; ++c)
                M(i * m + c, j * m + c) = S_(i, j);
    return M;
}

Covector GramOperator::apply(const TangentField& u) const {
    if (u.rows() != n() || u.cols() != dim())
        throw std::invalid_argument("field shape does not match Gram operator");
    return S_ * u;
}

TangentField GramOperator::solve(const Covector& rhs) const {
    if (rhs.rows() != n() || rhs.cols() != dim())
        throw std::invalid_argument("covector shape does not match Gram operator");
    return llt_.solve(rhs);
}

double GramOperator::quadratic(const TangentField& u, const TangentField& v) const {
    return apply(v).cwiseProduct(u).sum();
}

double GramOperator::norm(const TangentField& u) const {
    return std::sqrt(quadratic(u, u));
}

GramOperator assemble_gram(const Curve& c, double s, Reduction mode) {
    const PairTable t = build_pair_table(c, s);
    const int n = t.n;
    const Vec& len = t.edges.length;
    const double p = 2.0 * s + 1.0;
    Mat S = Mat::Zero(n, n);

    // Stencil of the lifted variables on vertices {i, i+1, j, j+1}:
    //   abar_i -> (1/2, 1/2) on (i, i+1);  d_i -> (-1/l_i, 1/l_i).
    // Per pair the metric is a 4x4 quadratic form in (abar_i, abar_j, d_i, d_j)
    // acting identically on every ambient component.
    const auto accumulate = [&](Mat& dst, int i, int j) {
        const int i1 = (i + 1) % n, j1 = (j + 1) % n;
        const double w = t.weight(i, j);
        const double r = t.chord(i, j);
        const double psi = t.chi(i, j) / len[i];
        const double q2w = w / (t.chord_pow(i, j) * t.chord_pow(i, j));
        const double b2c = p * t.rgamma_sq(i, j) * w / (r * r);
        const double b3c = t.rgamma_sq(i, j) * w;

        // 2 B1: coefficients of z = abar_j - abar_i - psi*l_i*d_i on the stencil.
        double zc[4] = {psi - 0.5, -psi - 0.5, 0.5, 0.5};
        // B2: coefficients of abar_j - abar_i.
        double bc[4] = {-0.5, -0.5, 0.5, 0.5};
        const int vid[4] = {i, i1, j, j1};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                dst(vid[a], vid[b]) += 2.0 * q2w * zc[a] * zc[b] + b2c * bc[a] * bc[b];
        // B3: d_i'd_i + d_j'd_j.
        const double ci = b3c / (len[i] * len[i]);
        const double cj = b3c / (len[j] * len[j]);
        dst(i, i) += ci;    dst(i1, i1) += ci;
        dst(i, i1) -= ci;   dst(i1, i) -= ci;
        dst(j, j) += cj;    dst(j1, j1) += cj;
        dst(j, j1) -= cj;   dst(j1, j) -= cj;
    };

    if (mode == Reduction::Parallel) {
#pragma omp parallel
        {
            Mat local = Mat::Zero(n, n);
#pragma omp for schedule(static)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (j != i) accumulate(local, i, j);
#pragma omp critical
            S += local;
        }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (j != i) accumulate(S, i, j);
    }

    // H1 + L2 edge terms.
    for (int i = 0; i < n; ++i) {
        const int i1 = (i + 1) % n;
        const double hc = 1.0 / len[i];
        const double lc = 0.25 * len[i];
        S(i, i) += hc + lc;
        S(i1, i1) += hc + lc;
        S(i, i1) += -hc + lc;
        S(i1, i) += -hc + lc;
    }
    return GramOperator(c, s, std::move(S));
}

TangentField riesz_solve(const GramOperator& g, const Covector& rhs) {
    return g.solve(rhs);
}

double g_norm(const Curve& c, double s, const TangentField& u) {
    return assemble_gram(c, s).norm(u);
}

} // namespace knotgeo
