#include "knotgeo/variation.hpp"

#include <cmath>

namespace knotgeo {

namespace {

struct Lifted {
    Mat bar;   // edge-midpoint averages
    Mat diff;  // u_{i+1} - u_i (plain differences, no 1/l factor)
};

Lifted lift(const Mat& u) {
    const int n = static_cast<int>(u.rows());
    Lifted l;
    l.bar.resize(n, u.cols());
    l.diff.resize(n, u.cols());
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        l.bar.row(i) = 0.5 * (u.row(i) + u.row(j));
        l.diff.row(i) = u.row(j) - u.row(i);
    }
    return l;
}

} // namespace

Covector grad_metric(const Curve& c, double s, const TangentField& u, const TangentField& v) {
    const PairTable t = build_pair_table(c, s);
    const int n = t.n;
    if (u.rows() != n || u.cols() != t.dim || v.rows() != n || v.cols() != t.dim)
        throw std::invalid_argument("tangent field shape does not match curve");
    const Lifted lu = lift(u);
    const Lifted lv = lift(v);
    const Mat& tau = t.edges.tangent;
    const Vec& len = t.edges.length;
    const double p = 2.0 * s + 1.0;
    Covector g = Covector::Zero(n, t.dim);

    for (int i = 0; i < n; ++i) {
        const int i1 = (i + 1) % n;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const int j1 = (j + 1) % n;
            const RowVec d = t.delta(i, j);
            const double r = t.chord(i, j);
            const double chi = t.chi(i, j);
            const double li = len[i], lj = len[j];
            const double A = li * lj;
            const double gg = r * r - chi * chi;
            const double P1 = std::pow(r, -p);
            const double P3 = P1 / (r * r);
            const double P5 = P3 / (r * r);
            const double psi = chi / li;

            const RowVec dbu = lu.bar.row(j) - lu.bar.row(i);
            const RowVec dbv = lv.bar.row(j) - lv.bar.row(i);
            const RowVec zu = dbu - psi * lu.diff.row(i);
            const RowVec zv = dbv - psi * lv.diff.row(i);
            const double C1 = zu.dot(zv);
            const double Cpsi = -(lu.diff.row(i).dot(zv) + zu.dot(lv.diff.row(i)));
            const double C2 = dbu.dot(dbv);
            const double cUi = lu.diff.row(i).dot(lv.diff.row(i));
            const double cUj = lu.diff.row(j).dot(lv.diff.row(j));
            const double ki = cUi / (li * li);
            const double kj = cUj / (lj * lj);

            const RowVec dchi_dti = (d - chi * tau.row(i)) / li;
            const RowVec dpsi_dD = tau.row(i) / li;
            const RowVec dpsi_dti = (d - 2.0 * chi * tau.row(i)) / (li * li);

            // B1 slot (weight 2): T1 = A P1 C1.
            RowVec dD = 2.0 * (A * (-p * P3 * C1 * d + P1 * Cpsi * dpsi_dD));
            RowVec dti = 2.0 * (A * P1 * Cpsi * dpsi_dti + C1 * P1 * lj * tau.row(i));
            RowVec dtj = 2.0 * (C1 * P1 * li * tau.row(j));

            // B2 slot (weight p): T2 = g A P3 C2.
            dD += p * C2 * A * ((2.0 * d - 2.0 * chi * tau.row(i)) * P3 - (p + 2.0) * gg * P5 * d);
            dti += p * C2 * (-2.0 * chi * A * P3 * dchi_dti + gg * P3 * lj * tau.row(i));
            dtj += p * C2 * gg * P3 * li * tau.row(j);

            // B3 slot: T3 = g A P1 (ki + kj).
            const double Psi = gg * A * P1;
            dD += (ki + kj) * A * ((2.0 * d - 2.0 * chi * tau.row(i)) * P1 - p * gg * P3 * d);
            dti += (ki + kj) * (-2.0 * chi * A * P1 * dchi_dti + gg * P1 * lj * tau.row(i)) -
                   2.0 * Psi * cUi / (li * li * li) * tau.row(i);
            dtj += (ki + kj) * gg * P1 * li * tau.row(j) -
                   2.0 * Psi * cUj / (lj * lj * lj) * tau.row(j);

            g.row(i) -= 0.5 * dD;
            g.row(i1) -= 0.5 * dD;
            g.row(j) += 0.5 * dD;
            g.row(j1) += 0.5 * dD;
            g.row(i) -= dti;
            g.row(i1) += dti;
            g.row(j) -= dtj;
            g.row(j1) += dtj;
        }
    }

    // H1 + L2 edge terms.
    for (int i = 0; i < n; ++i) {
        const int i1 = (i + 1) % n;
        const double cUi = lu.diff.row(i).dot(lv.diff.row(i));
        const double mbar = lu.bar.row(i).dot(lv.bar.row(i));
        const RowVec dti = (-cUi / (len[i] * len[i]) + mbar) * tau.row(i);
        g.row(i) -= dti;
        g.row(i1) += dti;
    }
    return g;
}

Covector apply_dG(const Curve& c, double s, const TangentField& w, const TangentField& v) {
    const PairTable t = build_pair_table(c, s);
    const int n = t.n;
    if (w.rows() != n || w.cols() != t.dim || v.rows() != n || v.cols() != t.dim)
        throw std::invalid_argument("tangent field shape does not match curve");
    const Lifted lw = lift(w);
    const Lifted lv = lift(v);
    const Mat& tau = t.edges.tangent;
    const Vec& len = t.edges.length;
    const double p = 2.0 * s + 1.0;
    Covector g = Covector::Zero(n, t.dim);

    // Stencil helpers: accumulate a row vector against the linear-in-u
    // structure of z, the midpoint difference, the edge difference, and the
    // edge average.
    const auto add_z = [&](int i, int i1, int j, int j1, double psi, double coef, const RowVec& y) {
        g.row(i) += coef * (psi - 0.5) * y;
        g.row(i1) += coef * (-psi - 0.5) * y;
        g.row(j) += coef * 0.5 * y;
        g.row(j1) += coef * 0.5 * y;
    };
    const auto add_dbar = [&](int i, int i1, int j, int j1, double coef, const RowVec& y) {
        g.row(i) -= coef * 0.5 * y;
        g.row(i1) -= coef * 0.5 * y;
        g.row(j) += coef * 0.5 * y;
        g.row(j1) += coef * 0.5 * y;
    };
    const auto add_diff = [&](int i, int i1, double coef, const RowVec& y) {
        g.row(i) -= coef * y;
        g.row(i1) += coef * y;
    };

    for (int i = 0; i < n; ++i) {
        const int i1 = (i + 1) % n;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const int j1 = (j + 1) % n;
            const RowVec d = t.delta(i, j);
            const double r = t.chord(i, j);
            const double chi = t.chi(i, j);
            const double li = len[i], lj = len[j];
            const double A = li * lj;
            const double gg = r * r - chi * chi;
            const double P1 = std::pow(r, -p);
            const double P3 = P1 / (r * r);
            const double psi = chi / li;

            // First-order perturbations along w.
            const RowVec dDelta = lw.bar.row(j) - lw.bar.row(i);
            const double dr = d.dot(dDelta) / r;
            const double dli = tau.row(i).dot(lw.diff.row(i));
            const double dlj = tau.row(j).dot(lw.diff.row(j));
            const RowVec dtau = (lw.diff.row(i) - tau.row(i) * dli) / li;
            const double dchi = dtau.dot(d) + tau.row(i).dot(dDelta);
            const double dpsi = dchi / li - chi * dli / (li * li);
            const double dA = dli * lj + li * dlj;
            const double dgg = 2.0 * r * dr - 2.0 * chi * dchi;
            const double dP1 = -p * P1 / r * dr;
            const double dP3 = -(p + 2.0) * P3 / r * dr;
            const double dAP1 = dA * P1 + A * dP1;
            const double dPhi = dgg * A * P3 + gg * dA * P3 + gg * A * dP3;
            const double dPsi = dgg * A * P1 + gg * dA * P1 + gg * A * dP1;

            const RowVec dbv = lv.bar.row(j) - lv.bar.row(i);
            const RowVec zv = dbv - psi * lv.diff.row(i);

            // 2 B1: d(A P1 <zu, zv>).
            add_z(i, i1, j, j1, psi, 2.0 * dAP1, zv);
            add_diff(i, i1, 2.0 * A * P1 * (-dpsi), zv);
            add_z(i, i1, j, j1, psi, 2.0 * A * P1 * (-dpsi), lv.diff.row(i));

            // p B2: d(Phi) <dbu, dbv>.
            add_dbar(i, i1, j, j1, p * dPhi, dbv);

            // B3: d(Psi / l²) <du, dv> on both anchored edges.
            const double Psi = gg * A * P1;
            add_diff(i, i1, dPsi / (li * li) - 2.0 * Psi * dli / (li * li * li), lv.diff.row(i));
            add_diff(j, j1, dPsi / (lj * lj) - 2.0 * Psi * dlj / (lj * lj * lj), lv.diff.row(j));
        }
    }

    // H1 + L2 edge terms.
    for (int i = 0; i < n; ++i) {
        const int i1 = (i + 1) % n;
        const double dli = tau.row(i).dot(lw.diff.row(i));
        add_diff(i, i1, -dli / (len[i] * len[i]), lv.diff.row(i));
        // L2: d(l_i) <ubar_i, vbar_i>; ubar stencil is (1/2, 1/2).
        g.row(i) += 0.5 * dli * lv.bar.row(i);
        g.row(i1) += 0.5 * dli * lv.bar.row(i);
    }
    return g;
}

TangentField christoffel_apply(const GramOperator& gram, const TangentField& v) {
    const Curve& c = gram.curve();
    const double s = gram.exponent();
    const Covector rhs = apply_dG(c, s, v, v) - 0.5 * grad_metric(c, s, v, v);
    return gram.solve(rhs);
}

TangentField christoffel_apply(const Curve& c, double s, const TangentField& v) {
    return christoffel_apply(assemble_gram(c, s), v);
}

} // namespace knotgeo
