#include "knotgeo/check.hpp"

#include <Eigen/Geometry>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace knotgeo {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

// Frobenius comparison with absolute floor.
double covector_mismatch(const Covector& got, const Covector& want, double floor_abs) {
    const double diff = (got - want).norm();
    const double scale = std::max(want.norm(), floor_abs);
    return diff / scale;
}

CheckResult make(const std::string& name, double observed, double threshold,
                 const std::string& details = "") {
    CheckResult r;
    r.name = name;
    r.observed = observed;
    r.threshold = threshold;
    r.passed = observed <= threshold;
    r.details = details;
    return r;
}

} // namespace

Curve random_embedded_curve(int n, int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int modes = 3;
    for (int attempt = 0; attempt < 500; ++attempt) {
        Mat coeff_a(modes, dim), coeff_b(modes, dim);
        for (int k = 0; k < modes; ++k)
            for (int d = 0; d < dim; ++d) {
                const double decay = 0.3 / ((k + 1) * (k + 1));
                coeff_a(k, d) = unif(rng) * decay;
                coeff_b(k, d) = unif(rng) * decay;
            }
        // Dominant round component so most draws embed with healthy margin.
        coeff_a(0, 0) += 1.5;
        coeff_b(0, 1) += 1.5;
        Mat v = Mat::Zero(n, dim);
        for (int i = 0; i < n; ++i) {
            const double t = 2.0 * kPi * i / n;
            for (int k = 0; k < modes; ++k)
                for (int d = 0; d < dim; ++d)
                    v(i, d) += coeff_a(k, d) * std::cos((k + 1) * t) +
                               coeff_b(k, d) * std::sin((k + 1) * t);
        }
        try {
            Curve c(std::move(v));
            // Neighbor gaps cap min_separation at about one edge length, so
            // the margin has to scale with L/n; the distortion gate rejects
            // close approaches of far strands.
            const double L = arc_length(c);
            if (min_separation(c) > 0.25 * L / n && distortion(c) < 2.5) return c;
        } catch (const std::invalid_argument&) {
            // retry
        }
    }
    throw std::runtime_error("could not sample an embedded random curve");
}

TangentField random_field(int n, int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    TangentField u(n, dim);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < dim; ++d) u(i, d) = unif(rng);
    return u;
}

std::vector<CheckResult> check_identities(const RunConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::vector<CheckResult> out;
    const double s = cfg.s;

    double worst_b1 = 0.0, worst_b2 = 0.0, worst_b3 = 0.0, worst_gid = 0.0;
    double worst_bound = std::numeric_limits<double>::infinity();
    std::uniform_int_distribution<int> nd(32, 128);
    for (int trial = 0; trial < 20; ++trial) {
        const Curve c = random_embedded_curve(nd(rng), 3, rng);
        const PairTable t = build_pair_table(c, s);
        const double E = energy(t, cfg.reduction);
        const FormValues f = bilinear_forms(t, c.vertices(), c.vertices());
        worst_b1 = std::max(worst_b1, rel_err(f.B1, E));
        worst_b2 = std::max(worst_b2, rel_err(f.B2, E));
        worst_b3 = std::max(worst_b3, rel_err(f.B3, 2.0 * E));
        const double L = t.edges.total;
        worst_gid = std::max(worst_gid, rel_err(f.G(), (2.0 * s + 5.0) * E + L + f.L2));
        worst_bound = std::min(worst_bound, E * std::pow(L, 2.0 * s - 3.0) / (kPi * kPi));
    }
    out.push_back(make("B1(g,g) = E", worst_b1, 1e-12));
    out.push_back(make("B2(g,g) = E", worst_b2, 1e-12));
    out.push_back(make("B3(g,g) = 2E", worst_b3, 1e-12));
    out.push_back(make("G(g,g) = (2s+5)E + L + L2(g,g)", worst_gid, 1e-12));
    out.push_back(make("lower bound pi^2 <= E L^{2s-3} (margin >= 1)", 1.0 / worst_bound, 1.0,
                       "reciprocal of worst margin over 20 random curves"));

    {
        // Constant fields cost |c|² L, all other terms vanishing.
        const Curve c = random_embedded_curve(48, 3, rng);
        RowVec dirv(3);
        dirv << 0.3, -1.1, 0.7;
        TangentField u = TangentField::Zero(48, 3);
        u.rowwise() += dirv;
        const FormValues f = bilinear_forms(c, s, u, u);
        const double L = arc_length(c);
        const double resid = std::abs(f.B1) + std::abs(f.B2) + std::abs(f.B3) + std::abs(f.H1);
        out.push_back(make("constant field: B,H1 vanish", resid / (dirv.squaredNorm() * L), 1e-13));
        out.push_back(make("constant field: G = |c|^2 L",
                           rel_err(f.G(), dirv.squaredNorm() * L), 1e-12));
    }
    {
        // Scale law at fixed n plus the Euler pairing.
        const Curve c = random_embedded_curve(64, 3, rng);
        const double E = energy(c, s);
        double worst = 0.0;
        for (double lam : {0.5, 2.0, 10.0}) {
            const Curve cl(lam * c.vertices());
            worst = std::max(worst, rel_err(energy(cl, s), std::pow(lam, 3.0 - 2.0 * s) * E));
        }
        out.push_back(make("E(lam g) = lam^{3-2s} E", worst, 1e-12));
        const double euler = pair_dual(grad_energy(c, s), c.vertices());
        out.push_back(make("<grad E, g> = (3-2s) E", rel_err(euler, (3.0 - 2.0 * s) * E), 1e-10));
    }
    {
        // Rigid invariance (rotation + translation) of E and G values.
        const Curve c = random_embedded_curve(40, 3, rng);
        const TangentField u = random_field(40, 3, rng);
        const TangentField v = random_field(40, 3, rng);
        Eigen::Matrix3d Q =
            Eigen::AngleAxisd(0.83, Eigen::Vector3d(1, 2, -1).normalized()).toRotationMatrix();
        RowVec b(3);
        b << 5.0, -2.0, 1.25;
        Mat moved = c.vertices() * Q.transpose();
        moved.rowwise() += b;
        const Curve cm(moved);
        const double errE = rel_err(energy(cm, s), energy(c, s));
        const FormValues f0 = bilinear_forms(c, s, u, v);
        const FormValues f1 = bilinear_forms(cm, s, Mat(u * Q.transpose()), Mat(v * Q.transpose()));
        const double errG = rel_err(f1.G(), f0.G());
        out.push_back(make("rigid invariance of E", errE, 1e-12));
        out.push_back(make("rigid equivariance of G", errG, 1e-12));
        // Cyclic relabeling.
        Mat shifted(c.n(), 3);
        for (int i = 0; i < c.n(); ++i) shifted.row(i) = c.vertices().row((i + 17) % c.n());
        out.push_back(make("cyclic relabeling invariance of E",
                           rel_err(energy(Curve(shifted), s), energy(c, s)), 1e-12));
    }
    {
        // Gram kernel agrees with the forms; symmetric SPD.
        const Curve c = random_embedded_curve(16, 3, rng);
        const GramOperator gram = assemble_gram(c, s, cfg.reduction);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const TangentField u = random_field(16, 3, rng);
            const TangentField v = random_field(16, 3, rng);
            worst = std::max(worst, rel_err(gram.quadratic(u, v), bilinear_forms(c, s, u, v).G()));
        }
        out.push_back(make("Gram quadratic vs forms", worst, 1e-10));
        const Mat& S = gram.scalar_matrix();
        out.push_back(make("Gram symmetry", (S - S.transpose()).cwiseAbs().maxCoeff() /
                                                S.cwiseAbs().maxCoeff(),
                           1e-12));
        const TangentField w = random_field(16, 3, rng);
        out.push_back(make("Riesz round trip", covector_mismatch(gram.solve(gram.apply(w)), w, 1e-30),
                           1e-10));
    }
    return out;
}

std::vector<CheckResult> check_gradients(const RunConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed + 1);
    std::vector<CheckResult> out;
    const double s = cfg.s;

    {
        // Energy gradient against per-coordinate central differences. At this
        // step size the oracle's own truncation error grows like (h n / L)²,
        // so the gate runs at the 24-gon scale it is specified for.
        const Curve c = random_embedded_curve(24, 3, rng);
        const double h = cfg.fd_step_factor * arc_length(c);
        const Covector g = grad_energy(c, s);
        Covector fd(c.n(), 3);
        for (int i = 0; i < c.n(); ++i)
            for (int d = 0; d < 3; ++d) {
                Mat vp = c.vertices(), vm = c.vertices();
                vp(i, d) += h;
                vm(i, d) -= h;
                fd(i, d) = (energy(Curve(vp), s) - energy(Curve(vm), s)) / (2.0 * h);
            }
        out.push_back(make("grad_energy vs central FD", covector_mismatch(g, fd, cfg.fd_floor),
                           cfg.fd_tol));
        // Rigid-motion generators annihilate the gradient.
        TangentField tr = TangentField::Zero(c.n(), 3);
        tr.col(0).setConstant(1.0);
        Eigen::Matrix3d A;
        A << 0, -1, 0, 1, 0, 0, 0, 0, 0;  // infinitesimal rotation
        const TangentField rot = c.vertices() * A.transpose();
        const double scale = std::max(g.norm() * 1.0, 1e-30);
        out.push_back(make("<grad E, translation> = 0", std::abs(pair_dual(g, tr)) / scale, 1e-10));
        out.push_back(make("<grad E, rotation> = 0", std::abs(pair_dual(g, rot)) / scale, 1e-10));
    }
    {
        // Metric gradient against per-coordinate central differences of G(u,v).
        const Curve c = random_embedded_curve(24, 3, rng);
        const TangentField u = random_field(24, 3, rng);
        const TangentField v = random_field(24, 3, rng);
        const double h = cfg.fd_step_factor * arc_length(c);
        const Covector g = grad_metric(c, s, u, v);
        Covector fd(c.n(), 3);
        for (int i = 0; i < c.n(); ++i)
            for (int d = 0; d < 3; ++d) {
                Mat vp = c.vertices(), vm = c.vertices();
                vp(i, d) += h;
                vm(i, d) -= h;
                fd(i, d) = (bilinear_forms(Curve(vp), s, u, v).G() -
                            bilinear_forms(Curve(vm), s, u, v).G()) /
                           (2.0 * h);
            }
        out.push_back(make("grad_metric vs central FD", covector_mismatch(g, fd, cfg.fd_floor),
                           cfg.fd_tol));

        // Translation directions pair to zero.
        TangentField tr = TangentField::Zero(c.n(), 3);
        tr.col(2).setConstant(1.0);
        out.push_back(make("<grad_metric, translation> = 0",
                           std::abs(pair_dual(g, tr)) / std::max(g.norm(), 1e-30), 1e-12));

        // Slot symmetry between apply_dG and grad_metric.
        const TangentField w = random_field(24, 3, rng);
        const double lhs = pair_dual(apply_dG(c, s, w, v), u);
        const double rhs = pair_dual(grad_metric(c, s, v, u), w);
        out.push_back(make("apply_dG slot symmetry", rel_err(lhs, rhs), 1e-10));

        // Directional FD of the assembled Gram matrix applied to v.
        const double hh = cfg.fd_step_factor * arc_length(c);
        const Mat Sp = assemble_gram(Curve(c.vertices() + hh * w), s).scalar_matrix();
        const Mat Sm = assemble_gram(Curve(c.vertices() - hh * w), s).scalar_matrix();
        const Covector fd_dg = ((Sp - Sm) / (2.0 * hh)) * v;
        out.push_back(make("apply_dG vs Gram-matrix FD",
                           covector_mismatch(apply_dG(c, s, w, v), fd_dg, cfg.fd_floor),
                           cfg.fd_tol));
    }
    {
        // Christoffel term: quadratic homogeneity and translation equivariance.
        const Curve c = random_embedded_curve(20, 3, rng);
        const TangentField v = random_field(20, 3, rng);
        const GramOperator gram = assemble_gram(c, s);
        const TangentField a1 = christoffel_apply(gram, v);
        const TangentField a2 = christoffel_apply(gram, TangentField(3.0 * v));
        out.push_back(make("A(lam v)(lam v) = lam^2 A(v)v",
                           covector_mismatch(a2, TangentField(9.0 * a1), 1e-30), 1e-10));
        Mat moved = c.vertices();
        moved.rowwise() += RowVec::Constant(3, 2.5);
        const TangentField a3 = christoffel_apply(Curve(moved), s, v);
        out.push_back(make("A(v)v translation equivariance", covector_mismatch(a3, a1, 1e-30),
                           1e-10));
    }
    return out;
}

std::vector<CheckResult> check_geodesic(const RunConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed + 2);
    std::vector<CheckResult> out;
    const double s = cfg.s;
    const double p = 2.0 * s + 1.0;

    // Smooth non-rigid launch velocity on a 48-gon circle, unit G-speed.
    const Curve circ = make_circle(48, 1.0, 3);
    TangentField v0(48, 3);
    for (int i = 0; i < 48; ++i) {
        const double t = 2.0 * kPi * i / 48;
        v0(i, 0) = 0.4 * std::sin(2.0 * t);
        v0(i, 1) = -0.25 * std::cos(t);
        v0(i, 2) = 0.5 * std::cos(2.0 * t) + 0.3 * std::sin(3.0 * t);
    }
    v0 /= g_norm(circ, s, v0);

    ShootOptions so;
    so.T = 1.0;
    so.steps = 100;
    so.adaptive = false;  // measure the raw integrator
    const Trajectory traj = shoot(circ, v0, s, so);
    out.push_back(make("shoot completes without abort", traj.aborted ? 1.0 : 0.0, 0.0, traj.note));
    out.push_back(make("speed drift (100 RK4 steps)", traj.speed_drift(), 1e-6));

    {
        // Fourth-order decay of the drift under step halving, measured in the
        // truncation-dominated regime (the drift at 100 steps is already on
        // the roundoff floor).
        const auto drift_at = [&](int steps) {
            ShootOptions sh = so;
            sh.steps = steps;
            return shoot(circ, v0, s, sh).speed_drift();
        };
        const double d6 = drift_at(6), d12 = drift_at(12), d24 = drift_at(24);
        const double ratio = std::min(d6 / d12, d12 / d24);
        out.push_back(make("drift reduction per halving >= 8x", 8.0 / ratio, 1.0,
                           "observed ratios " + std::to_string(d6 / d12) + ", " +
                               std::to_string(d12 / d24)));
    }
    {
        // Time reversal returns to the start.
        const PhaseState& end = traj.states.back();
        const Trajectory back = shoot(end.curve, TangentField(-end.velocity), s, so);
        const double err_x =
            (back.states.back().curve.vertices() - circ.vertices()).cwiseAbs().maxCoeff();
        const double err_v = (back.states.back().velocity + v0).cwiseAbs().maxCoeff();
        out.push_back(make("time reversal round trip", err_x + err_v, 1e-5));
    }
    {
        // Lipschitz budgets along the trajectory.
        double worstE = 0.0, worstL = 0.0;
        const double e0 = std::sqrt(traj.diag.front().energy);
        const double l0 = std::sqrt(traj.diag.front().length);
        for (std::size_t k = 0; k < traj.diag.size(); ++k) {
            const double glen = traj.g_length(static_cast<int>(k));
            worstE = std::max(worstE, std::abs(std::sqrt(traj.diag[k].energy) - e0) -
                                          std::sqrt(1.0 + p / 4.0) * glen);
            worstL = std::max(worstL,
                              std::abs(std::sqrt(traj.diag[k].length) - l0) - 0.5 * glen);
        }
        out.push_back(make("energy Lipschitz budget", worstE, 1e-3));
        out.push_back(make("arc-length Lipschitz budget", worstL, 1e-3));
    }
    {
        // Constrained shooting: length and barycenter drift.
        TangentField vrot(48, 3);
        for (int i = 0; i < 48; ++i) {
            const double t = 2.0 * kPi * i / 48;
            vrot(i, 0) = -std::sin(t) + 0.2 * std::sin(2.0 * t);
            vrot(i, 1) = std::cos(t) - 0.2 * std::cos(2.0 * t);
            vrot(i, 2) = 0.15 * std::sin(t);
        }
        vrot /= g_norm(circ, s, vrot);
        ShootOptions sc;
        sc.T = 1.0;
        sc.steps = 100;
        sc.adaptive = false;
        const double L0 = arc_length(circ);
        const Trajectory tl = shoot_constrained(circ, vrot, s, length_constraint(L0), sc);
        out.push_back(make("length constraint drift (relative)", tl.constraint_drift() / L0, 1e-6,
                           tl.note));
        RowVec b0 = circ.vertices().colwise().mean();
        TangentField vz = vrot;
        vz.rowwise() -= vz.colwise().mean();  // orthogonal to translations
        const Trajectory tb = shoot_constrained(circ, vz, s, barycenter_constraint(b0), sc);
        out.push_back(make("barycenter constraint drift", tb.constraint_drift(), 1e-8, tb.note));
    }
    {
        // Discrete Hoelder relation between path length and path energy.
        const Curve a = make_circle(24, 1.0, 3);
        RowVec b(3);
        b << 0.8, -0.3, 0.5;
        DiscretePath pth;
        std::mt19937_64 prng(cfg.seed + 7);
        for (int k = 0; k <= 6; ++k) {
            Mat x = a.vertices();
            x.rowwise() += (static_cast<double>(k) / 6) * b;
            if (k > 0 && k < 6) x += 0.02 * random_field(24, 3, prng);
            pth.curves.emplace_back(std::move(x));
        }
        const double pe = path_energy(pth, s);
        double glen = 0.0;
        for (int q = 0; q < 6; ++q) {
            const Mat d = pth.curves[q + 1].vertices() - pth.curves[q].vertices();
            const Curve mid(0.5 * (pth.curves[q].vertices() + pth.curves[q + 1].vertices()));
            glen += std::sqrt(assemble_gram(mid, s).quadratic(d, d));
        }
        out.push_back(make("path length^2 <= 2 path energy", glen * glen / (2.0 * pe), 1.0 + 1e-12));
    }
    {
        // Pure translation path: energy is |b|^2 L / 2 and already stationary.
        // Stationarity of the straight path holds to O(|b|²) only, so b is
        // sized to push that residual below the solver tolerance.
        const Curve a = make_circle(32, 1.0, 3);
        RowVec b(3);
        b << 2e-3, -1e-3, 1.5e-3;
        Mat moved = a.vertices();
        moved.rowwise() += b;
        ConnectOptions co;
        co.tol = 1e-6;
        const ConnectResult res = connect(a, Curve(moved), s, 4, co);
        const double expect = 0.5 * b.squaredNorm() * arc_length(a);
        out.push_back(make("translation connect energy = |b|^2 L / 2",
                           rel_err(res.energy, expect), 1e-8));
        out.push_back(make("translation connect converged", res.converged ? 0.0 : 1.0, 0.0,
                           res.flag));
    }
    return out;
}

std::vector<CheckResult> run_checks(const std::string& suite, const RunConfig& cfg) {
    std::vector<CheckResult> out;
    const auto append = [&](std::vector<CheckResult> v) {
        out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    };
    if (suite == "identities")
        append(check_identities(cfg));
    else if (suite == "gradients")
        append(check_gradients(cfg));
    else if (suite == "geodesic")
        append(check_geodesic(cfg));
    else if (suite == "all") {
        append(check_identities(cfg));
        append(check_gradients(cfg));
        append(check_geodesic(cfg));
    } else
        throw std::invalid_argument("unknown check suite '" + suite +
                                    "' (expected identities|gradients|geodesic|all)");
    return out;
}

std::string checks_to_json(const std::vector<CheckResult>& results) {
    nlohmann::json j;
    j["checks"] = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json c;
        c["name"] = r.name;
        c["pass"] = r.passed;
        c["observed"] = r.observed;
        c["threshold"] = r.threshold;
        if (!r.details.empty()) c["details"] = r.details;
        j["checks"].push_back(std::move(c));
    }
    j["pass"] = all_passed(results);
    return j.dump(2);
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

} // namespace knotgeo
