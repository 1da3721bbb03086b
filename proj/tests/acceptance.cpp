// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit code is the number of failed criteria.

#include "knotgeo/check.hpp"
#include "knotgeo/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

using namespace knotgeo;

namespace {

constexpr double kS = 1.75;
constexpr double kPi = std::numbers::pi;

int g_failures = 0;
std::vector<std::pair<int, std::string>> g_lines;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "[%s] criterion %2d: %s — %s", pass ? "PASS" : "FAIL", id,
                  what.c_str(), detail.c_str());
    g_lines.emplace_back(id, buf);
    if (!pass) ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

// Lipschitz budgets along a trajectory; returns the worst signed violation
// (negative means satisfied with margin).
double budget_violation(const Trajectory& traj) {
    const double p = 2.0 * kS + 1.0;
    const double e0 = std::sqrt(traj.diag.front().energy);
    const double l0 = std::sqrt(traj.diag.front().length);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.diag.size(); ++k) {
        const double glen = traj.g_length(static_cast<int>(k));
        worst = std::max(worst, std::abs(std::sqrt(traj.diag[k].energy) - e0) -
                                    (std::sqrt(1.0 + p / 4.0) * glen + 1e-3));
        worst = std::max(worst,
                         std::abs(std::sqrt(traj.diag[k].length) - l0) - (0.5 * glen + 1e-3));
    }
    return worst;
}

double budget_violation(const DiscretePath& path) {
    const double p = 2.0 * kS + 1.0;
    const double e0 = std::sqrt(energy(path.curves.front(), kS));
    const double l0 = std::sqrt(arc_length(path.curves.front()));
    double glen = 0.0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int q = 0; q < path.segments(); ++q) {
        const Mat d = path.curves[q + 1].vertices() - path.curves[q].vertices();
        const Curve mid(0.5 * (path.curves[q].vertices() + path.curves[q + 1].vertices()));
        glen += std::sqrt(assemble_gram(mid, kS).quadratic(d, d));
        const Curve& c = path.curves[q + 1];
        worst = std::max(worst, std::abs(std::sqrt(energy(c, kS)) - e0) -
                                    (std::sqrt(1.0 + p / 4.0) * glen + 1e-3));
        worst = std::max(worst, std::abs(std::sqrt(arc_length(c)) - l0) - (0.5 * glen + 1e-3));
    }
    return worst;
}

double lower_bound_margin(const Curve& c) {
    return energy(c, kS) * std::pow(arc_length(c), 2.0 * kS - 3.0) - kPi * kPi * 0.98;
}

TangentField smooth_field(const Curve& c, int seed_phase) {
    const int n = c.n();
    TangentField v(n, 3);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n + 0.1 * seed_phase;
        v(i, 0) = 0.4 * std::sin(2 * t);
        v(i, 1) = -0.25 * std::cos(t);
        v(i, 2) = 0.5 * std::cos(2 * t) + 0.3 * std::sin(3 * t);
    }
    v /= g_norm(c, kS, v);
    return v;
}

} // namespace

int main() {
    std::vector<std::size_t> produced;  // indices into keep_alive
    std::vector<Trajectory> keep_alive;

    // 1. Energy identities on 20 random embedded curves.
    {
        Timer timer;
        std::mt19937_64 rng(0xACCE97);
        std::uniform_int_distribution<int> nd(32, 128);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const Curve c = random_embedded_curve(nd(rng), 3, rng);
            const PairTable pt = build_pair_table(c, kS);
            const double E = energy(pt);
            const FormValues f = bilinear_forms(pt, c.vertices(), c.vertices());
            worst = std::max({worst, std::abs(f.B1 - E) / E, std::abs(f.B2 - E) / E,
                              std::abs(f.B3 - 2.0 * E) / (2.0 * E)});
        }
        const double sec = timer.seconds();
        report(1, worst <= 1e-12 && sec < 5.0, "energy identities B1=B2=E, B3=2E (rel 1e-12)",
               "worst rel err " + fmt(worst) + ", " + fmt(sec) + " s");
    }

    // 2. Scale law and Euler identity.
    {
        std::mt19937_64 rng(0xACCE98);
        const Curve c = random_embedded_curve(64, 3, rng);
        const double E = energy(c, kS);
        double worst_scale = 0.0;
        for (double lam : {0.5, 2.0, 10.0}) {
            const double got = energy(Curve(lam * c.vertices()), kS);
            worst_scale =
                std::max(worst_scale, std::abs(got - std::pow(lam, 3.0 - 2.0 * kS) * E) /
                                          (std::pow(lam, 3.0 - 2.0 * kS) * E));
        }
        const double euler = pair_dual(grad_energy(c, kS), c.vertices());
        const double euler_err = std::abs(euler - (3.0 - 2.0 * kS) * E) / std::abs((3.0 - 2.0 * kS) * E);
        report(2, worst_scale <= 1e-12 && euler_err <= 1e-10,
               "scale law E(λγ)=λ^{3-2s}E and <grad E, γ>=(3-2s)E",
               "scale rel " + fmt(worst_scale) + ", Euler rel " + fmt(euler_err));
    }

    // 3. Circle oracle convergence.
    {
        Timer timer;
        const double cf = circle_energy_closed_form(kS, 1.0);
        bool monotone = true;
        double prev = 0.0, err1024 = 0.0;
        std::string series;
        for (int n : {32, 64, 128, 256, 512, 1024}) {
            const double E = energy(make_circle(n, 1.0), kS);
            if (E <= prev || E >= cf) monotone = false;
            prev = E;
            const double rel = std::abs(E - cf) / cf;
            if (n == 1024) err1024 = rel;
            series += " n=" + std::to_string(n) + ":" + fmt(rel);
        }
        const double sec = timer.seconds();
        report(3, monotone && err1024 <= 0.01 && sec < 30.0,
               "circle energy converges monotonically, err <= 1% at n=1024",
               (monotone ? "monotone;" : "NOT monotone;") + series + ", " + fmt(sec) + " s");
    }

    // 4. Lower bound on generated curves and on flow/shoot/connect iterates at n >= 256.
    {
        double worst_margin = std::numeric_limits<double>::infinity();
        for (int n : {256, 512}) {
            worst_margin = std::min(worst_margin, lower_bound_margin(make_circle(n, 1.0)));
            worst_margin = std::min(worst_margin, lower_bound_margin(make_torus_knot(2, 3, n)));
            worst_margin = std::min(worst_margin, lower_bound_margin(make_torus_knot(-3, 2, n)));
            worst_margin = std::min(worst_margin, lower_bound_margin(make_figure_eight(n)));
        }
        // Flow on a perturbed 256-gon.
        std::mt19937_64 rng(0xACCE99);
        Mat base = make_circle(256, 1.0).vertices();
        base += 0.02 * random_field(256, 3, rng);
        FlowOptions fo;
        fo.steps = 15;
        fo.step0 = 0.5;
        keep_alive.push_back(flow(Curve(base), kS, fo));
        // Shoot on a 256-gon.
        const Curve c256 = make_circle(256, 1.0);
        ShootOptions so;
        so.T = 0.25;
        so.steps = 15;
        so.adaptive = false;
        keep_alive.push_back(shoot(c256, smooth_field(c256, 1), kS, so));
        // Connect across a translation at n = 256.
        RowVec b(3);
        b << 2e-3, -1e-3, 1e-3;
        Mat moved = c256.vertices();
        moved.rowwise() += b;
        const ConnectResult cres = connect(c256, Curve(moved), kS, 4, {});
        bool ok = true;
        std::string note;
        for (const auto& traj : keep_alive) {
            if (traj.aborted) {
                ok = false;
                note = "a producing run aborted: " + traj.note;
            }
            for (const auto& st : traj.states)
                worst_margin = std::min(worst_margin, lower_bound_margin(st.curve));
        }
        for (const auto& cv : cres.path.curves)
            worst_margin = std::min(worst_margin, lower_bound_margin(cv));
        produced.push_back(keep_alive.size() - 2);
        produced.push_back(keep_alive.size() - 1);
        report(4, ok && worst_margin >= 0.0,
               "E L^{2s-3} >= 0.98 π² on generators and produced iterates (n >= 256)",
               "worst margin above bound " + fmt(worst_margin) + (note.empty() ? "" : "; " + note));
    }

    // 5. Gradient gates against central finite differences.
    {
        Timer timer;
        std::mt19937_64 rng(0xACCE9A);
        double worst_e = 0.0, worst_m = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const Curve c = random_embedded_curve(24, 3, rng);
            const double h = 1e-5 * arc_length(c);
            const Covector ge = grad_energy(c, kS);
            Covector fd(24, 3);
            for (int i = 0; i < 24; ++i)
                for (int d = 0; d < 3; ++d) {
                    Mat vp = c.vertices(), vm = c.vertices();
                    vp(i, d) += h;
                    vm(i, d) -= h;
                    fd(i, d) = (energy(Curve(vp), kS) - energy(Curve(vm), kS)) / (2 * h);
                }
            worst_e = std::max(worst_e, (ge - fd).norm() / std::max(fd.norm(), 1e-10));

            const TangentField u = random_field(24, 3, rng);
            const TangentField v = random_field(24, 3, rng);
            const Covector gm = grad_metric(c, kS, u, v);
            Covector fdm(24, 3);
            for (int i = 0; i < 24; ++i)
                for (int d = 0; d < 3; ++d) {
                    Mat vp = c.vertices(), vm = c.vertices();
                    vp(i, d) += h;
                    vm(i, d) -= h;
                    fdm(i, d) = (bilinear_forms(Curve(vp), kS, u, v).G() -
                                 bilinear_forms(Curve(vm), kS, u, v).G()) /
                                (2 * h);
                }
            worst_m = std::max(worst_m, (gm - fdm).norm() / std::max(fdm.norm(), 1e-10));
        }
        const double sec = timer.seconds();
        report(5, worst_e <= 1e-6 && worst_m <= 1e-6 && sec < 60.0,
               "grad_energy and grad_metric match central FD (rel 1e-6)",
               "energy " + fmt(worst_e) + ", metric " + fmt(worst_m) + ", " + fmt(sec) + " s");
    }

    // 6. Geodesic speed conservation and integrator order.
    {
        const Curve c = make_circle(48, 1.0);
        const TangentField v0 = smooth_field(c, 0);
        ShootOptions so;
        so.T = 1.0;
        so.steps = 100;
        so.adaptive = false;
        keep_alive.push_back(shoot(c, v0, kS, so));
        const Trajectory& traj = keep_alive.back();
        produced.push_back(keep_alive.size() - 1);
        // Order study in the truncation-dominated regime; at 100 steps the
        // drift already sits on the roundoff floor (~1e-13).
        const auto drift_at = [&](int steps) {
            ShootOptions oc = so;
            oc.steps = steps;
            return shoot(c, v0, kS, oc).speed_drift();
        };
        const double d6 = drift_at(6), d12 = drift_at(12), d24 = drift_at(24);
        const double ratio = std::min(d6 / d12, d12 / d24);
        const double drift = traj.speed_drift();
        report(6, !traj.aborted && drift <= 1e-6 && ratio >= 8.0,
               "RK4 speed drift <= 1e-6 at 100 steps; >= 8x decay per halving",
               "drift " + fmt(drift) + ", halving ratios " + fmt(d6 / d12) + "/" +
                   fmt(d12 / d24));
    }

    // 8 (run before 7 so its trajectory joins the Lipschitz pool).
    // BVP/IVP consistency: shoot then connect.
    {
        Timer timer;
        const Curve a = make_circle(32, 1.0);
        TangentField v0 = smooth_field(a, 2);
        const double sigma = 0.25;  // small launch speed
        v0 *= sigma;
        ShootOptions so;
        so.T = 0.3;
        so.steps = 60;
        so.adaptive = false;
        keep_alive.push_back(shoot(a, v0, kS, so));
        const Trajectory& traj = keep_alive.back();
        produced.push_back(keep_alive.size() - 1);
        bool ok = !traj.aborted;
        std::string detail;
        if (ok) {
            const Curve& b = traj.states.back().curve;
            ConnectOptions co;
            co.tol = 1e-6;
            co.max_iters = 4000;
            const ConnectResult res = connect(a, b, kS, 8, co);
            const double expect = 0.5 * std::pow(so.T * sigma, 2.0);
            const double e_err = std::abs(res.energy - expect) / expect;
            const double mean_speed = res.segment_speeds.mean();
            const double var = (res.segment_speeds.array() - mean_speed).abs().maxCoeff() / mean_speed;
            ok = res.converged && e_err <= 0.01 && var <= 0.01;
            detail = "path energy rel err " + fmt(e_err) + ", speed spread " + fmt(var) +
                     ", iters " + std::to_string(res.iterations) + ", " + fmt(timer.seconds()) + " s";
            const double bv = budget_violation(res.path);
            if (bv > 0.0) {
                ok = false;
                detail += ", path budget violated by " + fmt(bv);
            }
        } else {
            detail = "shoot aborted: " + traj.note;
        }
        report(8, ok && timer.seconds() < 600.0,
               "shoot-then-connect round trip within 1%; segment speeds within 1%", detail);
    }

    // 9. Constrained shooting drift.
    {
        const Curve c = make_circle(48, 1.0);
        TangentField v0(48, 3);
        for (int i = 0; i < 48; ++i) {
            const double t = 2.0 * kPi * i / 48;
            v0(i, 0) = -std::sin(t) + 0.2 * std::sin(2 * t);
            v0(i, 1) = std::cos(t) - 0.2 * std::cos(2 * t);
            v0(i, 2) = 0.15 * std::sin(t);
        }
        v0 /= g_norm(c, kS, v0);
        ShootOptions so;
        so.T = 1.0;
        so.steps = 100;
        so.adaptive = false;
        const double L0 = arc_length(c);
        keep_alive.push_back(shoot_constrained(c, v0, kS, length_constraint(L0), so));
        const Trajectory& tl = keep_alive.back();
        produced.push_back(keep_alive.size() - 1);
        TangentField vz = v0;
        vz.rowwise() -= vz.colwise().mean();
        keep_alive.push_back(
            shoot_constrained(c, vz, kS, barycenter_constraint(c.vertices().colwise().mean()), so));
        const Trajectory& tb = keep_alive.back();
        produced.push_back(keep_alive.size() - 1);
        const double ldrift = tl.constraint_drift() / L0;
        const double bdrift = tb.constraint_drift();
        report(9, !tl.aborted && !tb.aborted && ldrift <= 1e-6 && bdrift <= 1e-8,
               "length drift <= 1e-6 (rel), barycenter drift <= 1e-8, no re-projection",
               "length " + fmt(ldrift) + ", barycenter " + fmt(bdrift));
    }

    // 10. Self-avoidance smoke test: squeeze a circle's strands together.
    {
        const Curve c = make_circle(64, 1.0);
        TangentField v0(64, 3);
        for (int i = 0; i < 64; ++i) {
            // Compress along x: opposite strands head toward each other.
            v0(i, 0) = -c.vertices()(i, 0);
            v0(i, 1) = 0.0;
            v0(i, 2) = 0.0;
        }
        v0 /= g_norm(c, kS, v0);
        v0 *= 8.0;  // strong enough that straight-line advection self-intersects
        // Evidence that the launch is collision-bound without the metric: the
        // minimum separation along the linearly advected path crosses zero.
        double linear_min = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 100; ++k) {
            const Mat x = c.vertices() + (k / 100.0) * v0;
            try {
                linear_min = std::min(linear_min, min_separation(Curve(x)));
            } catch (const std::invalid_argument&) {
                linear_min = 0.0;
            }
        }
        ShootOptions so;
        so.T = 1.0;
        so.steps = 100;
        so.adaptive = false;
        keep_alive.push_back(shoot(c, v0, kS, so));
        const Trajectory& traj = keep_alive.back();
        produced.push_back(keep_alive.size() - 1);
        double min_sep = std::numeric_limits<double>::infinity();
        for (const auto& d : traj.diag) min_sep = std::min(min_sep, d.min_separation);
        const double bv = budget_violation(traj);
        report(10, !traj.aborted && min_sep > 0.0 && bv <= 0.0 && linear_min < 1e-2,
               "pinching shot keeps min_separation > 0 and E within budget; no abort",
               "geodesic min separation " + fmt(min_sep) + " vs linear-path " + fmt(linear_min) +
                   ", budget margin " + fmt(-bv) +
                   (traj.aborted ? ", aborted: " + traj.note : ""));
    }

    // 7. Lipschitz budgets along every trajectory produced above.
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t idx : produced) worst = std::max(worst, budget_violation(keep_alive[idx]));
        report(7, worst <= 0.0,
               "sqrt(E) and sqrt(L) Lipschitz budgets along all produced trajectories",
               "worst violation " + fmt(worst) + " over " + std::to_string(produced.size()) +
                   " trajectories");
    }

    std::sort(g_lines.begin(), g_lines.end());
    for (const auto& [id, line] : g_lines) std::puts(line.c_str());
    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
