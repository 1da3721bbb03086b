#include "knotgeo/geodesic.hpp"

#include <cmath>

namespace knotgeo {

double Trajectory::speed_drift() const {
    if (diag.empty()) return 0.0;
    const double s0 = diag.front().speed;
    double worst = 0.0;
    for (const auto& d : diag) worst = std::max(worst, std::abs(d.speed - s0));
    return s0 > 0.0 ? worst / s0 : worst;
}

double Trajectory::g_length(int upto) const {
    const int last = upto < 0 ? static_cast<int>(diag.size()) - 1 : upto;
    double acc = 0.0;
    for (int k = 0; k <= last && k < static_cast<int>(diag.size()); ++k)
        acc += diag[k].g_step;
    return acc;
}

double Trajectory::constraint_drift() const {
    double worst = 0.0;
    for (const auto& v : constraint_values)
        worst = std::max(worst, v.cwiseAbs().maxCoeff());
    return worst;
}

std::pair<TangentField, TangentField> spray(const PhaseState& st, double s) {
    const GramOperator gram = assemble_gram(st.curve, s);
    return {st.velocity, -christoffel_apply(gram, st.velocity)};
}

namespace {

struct Phase {
    Mat x;  // vertices
    Mat v;  // velocity
};

StateDiagnostics diagnostics(const Curve& c, const TangentField& v, double s,
                             double prev_speed, double dt) {
    StateDiagnostics d;
    d.energy = energy(c, s);
    d.length = arc_length(c);
    d.min_separation = min_separation(c);
    d.speed = g_norm(c, s, v);
    d.g_step = dt > 0.0 ? 0.5 * (prev_speed + d.speed) * dt : 0.0;
    return d;
}

// One RK4 step of ẏ = f(y). The derivative callback may throw EmbeddingError
// when an intermediate configuration degenerates.
Phase rk4_step(const Phase& y, double h,
               const std::function<Phase(const Phase&)>& f) {
    const Phase k1 = f(y);
    const Phase k2 = f({y.x + 0.5 * h * k1.x, y.v + 0.5 * h * k1.v});
    const Phase k3 = f({y.x + 0.5 * h * k2.x, y.v + 0.5 * h * k2.v});
    const Phase k4 = f({y.x + h * k3.x, y.v + h * k3.v});
    return {y.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            y.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

// Shared integration driver for the free and constrained sprays.
Trajectory integrate(const Curve& gamma0, const TangentField& v0, double s,
                     const ShootOptions& opts,
                     const std::function<Phase(const Phase&)>& f,
                     const std::function<Vec(const Curve&)>* constraint_value,
                     const std::function<void(Phase&)>* reproject) {
    if (opts.steps < 1) throw std::invalid_argument("steps must be >= 1");
    require_exponent(s);
    Trajectory traj;
    Phase y{gamma0.vertices(), v0};
    double t = 0.0;
    const double h = opts.T / opts.steps;

    StateDiagnostics d0 = diagnostics(gamma0, v0, s, 0.0, 0.0);
    if (!(d0.speed > 0.0) || !std::isfinite(d0.speed))
        throw std::invalid_argument("initial velocity must have positive finite G-norm");
    const double sigma0 = d0.speed;
    traj.states.push_back({gamma0, v0, 0.0});
    traj.diag.push_back(d0);
    if (constraint_value) traj.constraint_values.push_back((*constraint_value)(gamma0));

    // Advances by h, halving on excessive per-step speed drift.
    std::function<bool(Phase&, double, double, int)> advance =
        [&](Phase& state, double dt, double speed_before, int depth) -> bool {
        Phase cand = rk4_step(state, dt, f);
        if (opts.adaptive && depth < opts.max_halvings) {
            const Curve cc(cand.x);
            const double speed_after = g_norm(cc, s, cand.v);
            if (std::abs(speed_after - speed_before) > opts.per_step_drift_tol * sigma0) {
                Phase half = state;
                const double mid_speed = speed_before;  // drift is what we are bounding
                if (!advance(half, 0.5 * dt, mid_speed, depth + 1)) return false;
                const Curve hc(half.x);
                const double sp = g_norm(hc, s, half.v);
                if (!advance(half, 0.5 * dt, sp, depth + 1)) return false;
                state = half;
                return true;
            }
        }
        state = cand;
        return true;
    };

    for (int k = 0; k < opts.steps; ++k) {
        try {
            if (!advance(y, h, traj.diag.back().speed, 0)) {
                traj.aborted = true;
                traj.note = "step halving exhausted at t = " + std::to_string(t);
                return traj;
            }
        } catch (const EmbeddingError& e) {
            traj.aborted = true;
            traj.note = std::string("embeddedness proxy violated mid-flight: ") + e.what();
            return traj;
        } catch (const std::invalid_argument& e) {
            traj.aborted = true;
            traj.note = std::string("degenerate configuration mid-flight: ") + e.what();
            return traj;
        }
        t += h;
        if (reproject) (*reproject)(y);
        Curve c(y.x);
        const double sep = min_separation(c);
        if (!(sep > opts.sep_threshold_factor * arc_length(c))) {
            traj.aborted = true;
            traj.note = "embeddedness proxy violated at t = " + std::to_string(t) +
                        " (min_separation " + std::to_string(sep) + ")";
            return traj;
        }
        StateDiagnostics d = diagnostics(c, y.v, s, traj.diag.back().speed, h);
        traj.states.push_back({std::move(c), y.v, t});
        traj.diag.push_back(d);
        if (constraint_value)
            traj.constraint_values.push_back((*constraint_value)(traj.states.back().curve));
    }
    return traj;
}

} // namespace

Trajectory shoot(const Curve& gamma0, const TangentField& v0, double s,
                 const ShootOptions& opts) {
    const auto f = [s](const Phase& y) -> Phase {
        const Curve c(y.x);
        const GramOperator gram = assemble_gram(c, s);
        return {y.v, -christoffel_apply(gram, y.v)};
    };
    return integrate(gamma0, v0, s, opts, f, nullptr, nullptr);
}

Constraint length_constraint(double L0) {
    Constraint phi;
    phi.name = "total-length";
    phi.k = 1;
    phi.value = [L0](const Curve& c) {
        Vec v(1);
        v[0] = arc_length(c) - L0;
        return v;
    };
    phi.jacobian = [](const Curve& c) {
        const EdgeData e = edge_data(c);
        const int n = c.n();
        Covector row = Covector::Zero(n, c.dim());
        for (int i = 0; i < n; ++i) {
            row.row((i + 1) % n) += e.tangent.row(i);
            row.row(i) -= e.tangent.row(i);
        }
        return std::vector<Covector>{row};
    };
    phi.second_directional = [](const Curve& c, const TangentField& u) {
        const EdgeData e = edge_data(c);
        const int n = c.n();
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const RowVec du = u.row((i + 1) % n) - u.row(i);
            const double along = e.tangent.row(i).dot(du);
            acc += (du.squaredNorm() - along * along) / e.length[i];
        }
        Vec v(1);
        v[0] = acc;
        return v;
    };
    return phi;
}

Constraint barycenter_constraint(RowVec b0) {
    Constraint phi;
    phi.name = "barycenter";
    phi.k = static_cast<int>(b0.size());
    phi.value = [b0](const Curve& c) {
        const RowVec mean = c.vertices().colwise().mean();
        return Vec((mean - b0).transpose());
    };
    phi.jacobian = [](const Curve& c) {
        std::vector<Covector> rows;
        const int n = c.n();
        for (int d = 0; d < c.dim(); ++d) {
            Covector row = Covector::Zero(n, c.dim());
            row.col(d).setConstant(1.0 / n);
            rows.push_back(std::move(row));
        }
        return rows;
    };
    phi.second_directional = [](const Curve& c, const TangentField&) {
        return Vec(Vec::Zero(c.dim()));
    };
    return phi;
}

Trajectory shoot_constrained(const Curve& gamma0, const TangentField& v0, double s,
                             const Constraint& phi, const ShootOptions& opts) {
    if (phi.k < 1 || !phi.value || !phi.jacobian || !phi.second_directional)
        throw std::invalid_argument("constraint is not fully specified");

    // Pseudoinverse application y ↦ DΦ† y at a curve; shared by the spray and
    // the projections. Throws on a rank-deficient normal matrix.
    struct Saddle {
        std::vector<Covector> rows;
        std::vector<TangentField> lifted;  // J⁻¹ DΦᵀ rows
        Eigen::LDLT<Mat> normal;           // DΦ J⁻¹ DΦᵀ
    };
    const auto build_saddle = [&](const Curve& c, const GramOperator& gram) {
        Saddle sd;
        sd.rows = phi.jacobian(c);
        if (static_cast<int>(sd.rows.size()) != phi.k)
            throw std::invalid_argument("constraint jacobian row count mismatch");
        Mat N(phi.k, phi.k);
        for (int a = 0; a < phi.k; ++a) sd.lifted.push_back(gram.solve(sd.rows[a]));
        for (int a = 0; a < phi.k; ++a)
            for (int b = 0; b < phi.k; ++b)
                N(a, b) = pair_dual(sd.rows[a], sd.lifted[b]);
        sd.normal.compute(N);
        const double scale = N.cwiseAbs().maxCoeff();
        if (sd.normal.info() != Eigen::Success || !(scale > 0.0) ||
            std::abs(sd.normal.vectorD().minCoeff()) < 1e-14 * scale)
            throw ConstraintDegeneracyError("constraint normal matrix DΦ J⁻¹ DΦᵀ is rank-deficient (" +
                                            phi.name + ")");
        return sd;
    };
    const auto pinv_apply = [&](const Saddle& sd, const Vec& y) {
        const Vec lam = sd.normal.solve(y);
        TangentField out = TangentField::Zero(sd.lifted[0].rows(), sd.lifted[0].cols());
        for (int a = 0; a < phi.k; ++a) out += lam[a] * sd.lifted[a];
        return out;
    };

    {
        const Vec v = phi.value(gamma0);
        if (v.cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("initial curve violates the constraint (" + phi.name +
                                        "): |Φ| = " + std::to_string(v.cwiseAbs().maxCoeff()));
    }

    // Project the initial velocity onto ker DΦ if necessary.
    TangentField v0p = v0;
    std::string projection_note;
    {
        const GramOperator gram = assemble_gram(gamma0, s);
        const Saddle sd = build_saddle(gamma0, gram);
        Vec c(phi.k);
        for (int a = 0; a < phi.k; ++a) c[a] = pair_dual(sd.rows[a], v0);
        if (c.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, gram.norm(v0))) {
            v0p -= pinv_apply(sd, c);
            projection_note = "initial velocity projected onto the constraint";
        }
    }

    const auto f = [&](const Phase& y) -> Phase {
        const Curve c(y.x);
        const GramOperator gram = assemble_gram(c, s);
        const Saddle sd = build_saddle(c, gram);
        const TangentField a = christoffel_apply(gram, y.v);
        Vec rhs = phi.second_directional(c, y.v);
        for (int r = 0; r < phi.k; ++r) rhs[r] -= pair_dual(sd.rows[r], a);
        return {y.v, -a - pinv_apply(sd, rhs)};
    };

    std::function<Vec(const Curve&)> cval = phi.value;
    std::function<void(Phase&)> reproject = [&](Phase& y) {
        for (int iter = 0; iter < 3; ++iter) {
            const Curve c(y.x);
            const Vec v = phi.value(c);
            if (v.cwiseAbs().maxCoeff() <= opts.reproject_tol) return;
            const GramOperator gram = assemble_gram(c, s);
            const Saddle sd = build_saddle(c, gram);
            y.x -= pinv_apply(sd, v);
        }
    };

    Trajectory traj = integrate(gamma0, v0p, s, opts, f, &cval,
                                opts.reproject ? &reproject : nullptr);
    if (!projection_note.empty())
        traj.note = traj.note.empty() ? projection_note : traj.note + "; " + projection_note;
    return traj;
}

namespace {

Curve segment_metric_curve(const DiscretePath& p, int q, PathMetricRule rule) {
    if (rule == PathMetricRule::Left) return p.curves[q];
    return Curve(0.5 * (p.curves[q].vertices() + p.curves[q + 1].vertices()));
}

} // namespace

double path_energy(const DiscretePath& p, double s, PathMetricRule rule) {
    const int K = p.segments();
    if (K < 1) throw std::invalid_argument("path needs at least one segment");
    for (int k = 1; k < K; ++k) {
        try {
            require_embedded(p.curves[k]);
        } catch (const EmbeddingError& e) {
            throw EmbeddingError("interior curve " + std::to_string(k) +
                                 " fails the embeddedness proxy: " + e.what());
        }
    }
    double acc = 0.0;
    for (int q = 0; q < K; ++q) {
        const Mat delta = p.curves[q + 1].vertices() - p.curves[q].vertices();
        const GramOperator gram = assemble_gram(segment_metric_curve(p, q, rule), s);
        acc += gram.quadratic(delta, delta);
    }
    return 0.5 * K * acc;
}

std::vector<Covector> path_energy_gradient(const DiscretePath& p, double s,
                                           PathMetricRule rule) {
    const int K = p.segments();
    std::vector<Covector> grams_delta(K);  // M(m_q) δ^q
    std::vector<Covector> gm(K);           // grad_metric(m_q; δ^q, δ^q)
    std::vector<Mat> deltas(K);
    for (int q = 0; q < K; ++q) {
        deltas[q] = p.curves[q + 1].vertices() - p.curves[q].vertices();
        const Curve mq = segment_metric_curve(p, q, rule);
        const GramOperator gram = assemble_gram(mq, s);
        grams_delta[q] = gram.apply(deltas[q]);
        gm[q] = grad_metric(mq, s, deltas[q], deltas[q]);
    }
    std::vector<Covector> out;
    for (int k = 1; k < K; ++k) {
        Covector g = 2.0 * (grams_delta[k - 1] - grams_delta[k]);
        if (rule == PathMetricRule::Midpoint)
            g += 0.5 * (gm[k - 1] + gm[k]);
        else
            g += gm[k];  // left rule: the metric curve of segment k is γ^k itself
        out.push_back(0.5 * K * g);
    }
    return out;
}

namespace {

// Interior-slice stacks: one covector/field per interior curve.
using Stack = std::vector<Mat>;

double stack_dual(const Stack& a, const Stack& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += pair_dual(a[k], b[k]);
    return acc;
}

} // namespace

ConnectResult connect(const Curve& a, const Curve& b, double s, int K,
                      const ConnectOptions& opts) {
    if (a.n() != b.n() || a.dim() != b.dim())
        throw std::invalid_argument("endpoints must share vertex count and dimension "
                                    "(resample first)");
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    require_exponent(s);

    ConnectResult res;
    DiscretePath path;
    if (opts.warm_start) {
        path = *opts.warm_start;
        if (path.segments() != K)
            throw std::invalid_argument("warm start has wrong segment count");
        path.curves.front() = a;
        path.curves.back() = b;
    } else {
        for (int k = 0; k <= K; ++k) {
            const double t = static_cast<double>(k) / K;
            path.curves.emplace_back((1.0 - t) * a.vertices() + t * b.vertices());
        }
    }

    double E = path_energy(path, s, opts.rule);
    const auto segment_speeds = [&](const DiscretePath& p) {
        Vec sp(K);
        for (int q = 0; q < K; ++q) {
            const Mat delta = p.curves[q + 1].vertices() - p.curves[q].vertices();
            sp[q] = K * std::sqrt(assemble_gram(segment_metric_curve(p, q, opts.rule), s)
                                      .quadratic(delta, delta));
        }
        return sp;
    };

    // L-BFGS in the preconditioned inner product: the initial matrix is the
    // block-diagonal Riesz solve per time slice, refreshed each iteration.
    const int memory = 8;
    std::vector<Stack> mem_s, mem_y;
    Stack grad, grad_prev, step_prev;
    double tau = 1.0;

    for (int it = 0; it < opts.max_iters; ++it) {
        const std::vector<Covector> g = path_energy_gradient(path, s, opts.rule);
        grad.assign(g.begin(), g.end());

        std::vector<GramOperator> grams;
        grams.reserve(K - 1 > 0 ? K - 1 : 0);
        for (int k = 1; k < K; ++k) grams.push_back(assemble_gram(path.curves[k], s));
        const auto precondition = [&](const Stack& q) {
            Stack r(q.size());
            for (std::size_t k = 0; k < q.size(); ++k) r[k] = grams[k].solve(q[k]);
            return r;
        };

        double grad_sq = 0.0;
        if (K > 1) grad_sq = stack_dual(grad, precondition(grad));
        res.grad_norm = std::sqrt(std::max(grad_sq, 0.0));
        res.iterations = it;
        if (res.grad_norm <= opts.tol || K == 1) {
            res.converged = true;
            break;
        }

        // Curvature pair from the previous accepted step.
        if (!grad_prev.empty()) {
            Stack y(grad.size());
            double ynorm2 = 0.0, snorm2 = 0.0;
            for (std::size_t k = 0; k < grad.size(); ++k) {
                y[k] = grad[k] - grad_prev[k];
                ynorm2 += y[k].squaredNorm();
                snorm2 += step_prev[k].squaredNorm();
            }
            const double ys = stack_dual(y, step_prev);
            if (ys > 1e-12 * std::sqrt(ynorm2 * snorm2)) {
                mem_s.push_back(step_prev);
                mem_y.push_back(std::move(y));
                if (static_cast<int>(mem_s.size()) > memory) {
                    mem_s.erase(mem_s.begin());
                    mem_y.erase(mem_y.begin());
                }
            }
        }

        // Two-loop recursion; all pairings are covector-field duals and the
        // center application is the slice-wise Riesz solve.
        Stack q = grad;
        std::vector<double> alpha(mem_s.size());
        for (int i = static_cast<int>(mem_s.size()) - 1; i >= 0; --i) {
            const double rho = 1.0 / stack_dual(mem_y[i], mem_s[i]);
            alpha[i] = rho * stack_dual(q, mem_s[i]);
            for (std::size_t k = 0; k < q.size(); ++k) q[k] -= alpha[i] * mem_y[i][k];
        }
        Stack dir = precondition(q);
        for (std::size_t i = 0; i < mem_s.size(); ++i) {
            const double rho = 1.0 / stack_dual(mem_y[i], mem_s[i]);
            const double beta = rho * stack_dual(mem_y[i], dir);
            for (std::size_t k = 0; k < dir.size(); ++k)
                dir[k] += (alpha[i] - beta) * mem_s[i][k];
        }
        double dd = stack_dual(grad, dir);
        if (!(dd > 0.0) || !std::isfinite(dd)) {
            // Lost descent; fall back to the plain preconditioned gradient.
            mem_s.clear();
            mem_y.clear();
            dir = precondition(grad);
            dd = grad_sq;
        }

        bool accepted = false;
        if (!mem_s.empty()) tau = 1.0;  // quasi-Newton steps start at unit length
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            DiscretePath cand = path;
            bool feasible = true;
            for (int k = 1; k < K; ++k) {
                Mat x = path.curves[k].vertices() - tau * dir[k - 1];
                if (!x.allFinite()) {
                    feasible = false;
                    break;
                }
                Curve c(std::move(x));
                if (!(min_separation(c) > opts.sep_threshold_factor * arc_length(c))) {
                    feasible = false;
                    break;
                }
                cand.curves[k] = std::move(c);
            }
            if (feasible) {
                const double Ec = path_energy(cand, s, opts.rule);
                if (Ec <= E - opts.armijo_c1 * tau * dd) {
                    step_prev.resize(dir.size());
                    for (std::size_t k = 0; k < dir.size(); ++k) step_prev[k] = -tau * dir[k];
                    grad_prev = grad;
                    path = std::move(cand);
                    E = Ec;
                    accepted = true;
                    if (mem_s.empty()) tau = std::min(tau * 2.0, 1.0);
                    break;
                }
            }
            tau *= 0.5;
        }
        if (!accepted) {
            res.flag = "line search could not find an embedded descent step";
            break;
        }
    }
    if (!res.converged && res.flag.empty()) {
        res.flag = "maximum iterations reached";
        res.iterations = opts.max_iters;
    }
    res.path = std::move(path);
    res.energy = E;
    res.segment_speeds = segment_speeds(res.path);
    return res;
}

Trajectory flow(const Curve& gamma0, double s, const FlowOptions& opts) {
    require_exponent(s);
    Trajectory traj;
    Curve cur = gamma0;
    double E = energy(cur, s);
    {
        StateDiagnostics d;
        d.energy = E;
        d.length = arc_length(cur);
        d.min_separation = min_separation(cur);
        d.speed = 0.0;
        d.g_step = 0.0;
        traj.states.push_back({cur, TangentField::Zero(cur.n(), cur.dim()), 0.0});
        traj.diag.push_back(d);
    }
    double tau = opts.step0;
    for (int k = 0; k < opts.steps; ++k) {
        const Covector grad = grad_energy(cur, s);
        const GramOperator gram = assemble_gram(cur, s);
        const TangentField dir = gram.solve(grad);
        const double grad_sq = pair_dual(grad, dir);

        bool accepted = false;
        Curve next = cur;
        double Enext = E;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            Mat x = cur.vertices() - tau * dir;
            if (x.allFinite()) {
                Curve c(std::move(x));
                if (min_separation(c) > opts.sep_threshold_factor * arc_length(c)) {
                    const double Ec = energy(c, s);
                    if (Ec <= E - opts.armijo_c1 * tau * grad_sq) {
                        next = std::move(c);
                        Enext = Ec;
                        accepted = true;
                        break;
                    }
                }
            }
            tau *= 0.5;
        }
        if (!accepted) {
            traj.aborted = true;
            traj.note = "Armijo line search stalled at step " + std::to_string(k);
            return traj;
        }
        // G-length of the accepted step, measured at the segment midpoint.
        const Curve midc(0.5 * (cur.vertices() + next.vertices()));
        const Mat delta = next.vertices() - cur.vertices();
        const double inc = std::sqrt(assemble_gram(midc, s).quadratic(delta, delta));

        cur = std::move(next);
        E = Enext;
        StateDiagnostics d;
        d.energy = E;
        d.length = arc_length(cur);
        d.min_separation = min_separation(cur);
        d.speed = inc;
        d.g_step = inc;
        traj.states.push_back({cur, -dir, static_cast<double>(k + 1)});
        traj.diag.push_back(d);
        tau = std::min(tau * 2.0, opts.step0);
    }
    return traj;
}

} // namespace knotgeo
