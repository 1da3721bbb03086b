#include "knotgeo/check.hpp"
#include "knotgeo/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace knotgeo;

// flags > env (KNOTGEO_*) > defaults
double env_or(const char* name, double fallback) {
    if (const char* v = std::getenv(name)) return std::atof(v);
    return fallback;
}

std::uint64_t env_or_u64(const char* name, std::uint64_t fallback) {
    if (const char* v = std::getenv(name)) return std::strtoull(v, nullptr, 10);
    return fallback;
}

std::string env_or_str(const char* name, std::string fallback) {
    if (const char* v = std::getenv(name)) return v;
    return fallback;
}

struct CommonOpts {
    double s = env_or("KNOTGEO_S", 1.75);
    std::string reduction = env_or_str("KNOTGEO_REDUCTION", "ordered");
    Reduction mode() const {
        if (reduction == "parallel") return Reduction::Parallel;
        if (reduction == "ordered") return Reduction::Ordered;
        throw CLI::ValidationError("--reduction must be ordered|parallel");
    }
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--s", c.s, "kernel exponent in (3/2, 2)")->capture_default_str();
    cmd->add_option("--reduction", c.reduction, "ordered|parallel")->capture_default_str();
}

void print_report(const EnergyReport& r, bool as_json) {
    if (as_json) {
        std::cout << "{\"energy\": " << r.energy << ", \"length\": " << r.length
                  << ", \"scale_invariant\": " << r.scale_invariant
                  << ", \"distortion\": " << r.distortion
                  << ", \"min_separation\": " << r.min_separation
                  << ", \"lower_bound_ok\": " << (r.lower_bound_ok ? "true" : "false") << "}\n";
        return;
    }
    std::cout << "energy            " << r.energy << "\n"
              << "length            " << r.length << "\n"
              << "E * L^(2s-3)      " << r.scale_invariant << "\n"
              << "distortion        " << r.distortion << "\n"
              << "min_separation    " << r.min_separation << "\n";
    if (!r.lower_bound_ok)
        std::cout << "warning: scale-invariant product below pi^2 — curve is "
                     "under-resolved or not embedded\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"knotgeo — tangent-point energies, the induced metric, and its geodesics "
                 "on closed polylines"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a curve and write it as JSON");
    std::string kind = "circle", out_path = "-";
    int gen_n = 64, tk_p = 2, tk_q = 3, gen_dim = 3;
    double radius = 1.0, major = 2.0, minor = 1.0;
    gen->add_option("--kind", kind, "circle|torus_knot|figure_eight")->capture_default_str();
    gen->add_option("--n", gen_n, "vertex count")->capture_default_str();
    gen->add_option("--p", tk_p, "torus knot p")->capture_default_str();
    gen->add_option("--q", tk_q, "torus knot q")->capture_default_str();
    gen->add_option("--radius", radius, "circle radius")->capture_default_str();
    gen->add_option("--major", major, "torus major radius")->capture_default_str();
    gen->add_option("--minor", minor, "torus minor radius")->capture_default_str();
    gen->add_option("--dim", gen_dim, "ambient dimension (circle only)")->capture_default_str();
    gen->add_option("--out", out_path, "output file ('-' for stdout)")->capture_default_str();

    // energy
    auto* en = app.add_subcommand("energy", "evaluate the energy report of a curve");
    CommonOpts en_c;
    std::string en_curve;
    bool en_json = false, en_skip_adjacent = false;
    add_common(en, en_c);
    en->add_option("--curve", en_curve, "curve JSON file")->required();
    en->add_flag("--json", en_json, "machine-readable output");
    en->add_flag("--skip-adjacent", en_skip_adjacent,
                 "comparison mode: drop neighboring edge pairs from the quadrature");

    // shoot
    auto* sh = app.add_subcommand("shoot", "integrate the geodesic initial-value problem");
    CommonOpts sh_c;
    std::string sh_curve, sh_vel, sh_out = "traj.jsonl", sh_obj, sh_constraint = "none";
    ShootOptions sh_opts;
    bool sh_no_adaptive = false, sh_reproject = false;
    add_common(sh, sh_c);
    sh->add_option("--curve", sh_curve, "curve JSON file")->required();
    sh->add_option("--velocity", sh_vel, "tangent field JSON file")->required();
    sh->add_option("--T", sh_opts.T, "final time")->capture_default_str();
    sh->add_option("--steps", sh_opts.steps, "RK4 steps")->capture_default_str();
    sh->add_option("--out", sh_out, "JSONL output")->capture_default_str();
    sh->add_option("--obj", sh_obj, "directory for per-frame OBJ output");
    sh->add_option("--constraint", sh_constraint, "none|length|barycenter")->capture_default_str();
    sh->add_flag("--no-adaptive", sh_no_adaptive, "disable step-halving retries");
    sh->add_flag("--reproject", sh_reproject, "per-step Newton projection (constrained runs)");

    // connect
    auto* co = app.add_subcommand("connect", "solve the geodesic boundary-value problem");
    CommonOpts co_c;
    std::string co_from, co_to, co_out = "path.jsonl", co_obj;
    int co_K = 16;
    ConnectOptions co_opts;
    bool co_left_rule = false;
    add_common(co, co_c);
    co->add_option("--from", co_from, "start curve JSON file")->required();
    co->add_option("--to", co_to, "end curve JSON file")->required();
    co->add_option("--K", co_K, "number of path segments")->capture_default_str();
    co->add_option("--tol", co_opts.tol, "stationarity tolerance")->capture_default_str();
    co->add_option("--max-iters", co_opts.max_iters, "iteration cap")->capture_default_str();
    co->add_option("--out", co_out, "JSONL output")->capture_default_str();
    co->add_option("--obj", co_obj, "directory for per-frame OBJ output");
    co->add_flag("--left-rule", co_left_rule,
                 "evaluate segment metrics at the left endpoint instead of the midpoint");

    // flow
    auto* fl = app.add_subcommand("flow", "metric-preconditioned energy descent");
    CommonOpts fl_c;
    std::string fl_curve, fl_out = "flow.jsonl", fl_obj;
    FlowOptions fl_opts;
    add_common(fl, fl_c);
    fl->add_option("--curve", fl_curve, "curve JSON file")->required();
    fl->add_option("--steps", fl_opts.steps, "descent steps")->capture_default_str();
    fl->add_option("--step0", fl_opts.step0, "initial Armijo step")->capture_default_str();
    fl->add_option("--out", fl_out, "JSONL output")->capture_default_str();
    fl->add_option("--obj", fl_obj, "directory for per-frame OBJ output");

    // check
    auto* ck = app.add_subcommand("check", "run the invariant suites");
    CommonOpts ck_c;
    std::string suite = "all";
    std::uint64_t seed = env_or_u64("KNOTGEO_SEED", 0x5eed);
    add_common(ck, ck_c);
    ck->add_option("suite", suite, "identities|gradients|geodesic|all")->capture_default_str();
    ck->add_option("--seed", seed, "RNG seed for randomized checks")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Curve c = [&]() {
                if (kind == "circle") return make_circle(gen_n, radius, gen_dim);
                if (kind == "torus_knot") return make_torus_knot(tk_p, tk_q, gen_n, major, minor);
                if (kind == "figure_eight") return make_figure_eight(gen_n);
                throw std::invalid_argument("unknown kind '" + kind + "'");
            }();
            if (out_path == "-")
                std::cout << curve_to_json(c) << "\n";
            else
                write_curve_file(c, out_path);
        } else if (*en) {
            require_exponent(en_c.s);
            const Curve c = parse_curve_file(en_curve);
            print_report(energy_report(c, en_c.s, en_skip_adjacent), en_json);
        } else if (*sh) {
            require_exponent(sh_c.s);
            const Curve c = parse_curve_file(sh_curve);
            const TangentField v = parse_field_file(sh_vel, c);
            sh_opts.adaptive = !sh_no_adaptive;
            sh_opts.reproject = sh_reproject;
            Trajectory traj;
            if (sh_constraint == "none") {
                traj = shoot(c, v, sh_c.s, sh_opts);
            } else if (sh_constraint == "length") {
                traj = shoot_constrained(c, v, sh_c.s, length_constraint(arc_length(c)), sh_opts);
            } else if (sh_constraint == "barycenter") {
                traj = shoot_constrained(c, v, sh_c.s,
                                         barycenter_constraint(c.vertices().colwise().mean()),
                                         sh_opts);
            } else {
                throw std::invalid_argument("unknown constraint '" + sh_constraint + "'");
            }
            write_frames_file(traj, sh_out);
            if (!sh_obj.empty()) write_obj_frames(traj, sh_obj);
            std::cerr << "states: " << traj.states.size()
                      << "  speed drift: " << traj.speed_drift();
            if (!traj.constraint_values.empty())
                std::cerr << "  constraint drift: " << traj.constraint_drift();
            if (!traj.note.empty()) std::cerr << "  note: " << traj.note;
            std::cerr << "\n";
            if (traj.aborted) return 3;
        } else if (*co) {
            require_exponent(co_c.s);
            const Curve a = parse_curve_file(co_from);
            const Curve b = parse_curve_file(co_to);
            if (co_left_rule) co_opts.rule = PathMetricRule::Left;
            const ConnectResult res = connect(a, b, co_c.s, co_K, co_opts);
            write_frames_file(res.path, co_c.s, co_out);
            if (!co_obj.empty()) write_obj_frames(res.path, co_obj);
            std::cerr << "iterations: " << res.iterations << "  path energy: " << res.energy
                      << "  grad norm: " << res.grad_norm;
            if (!res.flag.empty()) std::cerr << "  flag: " << res.flag;
            std::cerr << "\n";
            if (!res.converged) return 3;
        } else if (*fl) {
            require_exponent(fl_c.s);
            const Curve c = parse_curve_file(fl_curve);
            const Trajectory traj = flow(c, fl_c.s, fl_opts);
            write_frames_file(traj, fl_out);
            if (!fl_obj.empty()) write_obj_frames(traj, fl_obj);
            std::cerr << "steps: " << traj.states.size() - 1;
            if (!traj.note.empty()) std::cerr << "  note: " << traj.note;
            std::cerr << "\n";
            if (traj.aborted) return 3;
        } else if (*ck) {
            RunConfig cfg;
            cfg.s = ck_c.s;
            cfg.seed = seed;
            cfg.reduction = ck_c.mode();
            const auto results = run_checks(suite, cfg);
            std::cout << checks_to_json(results) << "\n";
            return all_passed(results) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
