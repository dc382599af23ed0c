#include "pbc/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Flip (w, b) so the first component of w beyond 1e-12 is positive.
void canonicalize_sign(Vec& w, double& b) {
    for (double v : w) {
        if (std::abs(v) > 1e-12) {
            if (v < 0.0) {
                for (double& x : w) x = -x;
                b = -b;
            }
            return;
        }
    }
}

Mat scatter_about_mean(const Mat& rows, const Vec& mu) {
    const std::size_t n = rows.cols();
    Mat s(n, n);
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        const auto x = rows.row(r);
        for (std::size_t i = 0; i < n; ++i) {
            const double di = x[i] - mu[i];
            for (std::size_t j = i; j < n; ++j) s(i, j) += di * (x[j] - mu[j]);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i);
    return s;
}

Vec unit_column(const SymEigen& eig, std::size_t col) {
    const std::size_t n = eig.vectors.rows();
    Vec w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = eig.vectors(i, col);
    const double wn = norm(w);
    if (wn > 0.0)
        for (double& v : w) v /= wn;
    return w;
}

double plane_value_sum_sq(const Mat& rows, std::span<const double> w, double b) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        const double f = dot(rows.row(r), w) + b;
        s += f * f;
    }
    return s;
}

}  // namespace

SubproblemResult solve_kpc_plane(const Mat& members, const SolveConfig&) {
    if (members.rows() < 1)
        throw InvalidArgument("kpc subproblem needs at least one member");
    const Vec mu = row_mean(members);
    const Mat s = scatter_about_mean(members, mu);
    const SymEigen eig = jacobi_eigensystem(s);
    Vec w = unit_column(eig, 0);
    double b = 0.0;
    canonicalize_sign(w, b);
    b = -dot(w, mu);
    SubproblemResult res;
    res.plane = {std::move(w), b};
    res.objective = std::max(eig.values[0], 0.0);
    res.iterations = eig.sweeps;
    return res;
}

SubproblemResult solve_ppc_plane(const Mat& members, const Mat& others, double c,
                                 const SolveConfig&) {
    if (members.rows() < 1 || others.rows() < 1)
        throw InvalidArgument("ppc subproblem needs members and others");
    if (!(c > 0.0)) throw InvalidArgument("ppc parameter c must be positive");
    const std::size_t n = members.cols();
    const double m_in = static_cast<double>(members.rows());
    const double m_out = static_cast<double>(others.rows());

    // Augmented second moments of the difference objective z' A z, z = (w, b).
    Mat m(n, n);
    Vec v(n, 0.0);
    auto accumulate = [&](const Mat& rows, double cc) {
        for (std::size_t r = 0; r < rows.rows(); ++r) {
            const auto x = rows.row(r);
            for (std::size_t i = 0; i < n; ++i) {
                v[i] += cc * x[i];
                for (std::size_t j = i; j < n; ++j) m(i, j) += cc * x[i] * x[j];
            }
        }
    };
    accumulate(members, 1.0);
    accumulate(others, -c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
    const double d = m_in - c * m_out;

    Vec w;
    double b = 0.0;
    int sweeps = 0;
    if (std::abs(d) > 1e-12) {
        // b eliminated at its stationary value; reduced symmetric eigenproblem.
        Mat reduced = m;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) reduced(i, j) -= v[i] * v[j] / d;
        const SymEigen eig = jacobi_eigensystem(reduced);
        w = unit_column(eig, 0);
        canonicalize_sign(w, b);
        b = -dot(w, v) / d;
        sweeps = eig.sweeps;
    } else {
        // Degenerate bias curvature: constrained solve over the augmented
        // variable, then rescale to put the weight part on the unit sphere.
        Mat a(n + 1, n + 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = m(i, j);
        for (std::size_t i = 0; i < n; ++i) {
            a(i, n) = v[i];
            a(n, i) = v[i];
        }
        a(n, n) = d;
        const SymEigen eig = jacobi_eigensystem(a);
        Vec z = unit_column(eig, 0);
        Vec wpart(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
        const double wn = norm(wpart);
        if (wn < 1e-8)
            throw UnboundedObjective(
                "ppc subproblem degenerate along the bias direction");
        w.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) w[i] = wpart[i] / wn;
        b = z[n] / wn;
        canonicalize_sign(w, b);
        sweeps = eig.sweeps;
    }

    SubproblemResult res;
    res.objective =
        plane_value_sum_sq(members, w, b) - c * plane_value_sum_sq(others, w, b);
    res.plane = {std::move(w), b};
    res.iterations = sweeps;
    return res;
}

namespace detail {

Plane ppc_between_only_plane(const Mat& others) {
    if (others.rows() < 1)
        throw InvalidArgument("between-only subproblem needs samples");
    const Vec mu = row_mean(others);
    const Mat s = scatter_about_mean(others, mu);
    const SymEigen eig = jacobi_eigensystem(s);
    Vec w = unit_column(eig, others.cols() - 1);  // largest-variance direction
    double b = 0.0;
    canonicalize_sign(w, b);
    b = -dot(w, mu);
    return {std::move(w), b};
}

}  // namespace detail

double subproblem_objective(const Mat& members, const Mat& others,
                            std::span<const double> w, double b,
                            const LossSpec& spec) {
    double total = 0.0;
    if (spec.preset == Preset::Rfdpc) {
        const std::size_t n_members = members.rows();
        Vec f(n_members);
        double mean = 0.0;
        for (std::size_t r = 0; r < n_members; ++r) {
            f[r] = dot(members.row(r), w) + b;
            mean += f[r];
        }
        if (n_members > 0) mean /= static_cast<double>(n_members);
        const ClusterStats st{n_members, mean};
        for (std::size_t r = 0; r < n_members; ++r)
            total += spec.c_w * within_loss(f[r], spec, &st);
    } else {
        for (std::size_t r = 0; r < members.rows(); ++r) {
            const double f = deviation(members.row(r), w, b, spec.deviation_kind);
            total += spec.c_w * within_loss(f, spec);
        }
    }
    for (std::size_t r = 0; r < others.rows(); ++r) {
        const double f = deviation(others.row(r), w, b, spec.deviation_kind);
        total += spec.c_b * between_loss(f, spec);
    }
    if (spec.regularizer == Regularizer::Tikhonov)
        total += 0.5 * (dot(w, w) + b * b);
    return total;
}

// ---------------------------------------------------------------------------
// Concave-convex procedure.
//
// The subproblem objective is split per sample into convex pieces (quadratics
// folded into a Hessian, absolute values and hinges kept as nonsmooth terms)
// minus convex pieces that get linearized at the current iterate. The convex
// majorizer is minimized by subgradient steps with an exact line search over
// the piecewise-quadratic restriction, coordinate moves as a fallback at
// kinks, and a short diminishing-step escape before giving up. The majorizer
// value is tracked so an iterate is only accepted when strictly better,
// which makes a re-solve from a converged point a bitwise no-op.
// ---------------------------------------------------------------------------

namespace {

struct NsTerm {
    std::size_t row;
    double coeff;  // > 0
    double theta;  // >= 0; 0 is a plain absolute value
};

struct ConvexPwq {
    const Mat* xt = nullptr;  // rows: augmented samples (x, 1)
    Mat h;                    // optional Hessian
    bool has_h = false;
    Vec lin;
    std::vector<NsTerm> terms;

    std::size_t dim() const { return lin.size(); }

    double value(const Vec& z) const {
        double v = 0.0;
        if (has_h) {
            const Vec hz = mat_vec(h, z);
            v += 0.5 * dot(z, hz);
        }
        v += dot(lin, z);
        for (const NsTerm& t : terms) {
            const double s = dot(xt->row(t.row), z);
            v += t.coeff * std::max(std::abs(s) - t.theta, 0.0);
        }
        return v;
    }

    Vec subgradient(const Vec& z, const Vec& f) const {
        Vec g = has_h ? mat_vec(h, z) : Vec(dim(), 0.0);
        for (std::size_t i = 0; i < dim(); ++i) g[i] += lin[i];
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const NsTerm& t = terms[i];
            const double s = f[i];
            double ds = 0.0;
            if (t.theta == 0.0)
                ds = sign_of(s);
            else if (std::abs(s) > t.theta)
                ds = sign_of(s);
            if (ds != 0.0) {
                const auto row = xt->row(t.row);
                for (std::size_t c = 0; c < dim(); ++c)
                    g[c] += t.coeff * ds * row[c];
            }
        }
        return g;
    }

    void term_values(const Vec& z, Vec& f) const {
        f.resize(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i)
            f[i] = dot(xt->row(terms[i].row), z);
    }
};

/// Right derivative contribution of one nonsmooth term at parameter t along
/// s(t) = u + t v.
double term_slope_right(const NsTerm& tm, double u, double v, double t) {
    const double s = u + t * v;
    if (tm.theta == 0.0) {
        if (s > 0.0) return tm.coeff * v;
        if (s < 0.0) return -tm.coeff * v;
        return tm.coeff * std::abs(v);
    }
    const double a = std::abs(s);
    if (a > tm.theta) return tm.coeff * v * sign_of(s);
    if (a < tm.theta) return 0.0;
    const bool outward = s > 0.0 ? v > 0.0 : v < 0.0;  // s == +-theta, theta > 0
    return outward ? tm.coeff * v * sign_of(s) : 0.0;
}

struct LsResult {
    double t = 0.0;
    double value = 0.0;
};

/// Exact minimization of the convex piecewise-quadratic restriction
/// phi(t) = P(z + t d) over t >= 0.
LsResult exact_line_search(const ConvexPwq& p, const Vec& z, const Vec& d,
                           double phi0) {
    const std::size_t dim = p.dim();
    double q2 = 0.0;
    double q1 = dot(p.lin, d);
    if (p.has_h) {
        const Vec hd = mat_vec(p.h, d);
        const Vec hz = mat_vec(p.h, z);
        q2 = dot(d, hd);
        q1 += dot(d, hz);
    }

    const std::size_t nt = p.terms.size();
    Vec u(nt), v(nt), contrib(nt);
    double pl_slope = q1;
    struct Event {
        double t;
        std::size_t term;
    };
    std::vector<Event> events;
    events.reserve(2 * nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const NsTerm& tm = p.terms[i];
        const auto row = p.xt->row(tm.row);
        u[i] = dot(row, z);
        v[i] = dot(row, d);
        contrib[i] = term_slope_right(tm, u[i], v[i], 0.0);
        pl_slope += contrib[i];
        if (v[i] != 0.0) {
            auto push = [&](double target) {
                const double t = (target - u[i]) / v[i];
                if (t > 1e-300 && std::isfinite(t)) events.push_back({t, i});
            };
            if (tm.theta == 0.0) {
                push(0.0);
            } else {
                push(tm.theta);
                push(-tm.theta);
            }
        }
    }

    LsResult best{0.0, phi0};
    if (pl_slope >= 0.0) return best;

    auto consider = [&](double t) {
        if (!(t > 0.0) || !std::isfinite(t)) return;
        Vec zt(dim);
        for (std::size_t i = 0; i < dim; ++i) zt[i] = z[i] + t * d[i];
        const double val = p.value(zt);
        if (val < best.value) best = {t, val};
    };

    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.t < b.t; });

    double prev_t = 0.0;
    std::size_t idx = 0;
    bool done = false;
    while (idx < events.size()) {
        const double t_e = events[idx].t;
        if (pl_slope + q2 * prev_t >= 0.0) {
            consider(prev_t);
            done = true;
            break;
        }
        if (q2 > 0.0) {
            const double root = -pl_slope / q2;
            if (root <= t_e) {
                consider(root);
                done = true;
                break;
            }
        }
        while (idx < events.size() && events[idx].t == t_e) {
            const std::size_t i = events[idx].term;
            const double now = term_slope_right(p.terms[i], u[i], v[i], t_e);
            pl_slope += now - contrib[i];
            contrib[i] = now;
            ++idx;
        }
        prev_t = t_e;
    }
    if (!done) {
        if (pl_slope + q2 * prev_t >= 0.0) {
            consider(prev_t);
        } else if (q2 > 0.0) {
            consider(-pl_slope / q2);
        } else {
            consider(prev_t);
            consider(prev_t + 1e3 * (1.0 + prev_t));  // flat or drifting tail
        }
    }
    return best;
}

struct InnerResult {
    Vec z;
    double value = 0.0;
    bool improved = false;
    int iterations = 0;
};

/// Value and gradient of one nonsmooth term under width-tau smoothing: the
/// hinge band [theta - t, theta + t] becomes quadratic, a plain absolute
/// value becomes a Huber bowl. Always an over-estimator of the true term.
double smoothed_term(const NsTerm& tm, double s, double tau, double* dds) {
    if (tm.theta > 0.0) {
        const double t = std::min(tau, 0.5 * tm.theta);
        const double a = std::abs(s);
        if (a <= tm.theta - t) {
            *dds = 0.0;
            return 0.0;
        }
        if (a >= tm.theta + t) {
            *dds = tm.coeff * sign_of(s);
            return tm.coeff * (a - tm.theta);
        }
        const double u = a - tm.theta + t;
        *dds = tm.coeff * sign_of(s) * u / (2.0 * t);
        return tm.coeff * u * u / (4.0 * t);
    }
    if (std::abs(s) >= tau) {
        *dds = tm.coeff * sign_of(s);
        return tm.coeff * (std::abs(s) - 0.5 * tau);
    }
    *dds = tm.coeff * s / tau;
    return tm.coeff * s * s / (2.0 * tau);
}

/// Accelerated gradient descent on the tau-smoothed majorizer, tracking the
/// best iterate by the true majorizer value.
int smoothed_agd_stage(const ConvexPwq& p, double tau, int iters, Vec& z,
                       Vec& z_best, double& v_best, bool* improved) {
    const std::size_t dim = p.dim();
    double lips = 0.0;
    if (p.has_h)
        for (std::size_t i = 0; i < dim; ++i) lips += p.h(i, i);  // trace bound
    for (const NsTerm& tm : p.terms) {
        const auto row = p.xt->row(tm.row);
        const double band =
            tm.theta > 0.0 ? 2.0 * std::min(tau, 0.5 * tm.theta) : tau;
        lips += tm.coeff * dot(row, row) / band;
    }
    if (lips <= 0.0) return 0;
    const double step = 1.0 / lips;

    Vec x = z, x_prev = z, y(dim), g(dim);
    const double eps = 1e-14 * (1.0 + std::abs(v_best));
    int used = 0;
    for (int k = 1; k <= iters; ++k) {
        ++used;
        const double beta =
            (static_cast<double>(k) - 1.0) / (static_cast<double>(k) + 2.0);
        for (std::size_t i = 0; i < dim; ++i)
            y[i] = x[i] + beta * (x[i] - x_prev[i]);
        // Gradient of the smoothed majorizer at y.
        if (p.has_h)
            g = mat_vec(p.h, y);
        else
            std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < dim; ++i) g[i] += p.lin[i];
        for (const NsTerm& tm : p.terms) {
            const auto row = p.xt->row(tm.row);
            double dds = 0.0;
            smoothed_term(tm, dot(row, y), tau, &dds);
            if (dds != 0.0)
                for (std::size_t i = 0; i < dim; ++i) g[i] += dds * row[i];
        }
        x_prev = x;
        for (std::size_t i = 0; i < dim; ++i) x[i] = y[i] - step * g[i];
        const double v = p.value(x);
        if (v < v_best - eps) {
            v_best = v;
            z_best = x;
            *improved = true;
        }
        if (norm(g) <= 1e-13 * (1.0 + std::abs(v_best))) break;
    }
    z = x;
    return used;
}

InnerResult inner_minimize(const ConvexPwq& p, const Vec& z0,
                           const SolveConfig& cfg) {
    const std::size_t dim = p.dim();
    InnerResult out;
    out.z = z0;
    out.value = p.value(z0);
    double v_best = out.value;

    // Phase 1: smoothing continuation. Plain first-order steps cannot creep
    // along kink faces the way raw subgradient descent does.
    if (!p.terms.empty()) {
        double dev_scale = 0.0;
        for (const NsTerm& tm : p.terms)
            dev_scale += std::abs(dot(p.xt->row(tm.row), z0));
        dev_scale =
            dev_scale / static_cast<double>(p.terms.size()) + 0.1;
        double tau = 0.25 * dev_scale;
        const int stage_iters = std::max(40, cfg.inner_max_iter / 8);
        Vec z = z0;
        bool prev_stage_improved = true;
        for (int stage = 0; stage < 6 && tau > 1e-7; ++stage, tau /= 6.0) {
            const double v_before = v_best;
            out.iterations += smoothed_agd_stage(p, tau, stage_iters, z, out.z,
                                                 v_best, &out.improved);
            const bool stage_improved = v_best < v_before;
            if (!stage_improved && !prev_stage_improved) break;
            prev_stage_improved = stage_improved;
        }
    }

    // Phase 2: exact line searches snap onto the kink structure.
    Vec z = out.z;
    Vec f;
    int stalls = 0;
    int small_steps = 0;
    const int polish_budget = std::max(50, cfg.inner_max_iter / 4);
    for (int it = 0; it < polish_budget; ++it) {
        ++out.iterations;
        p.term_values(z, f);
        const Vec g = p.subgradient(z, f);
        const double gn = norm(g);
        if (gn <= 1e-14 * (1.0 + std::abs(v_best))) break;
        Vec d(dim);
        for (std::size_t i = 0; i < dim; ++i) d[i] = -g[i] / gn;

        const double phi0 = p.value(z);
        const LsResult ls = exact_line_search(p, z, d, phi0);
        const double eps = 1e-14 * (1.0 + std::abs(v_best));

        if (ls.t > 0.0 && ls.value < v_best - eps) {
            for (std::size_t i = 0; i < dim; ++i) z[i] += ls.t * d[i];
            const double gain = v_best - ls.value;
            v_best = ls.value;
            out.z = z;
            out.improved = true;
            stalls = 0;
            if (gain <= cfg.inner_tol * (1.0 + std::abs(v_best))) {
                if (++small_steps >= 5) break;
            } else {
                small_steps = 0;
            }
            continue;
        }

        // Kink: axis-aligned moves next.
        bool moved = false;
        for (std::size_t c = 0; c < dim && !moved; ++c) {
            for (const double sgn : {1.0, -1.0}) {
                Vec e(dim, 0.0);
                e[c] = sgn;
                const LsResult cl = exact_line_search(p, z, e, phi0);
                if (cl.t > 0.0 && cl.value < v_best - eps) {
                    z[c] += cl.t * sgn;
                    v_best = cl.value;
                    out.z = z;
                    out.improved = true;
                    moved = true;
                    break;
                }
            }
        }
        if (moved) {
            stalls = 0;
            continue;
        }
        if (++stalls >= 2) break;
        // One unguarded diminishing step to slide off the kink.
        const double step = 0.02 * (1.0 + norm(z));
        for (std::size_t i = 0; i < dim; ++i) z[i] -= step * g[i] / gn;
        const double vz = p.value(z);
        if (vz < v_best - eps) {
            v_best = vz;
            out.z = z;
            out.improved = true;
            stalls = 0;
        }
    }
    out.value = v_best;
    return out;
}

Vec cccp_cold_start(const Mat& members, const Mat& others, std::size_t n) {
    Vec z(n + 1, 0.0);
    if (members.rows() >= 1) {
        const SubproblemResult kpc = solve_kpc_plane(members, SolveConfig{});
        for (std::size_t i = 0; i < n; ++i) z[i] = kpc.plane.w[i];
        z[n] = kpc.plane.b;
        return z;
    }
    // Between-cluster terms only: start from the largest-variance direction,
    // scaled so typical deviations land past the flat region of the loss.
    const Plane pl = detail::ppc_between_only_plane(others);
    Vec f(others.rows());
    for (std::size_t r = 0; r < others.rows(); ++r)
        f[r] = std::abs(dot(others.row(r), pl.w) + pl.b);
    std::nth_element(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(f.size() / 2),
                     f.end());
    const double med = f[f.size() / 2];
    const double scale = 2.0 / std::max(med, 1e-6);
    for (std::size_t i = 0; i < n; ++i) z[i] = scale * pl.w[i];
    z[n] = scale * pl.b;
    return z;
}

}  // namespace

SubproblemResult solve_cccp_plane(const Mat& members, const Mat& others,
                                  const LossSpec& spec, const SolveConfig& config) {
    if (!spec.uses_cccp())
        throw InvalidArgument("preset is solved in closed form, not by cccp");
    const std::size_t n = members.rows() > 0 ? members.cols() : others.cols();
    if (members.rows() + others.rows() == 0)
        throw InvalidArgument("cccp subproblem needs samples");
    const std::size_t dim = n + 1;
    const std::size_t m_in = members.rows();
    const std::size_t m_out = others.rows();

    Mat xt(m_in + m_out, dim);
    for (std::size_t r = 0; r < m_in; ++r) {
        for (std::size_t c = 0; c < n; ++c) xt(r, c) = members(r, c);
        xt(r, n) = 1.0;
    }
    for (std::size_t r = 0; r < m_out; ++r) {
        for (std::size_t c = 0; c < n; ++c) xt(m_in + r, c) = others(r, c);
        xt(m_in + r, n) = 1.0;
    }

    ConvexPwq p;
    p.xt = &xt;
    p.lin.assign(dim, 0.0);
    Mat h(dim, dim);
    bool has_h = false;
    auto add_outer = [&](std::span<const double> x, double cc) {
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) h(i, j) += cc * x[i] * x[j];
        has_h = true;
    };

    struct VTerm {
        std::size_t row;
        PwPiece piece;
        double scale;
    };
    std::vector<VTerm> vterms;

    const DcSplit w_split = dc_within(spec);
    const DcSplit b_split = dc_between(spec);
    auto add_side = [&](const DcSplit& split, std::size_t row, double scale) {
        for (const PwPiece& piece : split.convex) {
            switch (piece.kind) {
                case PwPiece::Kind::Quadratic:
                    add_outer(xt.row(row), 2.0 * scale * piece.coeff);
                    break;
                case PwPiece::Kind::Abs:
                    p.terms.push_back({row, scale * piece.coeff, 0.0});
                    break;
                case PwPiece::Kind::Hinge:
                    p.terms.push_back({row, scale * piece.coeff, piece.theta});
                    break;
                case PwPiece::Kind::Constant:
                    break;  // constants do not affect the minimizer
            }
        }
        for (const PwPiece& piece : split.concave)
            vterms.push_back({row, piece, scale});
    };
    for (std::size_t r = 0; r < m_in; ++r) add_side(w_split, r, spec.c_w);
    for (std::size_t r = 0; r < m_out; ++r) add_side(b_split, m_in + r, spec.c_b);

    if (spec.preset == Preset::Rfdpc) {
        for (std::size_t i = 0; i < dim; ++i) h(i, i) += 1.0;
        has_h = true;
        if (m_in >= 1) {
            const double nn = static_cast<double>(m_in);
            for (std::size_t r = 0; r < m_in; ++r)
                add_outer(xt.row(r), 2.0 * spec.gamma1 / (nn * nn));
        }
        if (m_in >= 2) {
            Vec mean(dim, 0.0);
            for (std::size_t r = 0; r < m_in; ++r)
                for (std::size_t c = 0; c < dim; ++c) mean[c] += xt(r, c);
            for (double& v : mean) v /= static_cast<double>(m_in);
            Vec centered(dim);
            for (std::size_t r = 0; r < m_in; ++r) {
                for (std::size_t c = 0; c < dim; ++c)
                    centered[c] = xt(r, c) - mean[c];
                add_outer(centered,
                          2.0 * spec.gamma2 / (static_cast<double>(m_in) - 1.0));
            }
        }
    }
    if (has_h) {
        p.h = std::move(h);
        p.has_h = true;
    }

    Vec z = config.warm_start
                ? [&] {
                      Vec zz(dim);
                      for (std::size_t i = 0; i < n; ++i)
                          zz[i] = config.warm_start->w[i];
                      zz[n] = config.warm_start->b;
                      return zz;
                  }()
                : cccp_cold_start(members, others, n);

    auto true_objective = [&](const Vec& zz) {
        return subproblem_objective(members, others,
                                    std::span<const double>(zz).first(n), zz[n],
                                    spec);
    };

    const bool trace = std::getenv("PBC_CCCP_TRACE") != nullptr;
    double obj = true_objective(z);
    bool converged = false;
    int outer = 0;
    for (outer = 1; outer <= config.cccp_max_outer; ++outer) {
        if (trace) {
            int near_zero = 0;
            for (const VTerm& vt : vterms)
                if (std::abs(dot(xt.row(vt.row), z)) < 1e-6) ++near_zero;
            std::fprintf(stderr, "outer %d obj=%.12f near0=%d z0=%.6f\n", outer,
                         obj, near_zero, z[0]);
        }
        Vec lin(dim, 0.0);
        for (const VTerm& vt : vterms) {
            const double f = dot(xt.row(vt.row), z);
            const double g = vt.scale * vt.piece.deriv(f);
            if (g != 0.0) {
                const auto row = xt.row(vt.row);
                for (std::size_t c = 0; c < dim; ++c) lin[c] -= g * row[c];
            }
        }
        p.lin = std::move(lin);

        const InnerResult inner = inner_minimize(p, z, config);
        if (!inner.improved) {
            converged = true;
            break;
        }
        const double obj_new = true_objective(inner.z);
        if (obj_new > obj + 1e-9)
            throw NonDecreasingStep("cccp outer objective rose from " +
                                    std::to_string(obj) + " to " +
                                    std::to_string(obj_new));
        if (obj_new >= obj) {
            converged = true;
            break;
        }
        const double improvement = obj - obj_new;
        z = inner.z;
        obj = obj_new;
        if (improvement <= config.cccp_tol * (1.0 + std::abs(obj))) {
            converged = true;
            break;
        }
    }

    SubproblemResult res;
    res.plane.w.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
    res.plane.b = z[n];
    res.objective = obj;
    res.iterations = std::min(outer, config.cccp_max_outer);
    res.converged = converged;
    return res;
}

}  // namespace pbc
