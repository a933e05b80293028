#include "mcnls/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace mcnls {

namespace {

constexpr double kZeroMass = 1e-12;

Field normalize_mass(Field f) {
    const double m = mass(f);
    if (m <= 0.0) throw std::invalid_argument("normalize_mass: zero field");
    const double s = 1.0 / std::sqrt(m);
    for (auto& z : f.values) z *= s;
    return f;
}

double smooth_window(double r, double radius, double rolloff) {
    if (r <= radius) return 1.0;
    if (r >= radius + rolloff) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (r - radius) / rolloff);
    return c * c;
}

struct Candidate {
    double captured = 0.0;  // |<g T, r>|^2
    cplx corr{0.0, 0.0};
    EnlargedElement g;
    std::size_t template_index = 0;
};

// Dilated copy of a (already propagated) template: lambda^{-d/2} T(x/lambda).
Field dilate_template(const Field& t, double lambda) {
    if (lambda == 1.0) return t;
    return apply(dilation_element(lambda), t);
}

// <e^{i x.xi0} D(x - x0), r> h^d for one concrete (x0, xi0); exact spectral
// translation, used by the local refinement.
cplx correlate_at(const Field& dilated, const Field& r, const Vec& x0, const Vec& xi0) {
    Field shifted = apply(GroupElement{0.0, xi0, x0, 1.0}, dilated);
    return inner(shifted, r);
}

// Signed wrap of a correlation lag index: entry m corresponds to a cyclic
// shift by m cells, i.e. the translation x0 = m h folded into [-L, L).
inline double lag_coord(const Grid& g, int m) {
    return (m < g.n() / 2 ? m : m - g.n()) * g.spacing();
}

// Correlation against all lattice translates at fixed xi0: entry m holds
// C(x0 = lag_coord(m)) = sum_j D(x_j - m h) conj(r(x_j)) e^{i x_j.xi0} h^d.
void correlate_over_x(const Grid& g, const std::vector<cplx>& dilated_dft_conj,
                      const Field& r, const Vec& xi0, std::vector<cplx>& out) {
    std::vector<cplx> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto x = g.point(i);
        s[i] = std::conj(r.values[i]) * std::polar(1.0, x[0] * xi0[0] + x[1] * xi0[1]);
    }
    g.fft(s);
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] *= std::conj(dilated_dft_conj[i]);
    g.ifft(s);
    out.resize(s.size());
    const double cell = g.cell_volume();
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] * cell;
}

// Correlation against all lattice modulations at fixed x0:
// C(xi_m) = sum_j q(x_j) e^{i x_j.xi_m} with q = D(x - x0) conj(r).
void correlate_over_xi(const Grid& g, const Field& dilated, const Field& r, const Vec& x0,
                       std::vector<cplx>& out) {
    Field shifted = apply(translation_element(x0), dilated);
    std::vector<cplx> q(g.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = std::conj(shifted.values[i] * std::conj(r.values[i]));
    g.fft(q);
    out.resize(q.size());
    const double cell = g.cell_volume();
    for (std::size_t i = 0; i < q.size(); ++i) {
        auto ij = g.indices(i);
        const double sign = ((ij[0] + (g.dim() == 2 ? ij[1] : 0)) & 1) ? -1.0 : 1.0;
        out[i] = sign * std::conj(q[i]) * cell;
    }
}

struct TemplateBank {
    // key: (template index, t0 grid index, lambda exponent)
    struct Slot {
        Field dilated;                 // lambda^{-d/2} (e^{i t0 Delta} T)(x/lambda)
        std::vector<cplx> dft_conj;    // DFT of conj(dilated), for x-correlations
        bool ready = false;
    };
    std::vector<Field> propagated;  // per (template, t0)
    std::vector<bool> propagated_ready;
    std::vector<Slot> slots;
    int n_templates = 0, n_t0 = 0, n_lambda = 0;

    Slot& slot(int ti, int t0i, int li) {
        return slots[(static_cast<std::size_t>(ti) * n_t0 + t0i) * n_lambda + li];
    }
    Field& prop(int ti, int t0i) { return propagated[static_cast<std::size_t>(ti) * n_t0 + t0i]; }
};

struct SearchGrids {
    std::vector<double> t0_values;
    std::vector<double> lambdas;
    double xi_halfrange;
};

SearchGrids make_grids(const Grid& g, const ExtractOptions& o, bool radial) {
    SearchGrids sg;
    for (double t0 = -o.t_ref; t0 <= o.t_ref + 1e-12; t0 += o.t0_step) sg.t0_values.push_back(t0);
    for (int k = o.lambda_exp_min; k <= o.lambda_exp_max; ++k)
        sg.lambdas.push_back(std::ldexp(1.0, k));
    sg.xi_halfrange = o.xi_halfrange > 0.0 ? o.xi_halfrange : 0.5 * g.nyquist();
    if (radial) sg.xi_halfrange = 0.0;
    return sg;
}

Candidate coarse_search(const Field& r, const std::vector<Field>& templates,
                        const SearchGrids& sg, TemplateBank& bank, bool radial) {
    const Grid& g = *r.grid;
    const int d = g.dim();
    Candidate best;

    for (int ti = 0; ti < bank.n_templates; ++ti) {
        for (int t0i = 0; t0i < bank.n_t0; ++t0i) {
            if (!bank.propagated_ready[static_cast<std::size_t>(ti) * bank.n_t0 + t0i]) {
                bank.prop(ti, t0i) = free_propagate(templates[ti], sg.t0_values[t0i]);
                bank.propagated_ready[static_cast<std::size_t>(ti) * bank.n_t0 + t0i] = true;
            }
            const Field& tp = bank.prop(ti, t0i);
            for (int li = 0; li < bank.n_lambda; ++li) {
                const double lambda = sg.lambdas[li];
                auto& slot = bank.slot(ti, t0i, li);
                if (!slot.ready) {
                    slot.dilated = dilate_template(tp, lambda);
                    slot.ready = true;
                }
                auto consider = [&](cplx c, const Vec& x0, const Vec& xi0) {
                    const double cap = std::norm(c);
                    if (cap > best.captured) {
                        best.captured = cap;
                        best.corr = c;
                        best.g = EnlargedElement{
                            GroupElement{wrap_angle(-std::arg(c)), xi0, x0, lambda},
                            sg.t0_values[t0i]};
                        best.template_index = static_cast<std::size_t>(ti);
                    }
                };

                if (radial) {
                    cplx c = inner(slot.dilated, r);
                    consider(c, Vec{0, 0}, Vec{0, 0});
                    continue;
                }

                // Sweep whichever of the translation/modulation axes needs the
                // fewer coarse samples; the conjugate axis rides along on the
                // full lattice via one FFT correlation.
                const double xi_stride = std::max(g.dxi(), 0.5 / lambda);
                const double x_stride = std::max(g.spacing(), 0.5 * lambda);
                const double n_xi_axis = std::pow(2.0 * sg.xi_halfrange / xi_stride + 1.0, d);
                const double n_x_axis = std::pow(2.0 * g.box_halfwidth() / x_stride + 1.0, d);

                std::vector<cplx> corr;
                if (n_xi_axis <= n_x_axis) {
                    if (slot.dft_conj.empty()) {
                        slot.dft_conj.resize(g.size());
                        for (std::size_t i = 0; i < g.size(); ++i)
                            slot.dft_conj[i] = std::conj(slot.dilated.values[i]);
                        g.fft(slot.dft_conj);
                    }
                    auto sweep_xi = [&](double xi_a, double xi_b) {
                        correlate_over_x(g, slot.dft_conj, r, Vec{xi_a, xi_b}, corr);
                        for (std::size_t i = 0; i < corr.size(); ++i) {
                            auto ij = g.indices(i);
                            Vec x0{lag_coord(g, ij[0]),
                                   d == 2 ? lag_coord(g, ij[1]) : 0.0};
                            consider(corr[i], x0, Vec{xi_a, xi_b});
                        }
                    };
                    for (double xa = -sg.xi_halfrange; xa <= sg.xi_halfrange + 1e-12;
                         xa += xi_stride) {
                        if (d == 1)
                            sweep_xi(xa, 0.0);
                        else
                            for (double xb = -sg.xi_halfrange; xb <= sg.xi_halfrange + 1e-12;
                                 xb += xi_stride)
                                sweep_xi(xa, xb);
                    }
                } else {
                    auto sweep_x = [&](double x_a, double x_b) {
                        correlate_over_xi(g, slot.dilated, r, Vec{x_a, x_b}, corr);
                        for (std::size_t i = 0; i < corr.size(); ++i) {
                            auto xi = g.freq_point(i);
                            if (std::abs(xi[0]) > sg.xi_halfrange ||
                                (d == 2 && std::abs(xi[1]) > sg.xi_halfrange))
                                continue;
                            consider(corr[i], Vec{x_a, x_b}, Vec{xi[0], d == 2 ? xi[1] : 0.0});
                        }
                    };
                    for (double xa = -g.box_halfwidth(); xa < g.box_halfwidth() - 1e-12;
                         xa += x_stride) {
                        if (d == 1)
                            sweep_x(xa, 0.0);
                        else
                            for (double xb = -g.box_halfwidth(); xb < g.box_halfwidth() - 1e-12;
                                 xb += x_stride)
                                sweep_x(xa, xb);
                    }
                }
            }
        }
    }
    return best;
}

// Local parabolic refinement of (x0, xi0, t0) at fixed dyadic lambda.
Candidate refine(const Field& r, const std::vector<Field>& templates, Candidate cand,
                 const ExtractOptions& o, bool radial) {
    const Grid& g = *r.grid;
    const int d = g.dim();
    const double lambda = cand.g.base.lambda;

    auto evaluate = [&](const Vec& x0, const Vec& xi0, double t0) -> cplx {
        Field tp = free_propagate(templates[cand.template_index], t0);
        Field dil = dilate_template(tp, lambda);
        return correlate_at(dil, r, x0, xi0);
    };

    struct Coord {
        int kind;  // 0: x0[axis], 1: xi0[axis], 2: t0
        int axis;
        double step;
    };
    std::vector<Coord> coords;
    if (!radial) {
        for (int a = 0; a < d; ++a) coords.push_back({0, a, std::max(g.spacing(), 0.25 * lambda)});
        for (int a = 0; a < d; ++a) coords.push_back({1, a, std::max(g.dxi(), 0.25 / lambda)});
    }
    coords.push_back({2, 0, 0.5 * o.t0_step});

    Vec x0 = cand.g.base.x0, xi0 = cand.g.base.xi0;
    double t0 = cand.g.t0;
    double best_cap = cand.captured;
    cplx best_corr = cand.corr;

    for (int round = 0; round < o.refine_rounds; ++round) {
        for (auto& c : coords) {
            auto probe = [&](double delta) -> double {
                Vec px = x0, pxi = xi0;
                double pt = t0;
                if (c.kind == 0) px[c.axis] += delta;
                if (c.kind == 1) pxi[c.axis] += delta;
                if (c.kind == 2) pt += delta;
                return std::norm(evaluate(px, pxi, pt));
            };
            const double fm = probe(-c.step), f0 = best_cap, fp = probe(c.step);
            double shift = 0.0;
            const double denom = fm - 2.0 * f0 + fp;
            if (fm > f0 && fm >= fp)
                shift = -c.step;
            else if (fp > f0 && fp > fm)
                shift = c.step;
            else if (denom < 0.0)
                shift = std::clamp(0.5 * c.step * (fm - fp) / denom, -c.step, c.step);
            if (shift != 0.0) {
                Vec px = x0, pxi = xi0;
                double pt = t0;
                if (c.kind == 0) px[c.axis] += shift;
                if (c.kind == 1) pxi[c.axis] += shift;
                if (c.kind == 2) pt += shift;
                cplx cc = evaluate(px, pxi, pt);
                if (std::norm(cc) > best_cap) {
                    x0 = px;
                    xi0 = pxi;
                    t0 = pt;
                    best_cap = std::norm(cc);
                    best_corr = cc;
                }
            }
            c.step *= 0.5;
        }
    }
    cand.captured = best_cap;
    cand.corr = best_corr;
    cand.g.base.x0 = x0;
    cand.g.base.xi0 = xi0;
    cand.g.t0 = t0;
    cand.g.base.theta = wrap_angle(-std::arg(best_corr));
    return cand;
}

ProfileDecomposition extract_impl(const Field& u, int max_profiles, double mass_floor,
                                  ExtractOptions opts, bool radial) {
    if (max_profiles < 0) throw std::invalid_argument("extract_profiles: max_profiles < 0");
    const Grid& g = *u.grid;
    const double m_u = mass(u);

    ProfileDecomposition dec;
    dec.total_mass = m_u;
    dec.remainder = u;
    if (m_u <= mass_floor || m_u < kZeroMass) {
        dec.decoupling_defect = 0.0;
        return dec;
    }
    const double floor = mass_floor >= 0.0 ? mass_floor : 1e-3 * m_u;

    if (opts.templates.empty()) {
        opts.templates.push_back(gaussian_template(u.grid));
        opts.template_names.assign(1, "gaussian");
    }
    if (opts.template_names.size() != opts.templates.size()) {
        opts.template_names.resize(opts.templates.size());
        for (std::size_t i = 0; i < opts.template_names.size(); ++i)
            if (opts.template_names[i].empty())
                opts.template_names[i] = "template" + std::to_string(i);
    }
    for (auto& t : opts.templates) t = normalize_mass(t);

    SearchGrids sg = make_grids(g, opts, radial);
    TemplateBank bank;
    bank.n_templates = static_cast<int>(opts.templates.size());
    bank.n_t0 = static_cast<int>(sg.t0_values.size());
    bank.n_lambda = static_cast<int>(sg.lambdas.size());
    bank.propagated.resize(static_cast<std::size_t>(bank.n_templates) * bank.n_t0);
    bank.propagated_ready.assign(bank.propagated.size(), false);
    bank.slots.resize(bank.propagated.size() * bank.n_lambda);

    Field r = u;
    double m_r = m_u;
    for (int round = 0; round < max_profiles; ++round) {
        Candidate cand = coarse_search(r, opts.templates, sg, bank, radial);
        if (cand.captured < floor) break;
        cand = refine(r, opts.templates, cand, opts, radial);

        Field w = apply_enlarged_inverse(cand.g, r);
        Field phi = make_field(u.grid);
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            auto x = g.point(i);
            phi.values[i] =
                w.values[i] *
                smooth_window(std::hypot(x[0], x[1]), opts.window_radius, opts.window_rolloff);
        }
        const double m_phi = mass(phi);
        if (m_phi < floor) break;

        Field bubble = apply_enlarged(cand.g, phi);
        Field r_next = r;
        for (std::size_t i = 0; i < r_next.values.size(); ++i)
            r_next.values[i] -= bubble.values[i];
        const double m_next = mass(r_next);
        if (m_next >= m_r - 0.5 * m_phi) break;  // fit too inaccurate to subtract safely

        ProfileEntry entry;
        entry.phi = std::move(phi);
        entry.fit = cand.g;
        entry.captured_mass = m_phi;
        entry.template_correlation = cand.captured;
        entry.template_name = opts.template_names[cand.template_index];
        dec.profiles.push_back(std::move(entry));

        r = std::move(r_next);
        m_r = m_next;
        if (m_r < floor) break;
    }
    dec.remainder = std::move(r);

    double captured_total = 0.0;
    for (const auto& p : dec.profiles) captured_total += p.captured_mass;
    dec.decoupling_defect = std::abs(m_u - captured_total - m_r);
    if (m_r > kZeroMass) {
        Trajectory fr =
            free_trajectory(dec.remainder, {-opts.t_ref, opts.t_ref}, opts.s_quad_dt);
        dec.remainder_linear_S = scattering_size(fr);
    }
    return dec;
}

}  // namespace

Field gaussian_template(const GridPtr& grid) {
    Field t = sample(grid, [](std::array<double, 2> x) {
        return cplx{std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])), 0.0};
    });
    t.label = "gaussian";
    return normalize_mass(std::move(t));
}

ProfileDecomposition extract_profiles(const Field& u, int max_profiles, double mass_floor,
                                      ExtractOptions opts) {
    return extract_impl(u, max_profiles, mass_floor, std::move(opts), false);
}

ProfileDecomposition extract_profiles_radial(const Field& u, int max_profiles, double mass_floor,
                                             ExtractOptions opts) {
    const double asym = radial_asymmetry(u);
    if (asym > 1e-6)
        throw std::invalid_argument("extract_profiles_radial: input asymmetry " +
                                    std::to_string(asym) + " exceeds 1e-6");
    return extract_impl(u, max_profiles, mass_floor, std::move(opts), true);
}

DecouplingReport decoupling_check(const ProfileDecomposition& dec, const Field& u, double t_ref,
                                  double s_quad_dt) {
    DecouplingReport rep;
    const double m_u = mass(u);
    double captured = 0.0;
    for (const auto& p : dec.profiles) captured += p.captured_mass;
    const double m_w = mass(dec.remainder);
    rep.mass_gap = m_u > 0.0 ? std::abs(m_u - captured - m_w) / m_u : 0.0;
    rep.flagged = rep.mass_gap > 0.05;

    if (!dec.profiles.empty()) {
        Field sum = make_field(u.grid);
        double s_each = 0.0;
        for (const auto& p : dec.profiles) {
            Field b = apply_enlarged(p.fit, p.phi);
            for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += b.values[i];
            s_each += scattering_size(free_trajectory(b, {-t_ref, t_ref}, s_quad_dt));
        }
        const double s_sum = scattering_size(free_trajectory(sum, {-t_ref, t_ref}, s_quad_dt));
        rep.S_gap = s_each > 0.0 ? std::abs(s_sum - s_each) / s_each : 0.0;
    }
    return rep;
}

SeparationReport orthogonality_report(const ProfileDecomposition& dec) {
    SeparationReport rep;
    const std::size_t n = dec.profiles.size();
    if (n < 2) return rep;
    rep.pairwise.assign(n, std::vector<double>(n, 0.0));
    rep.min_offdiag = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            rep.pairwise[i][j] = separation(dec.profiles[i].fit, dec.profiles[j].fit);
            if (i != j) rep.min_offdiag = std::min(rep.min_offdiag, rep.pairwise[i][j]);
        }
    rep.suspect = rep.min_offdiag <= 2.0 + 1e-9;
    return rep;
}

Field radial_projection(const Field& f) {
    const Grid& g = *f.grid;
    Field out = make_field(f.grid, f.label);
    const int n = g.n();
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            const int mi = i == 0 ? 0 : n - i;
            out.values[i] = 0.5 * (f.values[i] + f.values[mi]);
        }
        return out;
    }
    // Angular average of the periodic bilinear interpolant.
    const int n_angles = 128;
    const double L = g.box_halfwidth(), h = g.spacing();
    auto interp = [&](double x, double y) -> cplx {
        double fx = (x + L) / h, fy = (y + L) / h;
        int i0 = static_cast<int>(std::floor(fx)), j0 = static_cast<int>(std::floor(fy));
        const double ax = fx - i0, ay = fy - j0;
        auto wrap = [n](int i) { return ((i % n) + n) % n; };
        const cplx f00 = f.values[g.flat(wrap(i0), wrap(j0))];
        const cplx f10 = f.values[g.flat(wrap(i0 + 1), wrap(j0))];
        const cplx f01 = f.values[g.flat(wrap(i0), wrap(j0 + 1))];
        const cplx f11 = f.values[g.flat(wrap(i0 + 1), wrap(j0 + 1))];
        return (1 - ax) * (1 - ay) * f00 + ax * (1 - ay) * f10 + (1 - ax) * ay * f01 +
               ax * ay * f11;
    };
    for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
        auto x = g.point(idx);
        const double rad = std::hypot(x[0], x[1]);
        cplx acc{0.0, 0.0};
        for (int a = 0; a < n_angles; ++a) {
            const double th = 2.0 * std::numbers::pi * a / n_angles;
            acc += interp(rad * std::cos(th), rad * std::sin(th));
        }
        out.values[idx] = acc / static_cast<double>(n_angles);
    }
    return out;
}

double radial_asymmetry(const Field& f) {
    const double m = mass(f);
    if (m < kZeroMass) return 0.0;
    Field p = radial_projection(f);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) acc += std::norm(f.values[i] - p.values[i]);
    return std::sqrt(acc * f.grid->cell_volume() / m);
}

double orbit_distance(const Field& a, const Field& b) {
    const Grid& g = *a.grid;
    const double ma = mass(a), mb = mass(b);
    // |<a(. - x0), b>| over all lattice shifts, via one correlation FFT:
    // entry m holds sum_j a_{j-m} conj(b_j).
    std::vector<cplx> fa(a.values.size()), fb(b.values.size());
    for (std::size_t i = 0; i < fa.size(); ++i) {
        fa[i] = std::conj(a.values[i]);
        fb[i] = std::conj(b.values[i]);
    }
    g.fft(fa);
    g.fft(fb);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] = std::conj(fa[i]) * fb[i];
    g.ifft(fa);
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        const double v = std::abs(fa[i]);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // Sub-cell parabolic polish around the best lattice shift.
    auto shifted_inner = [&](const Vec& x0) {
        Field sh = apply(translation_element(x0), a);
        return std::abs(inner(sh, b));
    };
    auto bij = g.indices(best_i);
    Vec x0{lag_coord(g, bij[0]), g.dim() == 2 ? lag_coord(g, bij[1]) : 0.0};
    double f0 = shifted_inner(x0);
    for (int axis = 0; axis < g.dim(); ++axis) {
        const double d0 = 0.5 * g.spacing();
        Vec xm = x0, xp = x0;
        xm[axis] -= d0;
        xp[axis] += d0;
        const double fm = shifted_inner(xm), fp = shifted_inner(xp);
        const double denom = fm - 2.0 * f0 + fp;
        if (denom < 0.0) {
            Vec xs = x0;
            xs[axis] += std::clamp(0.5 * d0 * (fm - fp) / denom, -d0, d0);
            const double fs = shifted_inner(xs);
            if (fs > f0) {
                x0 = xs;
                f0 = fs;
            }
        }
    }
    const double dist2 = std::max(0.0, ma + mb - 2.0 * f0);
    return std::sqrt(dist2);
}

}  // namespace mcnls
