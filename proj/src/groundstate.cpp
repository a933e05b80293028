#include "mcnls/groundstate.hpp"

#include <algorithm>
#include <cmath>

namespace mcnls {

namespace {

// Pointwise Q^{1+4/d} for real nonnegative iterates: d=1 -> Q^5, d=2 -> Q^3.
inline double nl_term(double q, int d) {
    const double q2 = q * q;
    return d == 1 ? q2 * q2 * q : q2 * q;
}

}  // namespace

GroundState petviashvili_solve(const GridPtr& grid, double tol, int max_iter,
                               const Field* initial) {
    const Grid& g = *grid;
    const int d = g.dim();
    if (g.box_halfwidth() < 12.0)
        throw std::invalid_argument("petviashvili_solve: box_halfwidth must be >= 12");
    const double alpha = (1.0 + 4.0 / d) / (4.0 / d);

    std::vector<double> xi2(g.size());
    for (std::size_t i = 0; i < xi2.size(); ++i) {
        auto xi = g.freq_point(i);
        xi2[i] = xi[0] * xi[0] + xi[1] * xi[1];
    }

    std::vector<double> q(g.size());
    if (initial) {
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = initial->values[i].real();
    } else {
        for (std::size_t i = 0; i < q.size(); ++i) {
            auto x = g.point(i);
            q[i] = std::exp(-(x[0] * x[0] + x[1] * x[1]));
        }
    }

    const double cell = g.cell_volume();
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    std::vector<double> history;
    std::vector<cplx> work(g.size()), nl_hat(g.size());

    auto equation_residual = [&](const std::vector<double>& v) {
        // || Delta v + v^{1+4/d} - v ||_2 with the spectral Laplacian
        for (std::size_t i = 0; i < v.size(); ++i) work[i] = v[i];
        g.fft(work);
        for (std::size_t i = 0; i < work.size(); ++i) work[i] *= -xi2[i];
        g.ifft(work);
        double acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double r = work[i].real() + nl_term(v[i], d) - v[i];
            const double im = work[i].imag();
            acc += r * r + im * im;
        }
        return std::sqrt(acc * cell);
    };

    for (iter = 1; iter <= max_iter; ++iter) {
        // nl = Q^{1+4/d}; denominators of gamma
        double denom = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double nl = nl_term(q[i], d);
            nl_hat[i] = nl;
            denom += nl * q[i];
        }
        denom *= cell;
        g.fft(nl_hat);

        // numerator <(-Delta+1)Q, Q> via the spectrum of Q
        for (std::size_t i = 0; i < q.size(); ++i) work[i] = q[i];
        g.fft(work);
        double numer = 0.0;
        for (std::size_t i = 0; i < work.size(); ++i) numer += (1.0 + xi2[i]) * std::norm(work[i]);
        numer *= cell / static_cast<double>(g.size());

        if (!(denom > 0.0) || !std::isfinite(numer))
            throw GroundStateError("petviashvili_solve: degenerate iterate", residual);
        const double gamma = numer / denom;
        const double boost = std::pow(gamma, alpha);

        for (std::size_t i = 0; i < nl_hat.size(); ++i) nl_hat[i] *= boost / (1.0 + xi2[i]);
        g.ifft(nl_hat);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = nl_hat[i].real();

        double m = 0.0;
        for (double v : q) m += v * v;
        m *= cell;
        if (m < 1e-10)
            throw GroundStateError("petviashvili_solve: iterate collapsed to zero", residual);

        residual = equation_residual(q);
        history.push_back(residual);
        if (residual < tol) break;
    }
    if (residual >= tol)
        throw GroundStateError("petviashvili_solve: no convergence within max_iter", residual);

    GroundState out;
    out.field = make_field(grid, "groundstate");
    for (std::size_t i = 0; i < q.size(); ++i) out.field.values[i] = q[i];
    out.residual = residual;
    out.mass = mass(out.field);
    out.iterations = iter;
    out.residual_history = std::move(history);
    return out;
}

Field soliton_initial_data(const GroundState& q, const GroupElement& g) {
    Field f = apply(g, q.field);
    f.label = "soliton";
    return f;
}

double mirror_asymmetry(const Field& f) {
    const Grid& g = *f.grid;
    const int n = g.n();
    double worst = 0.0, peak = 0.0;
    for (const auto& z : f.values) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) return 0.0;
    if (g.dim() == 1) {
        for (int i = 1; i < n; ++i)
            worst = std::max(worst, std::abs(f.values[i] - f.values[n - i]));
    } else {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const int mi = i == 0 ? 0 : n - i;
                const int mj = j == 0 ? 0 : n - j;
                worst = std::max(worst,
                                 std::abs(f.values[g.flat(i, j)] - f.values[g.flat(mi, mj)]));
            }
    }
    return worst / peak;
}

}  // namespace mcnls
