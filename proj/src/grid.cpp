#include "mcnls/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcnls {

namespace {

bool power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

}  // namespace

Grid::Grid(int dim, int n, double L)
    : dim_(dim), n_(n), L_(L), h_(2.0 * L / n), dxi_(std::numbers::pi / L) {
    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_);
    cellvol_ = std::pow(h_, dim_);
    freqcellvol_ = std::pow(dxi_, dim_);

    twiddle_.resize(n_ / 2);
    for (int k = 0; k < n_ / 2; ++k)
        twiddle_[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n_);

    bitrev_.resize(n_);
    int bits = std::countr_zero(static_cast<unsigned>(n_));
    for (int i = 0; i < n_; ++i) {
        unsigned r = 0, v = static_cast<unsigned>(i);
        for (int b = 0; b < bits; ++b) {
            r = (r << 1) | (v & 1u);
            v >>= 1;
        }
        bitrev_[i] = static_cast<int>(r);
    }
}

GridPtr Grid::make(int dim, int points_per_axis, double box_halfwidth) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("Grid: dim must be 1 or 2");
    if (points_per_axis < 8 || !power_of_two(points_per_axis))
        throw std::invalid_argument("Grid: points_per_axis must be a power of two >= 8");
    if (!(box_halfwidth > 0) || !std::isfinite(box_halfwidth))
        throw std::invalid_argument("Grid: box_halfwidth must be positive and finite");
    return GridPtr(new Grid(dim, points_per_axis, box_halfwidth));
}

void Grid::fft1d(cplx* a, bool inverse) const {
    for (int i = 0; i < n_; ++i) {
        int j = bitrev_[i];
        if (j > i) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n_; len <<= 1) {
        int half = len >> 1;
        int step = n_ / len;
        for (int base = 0; base < n_; base += len) {
            for (int k = 0; k < half; ++k) {
                cplx w = twiddle_[static_cast<std::size_t>(k) * step];
                if (inverse) w = std::conj(w);
                cplx u = a[base + k];
                cplx v = a[base + k + half] * w;
                a[base + k] = u + v;
                a[base + k + half] = u - v;
            }
        }
    }
}

void Grid::transform(std::span<cplx> data, bool inverse) const {
    if (data.size() != size_)
        throw std::invalid_argument("Grid::fft: data size mismatch");
    if (dim_ == 1) {
        fft1d(data.data(), inverse);
    } else {
        for (int r = 0; r < n_; ++r)
            fft1d(data.data() + static_cast<std::size_t>(r) * n_, inverse);
        std::vector<cplx> col(n_);
        for (int c = 0; c < n_; ++c) {
            for (int r = 0; r < n_; ++r) col[r] = data[flat(c, r)];
            fft1d(col.data(), inverse);
            for (int r = 0; r < n_; ++r) data[flat(c, r)] = col[r];
        }
    }
    if (inverse) {
        double s = 1.0 / static_cast<double>(size_);
        for (auto& z : data) z *= s;
    }
}

void Grid::fft(std::span<cplx> data) const { transform(data, false); }
void Grid::ifft(std::span<cplx> data) const { transform(data, true); }

Field make_field(const GridPtr& grid, std::string label) {
    if (!grid) throw std::invalid_argument("make_field: null grid");
    return Field{grid, std::vector<cplx>(grid->size(), cplx{0.0, 0.0}), std::move(label), false};
}

bool all_finite(const Field& f) {
    for (const auto& z : f.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

namespace {

// Parity of the signed lattice index behind a storage index; this is the
// phase e^{+-i pi m} that anchors x=-L (resp. xi=-nyquist) at slot zero.
inline double storage_sign(const Grid& g, std::size_t flat) {
    auto ij = g.indices(flat);
    int s = ij[0] + (g.dim() == 2 ? ij[1] : 0);
    return (s & 1) ? -1.0 : 1.0;
}

}  // namespace

Spectrum fourier(const Field& f) {
    if (!all_finite(f) && !f.diverged)
        throw std::invalid_argument("fourier: field has non-finite samples");
    Spectrum s{f.grid, f.values};
    f.grid->fft(s.coeffs);
    const double w = f.grid->cell_volume();
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
        s.coeffs[i] *= w * storage_sign(*f.grid, i);
    return s;
}

Field inverse_fourier(const Spectrum& s) {
    Field f = make_field(s.grid);
    f.values = s.coeffs;
    const double w = 1.0 / s.grid->cell_volume();
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] *= w * storage_sign(*s.grid, i);
    s.grid->ifft(f.values);
    return f;
}

double mass(const Field& f) {
    double acc = 0.0;
    for (const auto& z : f.values) acc += std::norm(z);
    return acc * f.grid->cell_volume();
}

double spectral_mass(const Spectrum& s) {
    double acc = 0.0;
    for (const auto& z : s.coeffs) acc += std::norm(z);
    const int d = s.grid->dim();
    return acc * s.grid->freq_cell_volume() / std::pow(2.0 * std::numbers::pi, d);
}

cplx inner(const Field& f, const Field& g) {
    if (f.grid->size() != g.grid->size())
        throw std::invalid_argument("inner: grids differ");
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        acc += f.values[i] * std::conj(g.values[i]);
    return acc * f.grid->cell_volume();
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm: p must be >= 1");
    double acc = 0.0;
    if (p == 2.0) {
        for (const auto& z : f.values) acc += std::norm(z);
    } else {
        for (const auto& z : f.values) acc += std::pow(std::abs(z), p);
    }
    return std::pow(acc * f.grid->cell_volume(), 1.0 / p);
}

double boundary_mass_fraction(const Field& f) {
    const Grid& g = *f.grid;
    const double half = g.box_halfwidth() / 2.0;
    double outer = 0.0, total = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double m = std::norm(f.values[i]);
        total += m;
        auto x = g.point(i);
        double linf = std::abs(x[0]);
        if (g.dim() == 2) linf = std::max(linf, std::abs(x[1]));
        if (linf > half) outer += m;
    }
    return total > 0.0 ? outer / total : 0.0;
}

Field translate_cells(const Field& f, std::array<int, 2> cells) {
    const Grid& g = *f.grid;
    const int n = g.n();
    auto wrap = [n](int i) { return ((i % n) + n) % n; };
    Field out = make_field(f.grid, f.label);
    out.diverged = f.diverged;
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) out.values[wrap(i + cells[0])] = f.values[i];
    } else {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                out.values[g.flat(wrap(i + cells[0]), wrap(j + cells[1]))] = f.values[g.flat(i, j)];
    }
    return out;
}

namespace {

// One axis of the zoomed resampling: given samples along a contiguous row,
// produce the trigonometric interpolant evaluated at beta*x_j.  The phases
// e^{i beta x_j xi_m} form a geometric sequence in m, so each output point is
// a Horner-style sweep; the unit phasor is refreshed periodically to stop
// rounding drift.
void zoom_row(const Grid& g, const cplx* in, cplx* out, double beta, double trunc_cutoff) {
    const int n = g.n();
    std::vector<cplx> F(in, in + n);
    g.fft1d(F.data(), false);
    std::vector<cplx> A(n);
    for (int mm = 0; mm < n; ++mm) {
        int m_signed = mm - n / 2;
        int idx = (m_signed + n) % n;
        double sign = (m_signed & 1) ? -1.0 : 1.0;
        double xi = g.dxi() * m_signed;
        cplx c = F[idx] * (sign / n);
        if (std::abs(xi) > trunc_cutoff) c = 0.0;
        A[mm] = c;
    }
    for (int j = 0; j < n; ++j) {
        const double theta = beta * g.coord(j) * g.dxi();
        const cplx step = std::polar(1.0, theta);
        cplx p = std::polar(1.0, -theta * (n / 2));
        cplx acc{0.0, 0.0};
        for (int mm = 0; mm < n; ++mm) {
            if ((mm & 255) == 0 && mm)
                p = std::polar(1.0, theta * (mm - n / 2));
            acc += A[mm] * p;
            p *= step;
        }
        out[j] = acc;
    }
}

}  // namespace

Field zoom_resample(const Field& f, double beta, double* aliased_fraction) {
    if (beta == 0.0 || !std::isfinite(beta))
        throw std::invalid_argument("zoom_resample: beta must be finite and nonzero");
    const Grid& g = *f.grid;
    const double cutoff =
        std::abs(beta) > 1.0 ? g.nyquist() / std::abs(beta) : g.nyquist() * 2.0;
    if (aliased_fraction)
        *aliased_fraction = std::abs(beta) > 1.0 ? spectral_mass_beyond(f, cutoff) : 0.0;

    Field out = make_field(f.grid, f.label);
    out.diverged = f.diverged;
    const int n = g.n();
    if (g.dim() == 1) {
        zoom_row(g, f.values.data(), out.values.data(), beta, cutoff);
    } else {
        std::vector<cplx> tmp(g.size());
        for (int r = 0; r < n; ++r)
            zoom_row(g, f.values.data() + static_cast<std::size_t>(r) * n,
                     tmp.data() + static_cast<std::size_t>(r) * n, beta, cutoff);
        std::vector<cplx> col(n), colout(n);
        for (int c = 0; c < n; ++c) {
            for (int r = 0; r < n; ++r) col[r] = tmp[g.flat(c, r)];
            zoom_row(g, col.data(), colout.data(), beta, cutoff);
            for (int r = 0; r < n; ++r) out.values[g.flat(c, r)] = colout[r];
        }
    }
    return out;
}

Field dilate(const Field& f, double alpha, double* dropped_fraction) {
    if (alpha == 0.0 || !std::isfinite(alpha))
        throw std::invalid_argument("dilate: alpha must be finite and nonzero");
    if (dropped_fraction) *dropped_fraction = 0.0;
    if (alpha == 1.0) return f;
    const Grid& g = *f.grid;
    if (std::abs(alpha) >= 1.0) {
        // g(x) = f(x/alpha) evaluated inside the box; |1/alpha| <= 1
        return zoom_resample(f, 1.0 / alpha, nullptr);
    }
    // Compression: sample the spectrum interpolant, g_hat(xi) = |a|^d f_hat(a xi).
    if (dropped_fraction)
        *dropped_fraction = spectral_mass_beyond(f, std::abs(alpha) * g.nyquist());
    Spectrum s = fourier(f);
    const int n = g.n();
    GridPtr fg = Grid::make(g.dim(), n, g.nyquist());
    Field sf = make_field(fg);
    auto shift = [n](int k) { return (k + n / 2) % n; };
    if (g.dim() == 1) {
        for (int k = 0; k < n; ++k) sf.values[shift(k)] = s.coeffs[k];
    } else {
        for (int k1 = 0; k1 < n; ++k1)
            for (int k0 = 0; k0 < n; ++k0)
                sf.values[fg->flat(shift(k0), shift(k1))] = s.coeffs[g.flat(k0, k1)];
    }
    Field zoomed = zoom_resample(sf, alpha, nullptr);
    const double det = std::pow(std::abs(alpha), g.dim());
    if (g.dim() == 1) {
        for (int k = 0; k < n; ++k) s.coeffs[k] = det * zoomed.values[shift(k)];
    } else {
        for (int k1 = 0; k1 < n; ++k1)
            for (int k0 = 0; k0 < n; ++k0)
                s.coeffs[g.flat(k0, k1)] = det * zoomed.values[fg->flat(shift(k0), shift(k1))];
    }
    Field out = inverse_fourier(s);
    out.label = f.label;
    out.diverged = f.diverged;
    return out;
}

double spectral_mass_beyond(const Field& f, double cutoff_per_axis) {
    Spectrum s = fourier(f);
    const Grid& g = *f.grid;
    double beyond = 0.0, total = 0.0;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        double m = std::norm(s.coeffs[i]);
        total += m;
        auto xi = g.freq_point(i);
        if (std::abs(xi[0]) > cutoff_per_axis ||
            (g.dim() == 2 && std::abs(xi[1]) > cutoff_per_axis))
            beyond += m;
    }
    return total > 0.0 ? beyond / total : 0.0;
}

}  // namespace mcnls
