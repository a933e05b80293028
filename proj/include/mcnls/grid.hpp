#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mcnls {

using cplx = std::complex<double>;

using Vec = std::array<double, 2>;  // d-vector; the unused slot stays 0 in d=1

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1]}; }

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform periodic sampling of the box [-L, L)^d together with its dual
/// frequency lattice xi_k = pi k / L, k in {-n/2, ..., n/2-1}^d.
///
/// Grids are immutable after construction and safe to share across threads.
/// The in-place transforms are plain radix-2 FFTs over the sample indices;
/// all physical scalings (the h^d quadrature weight and the alternating sign
/// that anchors x = -L at sample 0) live in fourier()/inverse_fourier().
class Grid {
public:
    /// dim in {1,2}; points_per_axis a power of two >= 8; box_halfwidth > 0.
    /// Throws std::invalid_argument otherwise.
    static GridPtr make(int dim, int points_per_axis, double box_halfwidth);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double box_halfwidth() const { return L_; }
    double spacing() const { return h_; }            ///< h = 2L/n
    double dxi() const { return dxi_; }              ///< pi/L
    double nyquist() const { return 0.5 * n_ * dxi_; }
    std::size_t size() const { return size_; }       ///< n^d samples

    double cell_volume() const { return cellvol_; }          ///< h^d
    double freq_cell_volume() const { return freqcellvol_; } ///< (pi/L)^d

    /// Physical coordinate of a 1-d sample index: x_i = -L + i h.
    double coord(int i) const { return -L_ + i * h_; }
    /// Signed frequency of a 1-d storage index k in [0, n).
    double freq(int k) const { return dxi_ * (k < n_ / 2 ? k : k - n_); }

    /// Row-major decomposition of a flat index (axis 0 fastest).
    std::array<int, 2> indices(std::size_t flat) const {
        return {static_cast<int>(flat % n_), static_cast<int>(flat / n_)};
    }
    std::size_t flat(int i0, int i1 = 0) const {
        return static_cast<std::size_t>(i1) * n_ + i0;
    }
    std::array<double, 2> point(std::size_t flat) const {
        auto ij = indices(flat);
        return {coord(ij[0]), dim_ == 2 ? coord(ij[1]) : 0.0};
    }
    std::array<double, 2> freq_point(std::size_t flat) const {
        auto ij = indices(flat);
        return {freq(ij[0]), dim_ == 2 ? freq(ij[1]) : 0.0};
    }

    /// Unnormalized forward DFT (sign e^{-2 pi i jk/n}), in place, all axes.
    void fft(std::span<cplx> data) const;
    /// Inverse of fft(), including the 1/n^d normalization.
    void ifft(std::span<cplx> data) const;
    /// One contiguous length-n transform (unnormalized in both directions).
    void fft1d(cplx* row, bool inverse) const;

private:
    Grid(int dim, int n, double L);
    void transform(std::span<cplx> data, bool inverse) const;

    int dim_;
    int n_;
    double L_, h_, dxi_;
    std::size_t size_;
    double cellvol_, freqcellvol_;
    std::vector<cplx> twiddle_;   // e^{-2 pi i k/n}, k < n/2
    std::vector<int> bitrev_;
};

/// One time slice of a complex L^2 function sampled on a Grid.
struct Field {
    GridPtr grid;
    std::vector<cplx> values;
    std::string label;
    bool diverged = false;
};

/// Discrete approximation of f_hat(xi) = \int e^{-i x.xi} f(x) dx on the
/// frequency lattice, stored in FFT order (use Grid::freq_point).
struct Spectrum {
    GridPtr grid;
    std::vector<cplx> coeffs;
};

Field make_field(const GridPtr& grid, std::string label = "");

/// Sample fn(x) at every grid point. fn takes std::array<double,2>.
template <class F>
Field sample(const GridPtr& grid, F&& fn, std::string label = "") {
    Field f = make_field(grid, std::move(label));
    for (std::size_t i = 0; i < grid->size(); ++i)
        f.values[i] = fn(grid->point(i));
    return f;
}

bool all_finite(const Field& f);

Spectrum fourier(const Field& f);
Field inverse_fourier(const Spectrum& s);

/// M(f) = sum |f|^2 h^d.
double mass(const Field& f);
/// Mass measured on the frequency side: (2pi)^{-d} sum |coeffs|^2 (pi/L)^d.
double spectral_mass(const Spectrum& s);
/// <f,g> = sum f conj(g) h^d (conjugate-linear in the second slot).
cplx inner(const Field& f, const Field& g);
/// (sum |f|^p h^d)^{1/p}; p >= 1.
double lp_norm(const Field& f, double p);

/// Fraction of the mass lying outside |x|_inf <= L/2 (aliasing sentinel).
double boundary_mass_fraction(const Field& f);

/// Exact cyclic shift by whole cells; commutes with mass bit-for-bit.
Field translate_cells(const Field& f, std::array<int, 2> cells);

/// Samples of the trigonometric interpolant at beta * x_j (axis-separable).
/// |beta| > 1 first truncates the per-axis spectrum to |xi| <= nyquist/|beta|;
/// if aliased_fraction is non-null it receives the truncated mass fraction.
Field zoom_resample(const Field& f, double beta, double* aliased_fraction = nullptr);

/// Samples of f(x/alpha) on the same grid (alpha < 0 reflects).  Expansion
/// (|alpha| > 1) interpolates in physical space; compression interpolates the
/// spectrum instead, so neither direction ever reads past its domain and no
/// periodic copies fold in.  dropped_fraction receives the spectral mass
/// fraction the compression pushed beyond the Nyquist band.
Field dilate(const Field& f, double alpha, double* dropped_fraction = nullptr);

/// Mass fraction truncated if the per-axis spectrum were cut at |xi| <= cutoff.
double spectral_mass_beyond(const Field& f, double cutoff_per_axis);

}  // namespace mcnls
