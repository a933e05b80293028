#include "mcnls/io.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "mcnls/diagnostics.hpp"

namespace mcnls {

namespace {

void put_u16(std::string& buf, uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
}
void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& buf, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
    const unsigned char* p;
    const unsigned char* end;
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
        p += 4;
        return v;
    }
    double f64() {
        need(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(p[i]) << (8 * i);
        p += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    void need(std::size_t k) {
        if (p + k > end) throw std::runtime_error("field snapshot: truncated file");
    }
};

}  // namespace

void write_field(const std::filesystem::path& path, const Field& f) {
    std::string buf;
    buf.reserve(18 + 16 * f.values.size());
    buf += "MCNL";
    put_u16(buf, 1);
    put_u16(buf, static_cast<uint16_t>(f.grid->dim()));
    put_u32(buf, static_cast<uint32_t>(f.grid->n()));
    put_f64(buf, f.grid->box_halfwidth());
    for (const auto& z : f.values) {
        put_f64(buf, z.real());
        put_f64(buf, z.imag());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field: cannot open " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Field read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field: cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 18 || data.compare(0, 4, "MCNL") != 0)
        throw std::runtime_error("read_field: bad magic in " + path.string());
    Reader r{reinterpret_cast<const unsigned char*>(data.data()) + 4,
             reinterpret_cast<const unsigned char*>(data.data()) + data.size()};
    const uint16_t version = r.u16();
    if (version != 1) throw std::runtime_error("read_field: unsupported version");
    const int dim = r.u16();
    const int n = static_cast<int>(r.u32());
    const double L = r.f64();
    GridPtr grid = Grid::make(dim, n, L);
    Field f = make_field(grid);
    for (auto& z : f.values) {
        const double re = r.f64();
        const double im = r.f64();
        z = {re, im};
    }
    return f;
}

nlohmann::json group_to_json(const GroupElement& g, int dim) {
    nlohmann::json j;
    j["theta"] = g.theta;
    j["xi0"] = dim == 2 ? std::vector<double>{g.xi0[0], g.xi0[1]}
                        : std::vector<double>{g.xi0[0]};
    j["x0"] = dim == 2 ? std::vector<double>{g.x0[0], g.x0[1]} : std::vector<double>{g.x0[0]};
    j["lambda"] = g.lambda;
    return j;
}

nlohmann::json enlarged_to_json(const EnlargedElement& g, int dim) {
    nlohmann::json j = group_to_json(g.base, dim);
    j["t0"] = g.t0;
    return j;
}

GroupElement group_from_json(const nlohmann::json& j) {
    GroupElement g;
    g.theta = wrap_angle(j.at("theta").get<double>());
    auto xi = j.at("xi0").get<std::vector<double>>();
    auto x = j.at("x0").get<std::vector<double>>();
    g.xi0 = {xi.at(0), xi.size() > 1 ? xi[1] : 0.0};
    g.x0 = {x.at(0), x.size() > 1 ? x[1] : 0.0};
    g.lambda = j.at("lambda").get<double>();
    if (!(g.lambda > 0.0)) throw std::invalid_argument("group_from_json: lambda <= 0");
    return g;
}

EnlargedElement enlarged_from_json(const nlohmann::json& j) {
    EnlargedElement g;
    g.base = group_from_json(j);
    g.t0 = j.contains("t0") ? j.at("t0").get<double>() : 0.0;
    return g;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 == header.size() ? "\n" : ",");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 == row.size() ? "\n" : ",");
    }
}

namespace {

struct AxisMap {
    double lo, hi;
    double map(double v, double px0, double px1) const {
        if (hi == lo) return 0.5 * (px0 + px1);
        return px0 + (v - lo) / (hi - lo) * (px1 - px0);
    }
};

}  // namespace

void write_svg_lines(const std::filesystem::path& path, const std::string& title,
                     const std::vector<SvgSeries>& series, bool log_y) {
    const int W = 860, H = 500, ml = 70, mr = 160, mt = 40, mb = 50;
    AxisMap xm{0, 1}, ym{0, 1};
    bool first = true;
    auto yval = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double xv = s.x[i], yv = yval(s.y[i]);
            if (first) {
                xm = {xv, xv};
                ym = {yv, yv};
                first = false;
            }
            xm.lo = std::min(xm.lo, xv);
            xm.hi = std::max(xm.hi, xv);
            ym.lo = std::min(ym.lo, yv);
            ym.hi = std::max(ym.hi, yv);
        }
    if (ym.hi == ym.lo) ym.hi = ym.lo + 1.0;
    if (xm.hi == xm.lo) xm.hi = xm.lo + 1.0;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_lines: cannot open " + path.string());
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    out << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
        << H - mt - mb << "' fill='none' stroke='black'/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double fx = xm.lo + (xm.hi - xm.lo) * tick / 4.0;
        const double fy = ym.lo + (ym.hi - ym.lo) * tick / 4.0;
        const double px = ml + (W - ml - mr) * tick / 4.0;
        const double py = H - mb - (H - mt - mb) * tick / 4.0;
        out << "<text x='" << px << "' y='" << H - mb + 18
            << "' text-anchor='middle' font-size='11'>" << format_double(fx).substr(0, 9)
            << "</text>\n";
        out << "<text x='" << ml - 6 << "' y='" << py
            << "' text-anchor='end' font-size='11'>"
            << format_double(log_y ? std::pow(10.0, fy) : fy).substr(0, 9) << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << colors[ci % 8] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double px = xm.map(s.x[i], ml, W - mr);
            const double py = H - mb - (ym.map(yval(s.y[i]), 0, H - mt - mb));
            out << px << "," << py << " ";
        }
        out << "'/>\n";
        out << "<text x='" << W - mr + 8 << "' y='" << mt + 16 + 18 * ci
            << "' font-size='12' fill='" << colors[ci % 8] << "'>" << s.name << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

namespace {

void png_chunk(std::string& out, const char* type, const std::string& payload) {
    uint32_t len = static_cast<uint32_t>(payload.size());
    char lenb[4] = {static_cast<char>(len >> 24), static_cast<char>(len >> 16),
                    static_cast<char>(len >> 8), static_cast<char>(len)};
    out.append(lenb, 4);
    std::string body(type, 4);
    body += payload;
    out += body;
    uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    char crcb[4] = {static_cast<char>(crc >> 24), static_cast<char>(crc >> 16),
                    static_cast<char>(crc >> 8), static_cast<char>(crc)};
    out.append(crcb, 4);
}

void colormap(double t, unsigned char rgb[3]) {
    // compact dark-blue -> teal -> yellow ramp
    t = std::clamp(t, 0.0, 1.0);
    const double r = std::clamp(1.5 * t - 0.4, 0.0, 1.0);
    const double g = std::clamp(1.2 * t, 0.0, 1.0);
    const double b = std::clamp(1.0 - 1.1 * t + 0.2, 0.1, 1.0) * (1.0 - 0.6 * t);
    rgb[0] = static_cast<unsigned char>(255.0 * r);
    rgb[1] = static_cast<unsigned char>(255.0 * g);
    rgb[2] = static_cast<unsigned char>(255.0 * b);
}

}  // namespace

void write_png_heatmap(const std::filesystem::path& path, const std::vector<double>& data,
                       int rows, int cols) {
    if (rows <= 0 || cols <= 0 || data.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("write_png_heatmap: shape mismatch");
    double lo = data[0], hi = data[0];
    for (double v : data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) hi = lo + 1.0;

    std::string raw;
    raw.reserve(static_cast<std::size_t>(rows) * (1 + 3 * cols));
    for (int r = 0; r < rows; ++r) {
        raw.push_back('\0');  // filter type 0
        for (int c = 0; c < cols; ++c) {
            unsigned char rgb[3];
            colormap((data[static_cast<std::size_t>(r) * cols + c] - lo) / (hi - lo), rgb);
            raw.append(reinterpret_cast<char*>(rgb), 3);
        }
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  6) != Z_OK)
        throw std::runtime_error("write_png_heatmap: deflate failed");
    compressed.resize(bound);

    std::string png("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    auto be32 = [&](uint32_t v) {
        ihdr.push_back(static_cast<char>(v >> 24));
        ihdr.push_back(static_cast<char>(v >> 16));
        ihdr.push_back(static_cast<char>(v >> 8));
        ihdr.push_back(static_cast<char>(v));
    };
    be32(static_cast<uint32_t>(cols));
    be32(static_cast<uint32_t>(rows));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    png_chunk(png, "IHDR", ihdr);
    png_chunk(png, "IDAT", compressed);
    png_chunk(png, "IEND", "");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_png_heatmap: cannot open " + path.string());
    out.write(png.data(), static_cast<std::streamsize>(png.size()));
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& u, int max_snapshots) {
    std::filesystem::create_directories(dir / "snapshots");
    nlohmann::json j;
    j["config"] = {{"mu", u.config.mu},
                   {"dim", u.config.dim},
                   {"dt", u.config.dt},
                   {"dt_policy",
                    u.config.dt_policy == SolverConfig::DtPolicy::fixed ? "fixed" : "adaptive"},
                   {"adaptive_cap", u.config.adaptive_cap},
                   {"store_every", u.config.store_every},
                   {"scale_eta_ref", u.config.scale_eta_ref}};
    j["diverged"] = u.diverged;
    j["boundary_mass_max"] = u.boundary_mass_max;
    j["mass_drift"] = u.mass_drift;
    j["times"] = u.times;

    auto monitor = blowup_monitor(u, 2.0);
    nlohmann::json snaps = nlohmann::json::array();
    const std::size_t stride =
        std::max<std::size_t>(1, u.times.size() / std::max(1, max_snapshots));
    for (std::size_t k = 0; k < u.times.size(); ++k) {
        nlohmann::json s;
        s["t"] = u.times[k];
        s["mass"] = mass(u.fields[k]);
        s["N"] = monitor[k].concentration_scale;
        s["peak"] = monitor[k].max_amplitude;
        s["x"] = u.config.dim == 2
                     ? std::vector<double>{monitor[k].x_center[0], monitor[k].x_center[1]}
                     : std::vector<double>{monitor[k].x_center[0]};
        s["xi"] = u.config.dim == 2
                      ? std::vector<double>{monitor[k].xi_center[0], monitor[k].xi_center[1]}
                      : std::vector<double>{monitor[k].xi_center[0]};
        if (k % stride == 0 || k + 1 == u.times.size()) {
            char name[48];
            std::snprintf(name, sizeof name, "snapshots/u_%05zu.field", k);
            write_field(dir / name, u.fields[k]);
            s["file"] = name;
        }
        snaps.push_back(s);
    }
    j["snapshots"] = snaps;
    std::ofstream out(dir / "trajectory.json");
    out << j.dump(2) << "\n";
}

}  // namespace mcnls
