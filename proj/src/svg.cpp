#include "spdckit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace spdckit::svg {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 70.0;  // room for the secondary axis labels
constexpr double kTop = 42.0;
constexpr double kBottom = 52.0;

std::string num(double v, const char* fmt = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

// tick label without trailing zero noise
std::string tick_label(double v) {
    if (v == 0.0) return "0";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> t;
    double v = std::ceil(lo / step) * step;
    for (; v <= hi + 0.5 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

struct Mapper {
    double lo = 0.0, hi = 1.0, p0 = 0.0, p1 = 1.0;
    double operator()(double v) const { return p0 + (v - lo) / (hi - lo) * (p1 - p0); }
};

// polyline(s) through (x, y) pairs; NaN samples split the line
void polyline(std::string& out, const std::vector<double>& xs, const std::vector<double>& ys,
              const Mapper& mx, const Mapper& my, const char* style) {
    std::string pts;
    auto flush = [&] {
        if (pts.empty()) return;
        out += "<polyline fill=\"none\" " + std::string(style) + " points=\"" + pts + "\"/>\n";
        pts.clear();
    };
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            flush();
            continue;
        }
        pts += num(mx(xs[i])) + "," + num(my(ys[i])) + " ";
    }
    flush();
}

void frame_and_title(std::string& out, const std::string& title) {
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" fill=\"#ffffff\"/>\n";
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
           num(kWidth - kLeft - kRight) + "\" height=\"" + num(kHeight - kTop - kBottom) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + num(kLeft) + "\" y=\"26\" font-size=\"15\" fill=\"#222222\">" + title +
           "</text>\n";
}

void x_axis(std::string& out, const Mapper& mx, const std::string& label) {
    const double y = kHeight - kBottom;
    for (double t : nice_ticks(mx.lo, mx.hi)) {
        const double px = mx(t);
        out += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(px) +
               "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
        out += "<text x=\"" + num(px) + "\" y=\"" + num(y + 18.0) +
               "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\">" + tick_label(t) +
               "</text>\n";
    }
    out += "<text x=\"" + num(0.5 * (kLeft + kWidth - kRight)) + "\" y=\"" + num(kHeight - 14.0) +
           "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#333333\">" + label + "</text>\n";
}

void y_axis(std::string& out, const Mapper& my, const std::string& label, bool right,
            const char* color) {
    const double px = right ? kWidth - kRight : kLeft;
    for (double t : nice_ticks(my.lo, my.hi)) {
        const double py = my(t);
        if (!right)
            out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py) + "\" x2=\"" +
                   num(kWidth - kRight) + "\" y2=\"" + num(py) +
                   "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
        out += "<text x=\"" + num(right ? px + 8.0 : px - 8.0) + "\" y=\"" + num(py + 4.0) +
               "\" font-size=\"12\" text-anchor=\"" + (right ? "start" : "end") + "\" fill=\"" +
               color + "\">" + tick_label(t) + "</text>\n";
    }
    const double cx = right ? kWidth - 16.0 : 18.0;
    const double cy = 0.5 * (kTop + kHeight - kBottom);
    out += "<text x=\"" + num(cx) + "\" y=\"" + num(cy) + "\" font-size=\"13\" fill=\"" + color +
           "\" text-anchor=\"middle\" transform=\"rotate(" + (right ? "90" : "-90") + " " +
           num(cx) + " " + num(cy) + ")\">" + label + "</text>\n";
}

std::string open_svg() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(kWidth, "%.0f") +
           " " + num(kHeight, "%.0f") +
           "\" font-family=\"'DejaVu Sans Mono', 'Menlo', monospace\">\n";
}

// per-bin min/max band so dense fringes render as a filled band instead of a
// megabyte of invisible zigzag
void band(std::string& out, const std::vector<double>& xs, const std::vector<double>& ys,
          const Mapper& mx, const Mapper& my, std::size_t bins, const char* fill) {
    if (xs.size() < 2) return;
    const double lo = xs.front(), hi = xs.back();
    std::vector<double> bmin(bins, std::numeric_limits<double>::infinity());
    std::vector<double> bmax(bins, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::size_t b = static_cast<std::size_t>((xs[i] - lo) / (hi - lo) * (bins - 1) + 0.5);
        b = std::min(b, bins - 1);
        bmin[b] = std::min(bmin[b], ys[i]);
        bmax[b] = std::max(bmax[b], ys[i]);
    }
    std::string upper, lower;
    for (std::size_t b = 0; b < bins; ++b) {
        if (!(bmax[b] >= bmin[b])) continue;
        const double x = lo + (hi - lo) * static_cast<double>(b) / (bins - 1);
        upper += num(mx(x)) + "," + num(my(bmax[b])) + " ";
        lower = num(mx(x)) + "," + num(my(bmin[b])) + " " + lower;
    }
    out += "<polygon fill=\"" + std::string(fill) + "\" stroke=\"none\" points=\"" + upper +
           lower + "\"/>\n";
}

}  // namespace

std::string spectrum_svg(const JointSpectrum& js, const std::string& title) {
    const std::size_t n = js.grid.count;
    std::vector<double> wl(n);
    for (std::size_t i = 0; i < n; ++i)
        wl[i] = omega_to_wavelength_nm({js.omega0 + js.grid.detuning[i]});

    Mapper mx{*std::min_element(wl.begin(), wl.end()), *std::max_element(wl.begin(), wl.end()),
              kLeft, kWidth - kRight};
    Mapper my{0.0, 1.05, kHeight - kBottom, kTop};

    // delta range over the carrying part of the spectrum
    double dlo = 0.0, dhi = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (js.intensity[i] >= 0.01 && std::isfinite(js.delta[i])) {
            dlo = std::min(dlo, js.delta[i]);
            dhi = std::max(dhi, js.delta[i]);
        }
    const double pad = std::max(0.1, 0.1 * (dhi - dlo));
    Mapper md{dlo - pad, dhi + pad, kHeight - kBottom, kTop};

    // decimate the smooth curves for size
    const std::size_t stride = std::max<std::size_t>(1, n / 2048);
    std::vector<double> dx, di, dd;
    for (std::size_t i = 0; i < n; i += stride) {
        dx.push_back(wl[i]);
        di.push_back(js.intensity[i]);
        dd.push_back(js.intensity[i] >= 0.001 ? js.delta[i]
                                              : std::numeric_limits<double>::quiet_NaN());
    }

    std::string out = open_svg();
    frame_and_title(out, title);
    x_axis(out, mx, "wavelength (nm)");
    y_axis(out, my, "intensity (peak = 1)", false, "#1f5fa8");
    y_axis(out, md, "delta (rad)", true, "#b23b3b");
    polyline(out, dx, di, mx, my, "stroke=\"#1f5fa8\" stroke-width=\"1.6\"");
    polyline(out, dx, dd, mx, md, "stroke=\"#b23b3b\" stroke-width=\"1.4\" stroke-dasharray=\"5 3\"");
    out += "</svg>\n";
    return out;
}

std::string interferogram_svg(const Interferogram& ig, const std::string& title) {
    const std::size_t n = ig.delay_fs.size();
    Mapper mx{ig.delay_fs.front(), ig.delay_fs.back(), kLeft, kWidth - kRight};
    double rmax = 0.0;
    for (double r : ig.rate) rmax = std::max(rmax, r);
    Mapper my{0.0, 1.05 * rmax, kHeight - kBottom, kTop};

    std::string out = open_svg();
    frame_and_title(out, title);
    x_axis(out, mx, "relative group delay (fs)");
    y_axis(out, my, "coincidence rate (arb.)", false, "#333333");

    band(out, ig.delay_fs, ig.rate, mx, my, 1100, "#9db9d9");

    std::vector<double> upper(n), lower(n);
    for (std::size_t i = 0; i < n; ++i) {
        upper[i] = ig.constant + ig.envelope[i];
        lower[i] = ig.constant - ig.envelope[i];
    }
    const std::size_t stride = std::max<std::size_t>(1, n / 2048);
    std::vector<double> ex, eu, el;
    for (std::size_t i = 0; i < n; i += stride) {
        ex.push_back(ig.delay_fs[i]);
        eu.push_back(upper[i]);
        el.push_back(lower[i]);
    }
    polyline(out, ex, eu, mx, my, "stroke=\"#b23b3b\" stroke-width=\"1.4\"");
    polyline(out, ex, el, mx, my, "stroke=\"#b23b3b\" stroke-width=\"1.0\" stroke-dasharray=\"4 3\"");

    // fringe zoom inset around the envelope peak
    const double half = 3.0 * ig.nominal_fringe_period_fs;
    std::vector<double> zx, zy;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(ig.delay_fs[i] - ig.envelope_peak_fs) <= half) {
            zx.push_back(ig.delay_fs[i]);
            zy.push_back(ig.rate[i]);
        }
    if (zx.size() >= 8) {
        const double ix0 = kWidth - kRight - 300.0, iy0 = kTop + 14.0, iw = 286.0, ih = 150.0;
        out += "<rect x=\"" + num(ix0) + "\" y=\"" + num(iy0) + "\" width=\"" + num(iw) +
               "\" height=\"" + num(ih) +
               "\" fill=\"#ffffff\" stroke=\"#666666\" stroke-width=\"0.8\"/>\n";
        Mapper zmx{zx.front(), zx.back(), ix0 + 6.0, ix0 + iw - 6.0};
        Mapper zmy{0.0, 1.05 * rmax, iy0 + ih - 6.0, iy0 + 6.0};
        polyline(out, zx, zy, zmx, zmy, "stroke=\"#1f5fa8\" stroke-width=\"1.1\"");
        out += "<text x=\"" + num(ix0 + 8.0) + "\" y=\"" + num(iy0 + 16.0) +
               "\" font-size=\"11\" fill=\"#333333\">fringes at the envelope peak</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace spdckit::svg
