#include "dialnorm/semantics/plot.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>

namespace dialnorm::sem {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kMargin = 56;

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Scale {
    double lo, hi, out_lo, out_hi;
    double operator()(double v) const {
        const double span = hi - lo;
        const double t = span > 0 ? (v - lo) / span : 0.5;
        return out_lo + t * (out_hi - out_lo);
    }
};

Scale padded(double lo, double hi, double out_lo, double out_hi) {
    const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
    return {lo - pad, hi + pad, out_lo, out_hi};
}

std::string header() {
    return fmt::format(R"svg(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}" )svg"
                       R"svg(font-family="sans-serif" font-size="11">)svg"
                       "\n"
                       R"svg(<rect width="100%" height="100%" fill="white"/>)svg"
                       "\n"
                       R"svg(<rect x="{2}" y="{2}" width="{3}" height="{4}" fill="none" stroke="black"/>)svg"
                       "\n",
                       kWidth, kHeight, kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin);
}

}  // namespace

std::string scatter_svg(const Eigen::Matrix<double, Eigen::Dynamic, 2>& points, const std::vector<std::string>& names,
                        const std::vector<int>& groups, const std::string& title) {
    std::string out = header();
    out += fmt::format(R"svg(<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>)svg"
                       "\n",
                       kWidth / 2, kMargin / 2, escape(title));
    if (points.rows() == 0) return out + "</svg>\n";
    const Scale sx = padded(points.col(0).minCoeff(), points.col(0).maxCoeff(), kMargin, kWidth - kMargin);
    const Scale sy = padded(points.col(1).minCoeff(), points.col(1).maxCoeff(), kHeight - kMargin, kMargin);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const auto g = i < static_cast<Eigen::Index>(groups.size()) ? groups[static_cast<std::size_t>(i)] : 0;
        const char* colour = g < 0 ? "#999999" : kPalette[static_cast<std::size_t>(g) % kPalette.size()];
        const double x = sx(points(i, 0));
        const double y = sy(points(i, 1));
        out += fmt::format(R"svg(<circle cx="{:.2f}" cy="{:.2f}" r="4" fill="{}"/>)svg"
                           "\n",
                           x, y, colour);
        if (i < static_cast<Eigen::Index>(names.size())) {
            out += fmt::format(R"svg(<text x="{:.2f}" y="{:.2f}">{}</text>)svg"
                               "\n",
                               x + 6, y - 4, escape(names[static_cast<std::size_t>(i)]));
        }
    }
    out += fmt::format(R"svg(<text x="{}" y="{}" text-anchor="middle">PC1</text>)svg"
                       "\n"
                       R"svg(<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">PC2</text>)svg"
                       "\n",
                       kWidth / 2, kHeight - kMargin / 3, kMargin / 3, kHeight / 2, kMargin / 3, kHeight / 2);
    return out + "</svg>\n";
}

std::string line_svg(const std::vector<double>& x, const std::vector<double>& y, const std::string& x_label,
                     const std::string& y_label) {
    std::string out = header();
    const std::size_t n = std::min(x.size(), y.size());
    if (n > 0) {
        const auto [xlo, xhi] = std::minmax_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
        const auto [ylo, yhi] = std::minmax_element(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
        const Scale sx = padded(*xlo, *xhi, kMargin, kWidth - kMargin);
        const Scale sy = padded(*ylo, *yhi, kHeight - kMargin, kMargin);
        std::string pts;
        for (std::size_t i = 0; i < n; ++i) pts += fmt::format("{:.2f},{:.2f} ", sx(x[i]), sy(y[i]));
        out += fmt::format(R"svg(<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>)svg"
                           "\n",
                           pts, kPalette[0]);
        for (std::size_t i = 0; i < n; ++i) {
            out += fmt::format(R"svg(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}"/>)svg"
                               "\n"
                               R"svg(<text x="{:.2f}" y="{}" text-anchor="middle">{:g}</text>)svg"
                               "\n",
                               sx(x[i]), sy(y[i]), kPalette[0], sx(x[i]), kHeight - kMargin + 14, x[i]);
        }
    }
    out += fmt::format(R"svg(<text x="{}" y="{}" text-anchor="middle">{}</text>)svg"
                       "\n"
                       R"svg(<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>)svg"
                       "\n",
                       kWidth / 2, kHeight - kMargin / 4, escape(x_label), kMargin / 3, kHeight / 2, kMargin / 3,
                       kHeight / 2, escape(y_label));
    return out + "</svg>\n";
}

}  // namespace dialnorm::sem
