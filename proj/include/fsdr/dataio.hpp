#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fsdr/error.hpp"
#include "fsdr/kwire.hpp"
#include "fsdr/types.hpp"

namespace fsdr {

// ---------------------------------------------------------------------------
// CSV matrices
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view tok, std::size_t row) {
    double v = 0.0;
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || tok.empty())
        throw ParseError("row " + std::to_string(row) + ": cannot parse '" + std::string(tok) + "' as a number");
    return v;
}

}  // namespace detail

/// Headerless comma-separated real matrix. Blank lines are ignored.
inline Matrix read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        for (auto tok : detail::split_commas(line)) row.push_back(detail::parse_double(tok, lineno));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("row " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                             " fields, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path.string() + " is empty");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return m;
}

inline void write_csv_matrix(std::ostream& out, const Matrix& m) {
    char buf[32];
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            const int len = std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
            out.write(buf, len);
        }
        out << '\n';
    }
}

/// Writes every value with 17 significant digits, so reading back is exact.
inline void write_csv_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv_matrix(out, m);
    if (!out) throw IoError("write failed for " + path.string());
}

/// Loads a precomputed distance matrix, checking its invariants to 1e-9
/// and then repairing symmetry and the diagonal exactly.
inline DistanceMatrix read_distance_csv(const std::filesystem::path& path) {
    return DistanceMatrix::from_approximate(read_csv_matrix(path), 1e-9);
}

// ---------------------------------------------------------------------------
// Handwritten digits
// ---------------------------------------------------------------------------

/// An 8x8 optdigits image; pixel intensities are 0..16.
struct DigitImage {
    std::array<int, 64> pixels{};
    int label = 0;

    [[nodiscard]] int at(int row, int col) const { return pixels[static_cast<std::size_t>(row * 8 + col)]; }
};

enum class HalfOrientation { upper_as_x, lower_as_x };

struct HalfSplit {
    std::array<double, 32> x{};
    std::array<double, 32> y{};
    HalfOrientation orientation = HalfOrientation::upper_as_x;
};

/// Reads the UCI optdigits text format: 64 pixel values then the label per
/// line. Images whose label is not in `classes` are dropped; file order is
/// kept. An empty class set keeps everything.
inline std::vector<DigitImage> load_optdigits(const std::filesystem::path& path, const std::set<int>& classes = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<DigitImage> images;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto toks = detail::split_commas(line);
        if (toks.size() != 65)
            throw ParseError("line " + std::to_string(lineno) + ": expected 65 fields, found " +
                             std::to_string(toks.size()));
        DigitImage img;
        for (std::size_t i = 0; i < 65; ++i) {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(toks[i].data(), toks[i].data() + toks[i].size(), v);
            if (ec != std::errc() || ptr != toks[i].data() + toks[i].size() || toks[i].empty())
                throw ParseError("line " + std::to_string(lineno) + ": field " + std::to_string(i + 1) +
                                 " is not an integer");
            if (i < 64) {
                if (v < 0 || v > 16)
                    throw ValidationError("line " + std::to_string(lineno) + ": pixel " + std::to_string(i) +
                                          " out of range [0,16]");
                img.pixels[i] = v;
            } else {
                if (v < 0 || v > 9)
                    throw ValidationError("line " + std::to_string(lineno) + ": label out of range [0,9]");
                img.label = v;
            }
        }
        if (classes.empty() || classes.count(img.label)) images.push_back(img);
    }
    return images;
}

/// Rows 0-3 and rows 4-7 of the image, row-major, as X and Y (or swapped).
inline HalfSplit split_halves(const DigitImage& img, HalfOrientation orientation) {
    HalfSplit s;
    s.orientation = orientation;
    for (std::size_t i = 0; i < 32; ++i) {
        const double upper = img.pixels[i];
        const double lower = img.pixels[i + 32];
        s.x[i] = orientation == HalfOrientation::upper_as_x ? upper : lower;
        s.y[i] = orientation == HalfOrientation::upper_as_x ? lower : upper;
    }
    return s;
}

/// Stacks the split halves of a set of images into X (n x 32) and Y (n x 32).
inline std::pair<Matrix, Matrix> halves_matrices(const std::vector<DigitImage>& images, HalfOrientation orientation) {
    const auto n = static_cast<Index>(images.size());
    Matrix x(n, 32), y(n, 32);
    for (Index i = 0; i < n; ++i) {
        const auto s = split_halves(images[static_cast<std::size_t>(i)], orientation);
        for (Index j = 0; j < 32; ++j) {
            x(i, j) = s.x[static_cast<std::size_t>(j)];
            y(i, j) = s.y[static_cast<std::size_t>(j)];
        }
    }
    return {x, y};
}

// ---------------------------------------------------------------------------
// Scatter plots
// ---------------------------------------------------------------------------

/// Standalone SVG scatter plot of the first two columns of `points`,
/// colored by label in order of first appearance of each distinct label
/// (sorted ascending): red, green, blue, then cycling.
inline std::string scatter_svg(const Matrix& points, const std::vector<int>& labels) {
    if (points.rows() < 1) throw ValidationError("scatter plot needs at least one point");
    if (points.cols() < 2) throw DimensionError("scatter plot needs two columns");
    if (static_cast<Index>(labels.size()) != points.rows()) throw DimensionError("one label per point required");

    static constexpr std::array<const char*, 6> palette{"#d62728", "#2ca02c", "#1f77b4",
                                                        "#ff7f0e", "#9467bd", "#8c564b"};
    std::vector<int> distinct(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    auto color_of = [&](int label) {
        const auto pos = std::lower_bound(distinct.begin(), distinct.end(), label) - distinct.begin();
        return palette[static_cast<std::size_t>(pos) % palette.size()];
    };

    auto axis = [](const auto& col) {
        double lo = col.minCoeff(), hi = col.maxCoeff();
        double span = hi - lo;
        if (!(span > 0.0)) span = std::max(1.0, std::abs(lo));
        const double mid = 0.5 * (lo + hi);
        return std::pair{mid - 0.55 * span, mid + 0.55 * span};  // 5% margin per side
    };
    const auto [x0, x1] = axis(points.col(0));
    const auto [y0, y1] = axis(points.col(1));

    constexpr double size = 480.0;
    constexpr double pad = 40.0;
    auto sx = [&](double v) { return pad + (v - x0) / (x1 - x0) * size; };
    auto sy = [&](double v) { return pad + size - (v - y0) / (y1 - y0) * size; };

    std::ostringstream svg;
    char buf[160];
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"560\" viewBox=\"0 0 560 560\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"560\" height=\"560\" fill=\"white\"/>\n";
    svg << "<rect x=\"40\" y=\"40\" width=\"480\" height=\"480\" fill=\"none\" stroke=\"black\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"40\" y=\"536\" font-size=\"11\">%.4g</text>\n", x0);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"520\" y=\"536\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n", x1);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"36\" y=\"520\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n", y0);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"36\" y=\"48\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n", y1);
    svg << buf;
    for (Index i = 0; i < points.rows(); ++i) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2.5\" fill=\"%s\" fill-opacity=\"0.7\"/>\n",
                      sx(points(i, 0)), sy(points(i, 1)), color_of(labels[static_cast<std::size_t>(i)]));
        svg << buf;
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void emit_scatter_svg(const Matrix& points, const std::vector<int>& labels, const std::filesystem::path& path) {
    const std::string text = scatter_svg(points, labels);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Kernel fit bundles
// ---------------------------------------------------------------------------

/// Writes a kernel fit as CSV files under `dir` so it can be reloaded by
/// another process: alpha, gamma, eigenvalues, x_train, kernel_col_means,
/// and params (sigma_kappa, epsilon_n, d).
inline void save_kwire_fit(const KwireFit& fit, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_csv_matrix(dir / "alpha.csv", fit.alpha);
    write_csv_matrix(dir / "gamma.csv", fit.gamma);
    write_csv_matrix(dir / "eigenvalues.csv", fit.eigenvalues);
    write_csv_matrix(dir / "x_train.csv", fit.x_train);
    write_csv_matrix(dir / "kernel_col_means.csv", fit.kernel_col_means);
    Matrix params(1, 3);
    params << fit.kernel.sigma_kappa, fit.epsilon_n, fit.d;
    write_csv_matrix(dir / "params.csv", params);
}

inline KwireFit load_kwire_fit(const std::filesystem::path& dir) {
    KwireFit fit;
    fit.alpha = read_csv_matrix(dir / "alpha.csv");
    fit.gamma = read_csv_matrix(dir / "gamma.csv");
    fit.eigenvalues = read_csv_matrix(dir / "eigenvalues.csv").col(0);
    fit.x_train = read_csv_matrix(dir / "x_train.csv");
    fit.kernel_col_means = read_csv_matrix(dir / "kernel_col_means.csv").col(0);
    const Matrix params = read_csv_matrix(dir / "params.csv");
    if (params.cols() != 3) throw ParseError("params.csv must hold sigma_kappa,epsilon_n,d");
    fit.kernel.sigma_kappa = params(0, 0);
    fit.epsilon_n = params(0, 1);
    fit.d = static_cast<int>(params(0, 2));
    fit.kernel.validate();
    if (fit.alpha.rows() != fit.x_train.rows() || fit.alpha.cols() != fit.d)
        throw ValidationError("kernel fit bundle has inconsistent shapes");
    return fit;
}

}  // namespace fsdr
