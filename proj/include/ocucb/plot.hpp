#pragma once

// Static SVG regret plots from summary CSVs, with optional envelope overlays.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocucb/config.hpp"
#include "ocucb/difficulty.hpp"
#include "ocucb/report.hpp"

namespace ocucb {

struct PlotSeries {
    std::string name;
    std::filesystem::path source;
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> value;
    std::vector<double> band_low;
    std::vector<double> band_high;
    bool envelope = false;
};

struct PlotOptions {
    std::optional<std::vector<double>> envelope_means;
    double upper_constant = 1.0;
    IndexParams params;
};

/// "K:gap" (one arm at 0, K-1 at -gap) or a comma-separated list of means.
inline std::vector<double> parse_means_spec(std::string_view spec)
{
    const auto colon = spec.find(':');
    auto number = [&](std::string_view s) {
        s = detail::trim(s);
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
            throw std::invalid_argument("bad number '" + std::string(s) + "' in means spec");
        }
        return x;
    };
    std::vector<double> means;
    if (colon != std::string_view::npos) {
        const double k = number(spec.substr(0, colon));
        const double gap = number(spec.substr(colon + 1));
        if (k < 2 || k != std::floor(k)) throw std::invalid_argument("means spec K:gap needs an integer K >= 2");
        means.assign(static_cast<std::size_t>(k), -gap);
        means[0] = 0.0;
    } else {
        for (auto item : detail::split_list(spec)) means.push_back(number(item));
    }
    if (means.size() < 2) throw std::invalid_argument("means spec needs at least 2 arms");
    return means;
}

/// Reads the AGG rows of a summary CSV, one series per policy in file order.
inline std::vector<PlotSeries> read_summary_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRegretCsvHeader) throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
    std::vector<PlotSeries> out;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_list(line);
        const std::string where = path.string() + ":" + std::to_string(number);
        if (fields.size() != 5) throw std::runtime_error(where + ": expected 5 columns");
        if (fields[1] != "AGG") continue;
        std::uint64_t t = 0;
        double mean = 0.0;
        double se = 0.0;
        auto parse = [&](std::string_view s, auto& v) {
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                throw std::runtime_error(where + ": cannot parse '" + std::string(s) + "'");
            }
        };
        parse(fields[2], t);
        parse(fields[3], mean);
        parse(fields[4], se);
        if (out.empty() || out.back().name != fields[0]) {
            for (const auto& s : out) {
                if (s.name == fields[0]) throw std::runtime_error(where + ": rows of policy " + s.name + " are not contiguous");
            }
            out.push_back({std::string(fields[0]), path, {}, {}, {}, {}, false});
        }
        auto& s = out.back();
        if (!s.checkpoints.empty() && t <= s.checkpoints.back()) {
            throw std::runtime_error(where + ": checkpoints must increase");
        }
        s.checkpoints.push_back(t);
        s.value.push_back(mean);
        s.band_low.push_back(mean - se);
        s.band_high.push_back(mean + se);
    }
    if (out.empty()) throw std::runtime_error(path.string() + ": empty CSV (no AGG rows)");
    return out;
}

/// Policy series from every file plus envelope curves, all on one checkpoint grid.
inline std::vector<PlotSeries> collect_plot_series(const std::vector<std::filesystem::path>& paths,
                                                   const PlotOptions& options)
{
    if (paths.empty()) throw std::invalid_argument("no summary CSV given");
    std::vector<PlotSeries> series;
    for (const auto& path : paths) {
        auto part = read_summary_csv(path);
        for (auto& s : part) {
            if (!series.empty() && s.checkpoints != series.front().checkpoints) {
                throw std::runtime_error("checkpoint grids differ between " + series.front().source.string() +
                                         " and " + s.source.string());
            }
            for (const auto& existing : series) {
                if (existing.name == s.name) {
                    throw std::runtime_error("policy " + s.name + " appears in both " + existing.source.string() +
                                             " and " + s.source.string());
                }
            }
            series.push_back(std::move(s));
        }
    }
    if (options.envelope_means) {
        PlotSeries upper{"upper_envelope", {}, {}, {}, {}, {}, true};
        PlotSeries lower{"lower_envelope", {}, {}, {}, {}, {}, true};
        for (std::uint64_t t : series.front().checkpoints) {
            if (t < 2) continue;
            const double u = theorem1_upper(*options.envelope_means, t, options.params, options.upper_constant).total;
            const double l = appendixA_lower(*options.envelope_means, t).total;
            for (auto* s : {&upper, &lower}) s->checkpoints.push_back(t);
            upper.value.push_back(u);
            lower.value.push_back(l);
        }
        upper.band_low = upper.band_high = upper.value;
        lower.band_low = lower.band_high = lower.value;
        series.push_back(std::move(upper));
        series.push_back(std::move(lower));
    }
    return series;
}

inline void write_plotted_csv(std::ostream& out, const std::vector<PlotSeries>& series)
{
    out << "series,checkpoint_t,value,band_low,band_high\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
            out << s.name << ',' << s.checkpoints[i] << ',' << format_double(s.value[i]) << ','
                << format_double(s.band_low[i]) << ',' << format_double(s.band_high[i]) << '\n';
        }
    }
}

inline void write_svg(std::ostream& out, const std::vector<PlotSeries>& series)
{
    constexpr double width = 800;
    constexpr double height = 500;
    constexpr double left = 80;
    constexpr double right = 200;
    constexpr double top = 30;
    constexpr double bottom = 60;
    static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

    double t_min = INFINITY;
    double t_max = -INFINITY;
    double y_max = 0.0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
            t_min = std::min(t_min, static_cast<double>(s.checkpoints[i]));
            t_max = std::max(t_max, static_cast<double>(s.checkpoints[i]));
            y_max = std::max(y_max, s.band_high[i]);
        }
    }
    const bool log_x = t_min >= 1.0 && t_max / t_min >= 100.0;
    auto fx = [&](double t) { return log_x ? std::log10(t) : t; };
    double x0 = fx(t_min);
    double x1 = fx(t_max);
    if (x1 == x0) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if (!(y_max > 0.0)) y_max = 1.0;
    y_max *= 1.05;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto px = [&](double t) { return left + (fx(t) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - std::clamp(y / y_max, 0.0, 1.0) * ph; };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double y = y_max * k / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
            << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double x = x0 + (x1 - x0) * k / 4.0;
        const double t = log_x ? std::pow(10.0, x) : x;
        char label[32];
        std::snprintf(label, sizeof label, "%.3g", t);
        out << "<text x=\"" << num(left + pw * k / 4.0) << "\" y=\"" << top + ph + 18
            << "\" text-anchor=\"middle\">" << label << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">round n"
        << (log_x ? " (log scale)" : "") << "</text>\n";
    out << "<text transform=\"translate(20," << top + ph / 2
        << ") rotate(-90)\" text-anchor=\"middle\">cumulative pseudo-regret</text>\n";

    std::size_t color = 0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::string stroke = s.envelope ? "#555555" : palette[color++ % std::size(palette)];
        out << "<g id=\"series-" << s.name << "\">\n";
        if (!s.envelope && s.checkpoints.size() > 1) {
            out << "<polygon fill=\"" << stroke << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
                out << num(px(s.checkpoints[i])) << ',' << num(py(s.band_high[i])) << ' ';
            }
            for (std::size_t i = s.checkpoints.size(); i-- > 0;) {
                out << num(px(s.checkpoints[i])) << ',' << num(py(s.band_low[i])) << ' ';
            }
            out << "\"/>\n";
        }
        if (s.checkpoints.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\""
                << (s.envelope ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
            for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
                out << num(px(s.checkpoints[i])) << ',' << num(py(s.value[i])) << ' ';
            }
            out << "\"/>\n";
        }
        if (!s.envelope) {
            for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
                const double x = px(s.checkpoints[i]);
                out << "<line x1=\"" << num(x) << "\" y1=\"" << num(py(s.band_low[i])) << "\" x2=\"" << num(x)
                    << "\" y2=\"" << num(py(s.band_high[i])) << "\" stroke=\"" << stroke << "\"/>\n";
                out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(py(s.value[i])) << "\" r=\"2.5\" fill=\""
                    << stroke << "\"/>\n";
            }
        }
        out << "</g>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        const double lx = left + pw + 15;
        out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 20 << "\" y2=\"" << ly
            << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"" << (s.envelope ? " stroke-dasharray=\"6,4\"" : "")
            << "/>\n";
        out << "<text class=\"legend\" x=\"" << lx + 26 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
}

/// Writes the SVG and, next to it, <stem>.plotted.csv with the plotted values.
/// Nothing is written if any input fails to load.
inline std::filesystem::path plot(const std::vector<std::filesystem::path>& summaries,
                                  const std::filesystem::path& svg_path, const PlotOptions& options = {})
{
    const auto series = collect_plot_series(summaries, options);
    auto csv_path = svg_path;
    csv_path.replace_extension(".plotted.csv");
    detail::write_file(svg_path, [&](std::ostream& o) { write_svg(o, series); });
    detail::write_file(csv_path, [&](std::ostream& o) { write_plotted_csv(o, series); });
    return csv_path;
}

}  // namespace ocucb
