#include "fmd/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "fmd/errors.hpp"
#include "text_util.hpp"

namespace fmd {

using detail::fmt17;
using detail::split_ws;

namespace {

constexpr const char* kMagic = "# FMDREPORT1";

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field += ch;
        }
    }
    out.push_back(field);
    return out;
}

void save_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IOError("failed writing '" + path + "'");
}

}  // namespace

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
    out << kMagic << '\n';
    out << "# version " << report.version << '\n';
    out << "# config_hash " << hex32(report.config_hash) << '\n';
    out << "kind,length,zeta,mean_fmd,std_fmd,reps\n";
    for (const ReportCell& cell : report.cells) {
        out << to_string(cell.kind) << ',' << cell.length << ',' << fmt17(cell.zeta) << ','
            << fmt17(cell.mean_fmd) << ',' << fmt17(cell.std_fmd) << ',' << cell.reps << '\n';
    }
}

void save_report_csv(const ExperimentReport& report, const std::string& path) {
    std::ostringstream buf;
    write_report_csv(report, buf);
    save_text(buf.str(), path);
}

ExperimentReport read_report_csv(std::istream& in) {
    ExperimentReport report;
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line) || detail::trim(line) != kMagic) {
        throw ParseError(1, "missing FMDREPORT1 magic line");
    }
    ++lineno;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = detail::trim(line);
        if (stripped.empty()) continue;
        if (stripped[0] == '#') {
            const auto tokens = split_ws(stripped.substr(1));
            if (tokens.size() == 2 && tokens[0] == "version") report.version = tokens[1];
            if (tokens.size() == 2 && tokens[0] == "config_hash") {
                report.config_hash =
                    static_cast<std::uint32_t>(std::strtoul(tokens[1].c_str(), nullptr, 16));
            }
            continue;
        }
        if (!saw_header) {
            if (stripped != "kind,length,zeta,mean_fmd,std_fmd,reps") {
                throw ParseError(lineno, "unexpected CSV header '" + stripped + "'");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split_csv(stripped);
        if (fields.size() != 6) {
            throw ParseError(lineno, "expected 6 CSV fields, got " +
                                         std::to_string(fields.size()));
        }
        ReportCell cell;
        cell.kind = noise_kind_from_string(fields[0]);
        cell.length = static_cast<int>(detail::parse_int(fields[1], lineno));
        cell.zeta = detail::parse_double(fields[2], lineno);
        cell.mean_fmd = detail::parse_double(fields[3], lineno);
        cell.std_fmd = detail::parse_double(fields[4], lineno);
        cell.reps = static_cast<int>(detail::parse_int(fields[5], lineno));
        report.cells.push_back(cell);
    }
    if (!saw_header) throw ParseError(lineno, "report has no data header");
    return report;
}

ExperimentReport load_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open '" + path + "' for reading");
    return read_report_csv(in);
}

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::json doc;
    doc["version"] = report.version;
    doc["config_hash"] = hex32(report.config_hash);
    doc["cells"] = nlohmann::json::array();
    for (const ReportCell& cell : report.cells) {
        doc["cells"].push_back({{"kind", to_string(cell.kind)},
                                {"length", cell.length},
                                {"zeta", cell.zeta},
                                {"mean_fmd", cell.mean_fmd},
                                {"std_fmd", cell.std_fmd},
                                {"reps", cell.reps}});
    }
    return doc.dump(2) + "\n";
}

void save_report_json(const ExperimentReport& report, const std::string& path) {
    save_text(report_to_json(report), path);
}

namespace {

struct Series {
    int length;
    std::vector<const ReportCell*> points;  // sorted by zeta
};

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

const char* series_color(std::size_t index) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b"};
    return palette[index % 6];
}

}  // namespace

std::string report_to_svg(const ExperimentReport& report) {
    if (report.cells.empty()) throw ValidationError("cannot plot an empty report");

    // Group cells: panel per kind, one series per length.
    std::map<NoiseKind, std::map<int, std::vector<const ReportCell*>>> panels;
    for (const ReportCell& cell : report.cells) {
        panels[cell.kind][cell.length].push_back(&cell);
    }
    for (auto& [kind, by_length] : panels) {
        for (auto& [length, points] : by_length) {
            std::sort(points.begin(), points.end(),
                      [](const ReportCell* a, const ReportCell* b) { return a->zeta < b->zeta; });
        }
    }

    const double panel_w = 360, panel_h = 280;
    const double margin_l = 64, margin_r = 16, margin_t = 40, margin_b = 48;
    const double gap = 24;
    const std::size_t n_panels = panels.size();
    const double total_w = n_panels * (panel_w + margin_l + margin_r) + (n_panels - 1) * gap;
    const double total_h = panel_h + margin_t + margin_b;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(total_w)
        << "\" height=\"" << coord(total_h) << "\" viewBox=\"0 0 " << coord(total_w) << ' '
        << coord(total_h) << "\">\n";
    svg << "<style>text{font-family:sans-serif;font-size:12px;}</style>\n";

    std::size_t panel_index = 0;
    for (const auto& [kind, by_length] : panels) {
        const double ox = panel_index * (panel_w + margin_l + margin_r + gap) + margin_l;
        const double oy = margin_t;

        double zeta_min = 0, zeta_max = 0, y_max = 0;
        bool first = true;
        for (const auto& [length, points] : by_length) {
            for (const ReportCell* p : points) {
                if (first) {
                    zeta_min = zeta_max = p->zeta;
                    first = false;
                } else {
                    zeta_min = std::min(zeta_min, p->zeta);
                    zeta_max = std::max(zeta_max, p->zeta);
                }
                y_max = std::max(y_max, p->mean_fmd + p->std_fmd);
            }
        }
        if (zeta_max <= zeta_min) zeta_max = zeta_min + 1.0;
        if (y_max <= 0.0) y_max = 1.0;
        y_max *= 1.05;

        auto x_of = [&](double zeta) {
            return ox + (zeta - zeta_min) / (zeta_max - zeta_min) * panel_w;
        };
        auto y_of = [&](double v) { return oy + panel_h - std::max(0.0, v) / y_max * panel_h; };

        svg << "<g class=\"panel\" id=\"panel-" << to_string(kind) << "\">\n";
        svg << "<text x=\"" << coord(ox + panel_w / 2) << "\" y=\"" << coord(oy - 16)
            << "\" text-anchor=\"middle\" font-weight=\"bold\">" << to_string(kind)
            << " noise</text>\n";
        // Axes.
        svg << "<line x1=\"" << coord(ox) << "\" y1=\"" << coord(oy + panel_h) << "\" x2=\""
            << coord(ox + panel_w) << "\" y2=\"" << coord(oy + panel_h)
            << "\" stroke=\"#333\"/>\n";
        svg << "<line x1=\"" << coord(ox) << "\" y1=\"" << coord(oy) << "\" x2=\"" << coord(ox)
            << "\" y2=\"" << coord(oy + panel_h) << "\" stroke=\"#333\"/>\n";
        // Y ticks at 0, half, max.
        for (double frac : {0.0, 0.5, 1.0}) {
            const double v = y_max * frac;
            svg << "<text x=\"" << coord(ox - 6) << "\" y=\"" << coord(y_of(v) + 4)
                << "\" text-anchor=\"end\">" << label(v) << "</text>\n";
        }
        // X ticks at every zeta of the densest series.
        std::vector<double> ticks;
        for (const auto& [length, points] : by_length) {
            if (points.size() > ticks.size()) {
                ticks.clear();
                for (const ReportCell* p : points) ticks.push_back(p->zeta);
            }
        }
        for (double z : ticks) {
            svg << "<text x=\"" << coord(x_of(z)) << "\" y=\"" << coord(oy + panel_h + 16)
                << "\" text-anchor=\"middle\">" << label(z) << "</text>\n";
        }
        svg << "<text x=\"" << coord(ox + panel_w / 2) << "\" y=\""
            << coord(oy + panel_h + 34) << "\" text-anchor=\"middle\">zeta</text>\n";

        std::size_t series_index = 0;
        for (const auto& [length, points] : by_length) {
            const char* color = series_color(series_index);
            // +-1 std band behind the mean line.
            std::ostringstream band;
            for (const ReportCell* p : points) {
                band << coord(x_of(p->zeta)) << ',' << coord(y_of(p->mean_fmd + p->std_fmd)) << ' ';
            }
            for (auto it = points.rbegin(); it != points.rend(); ++it) {
                band << coord(x_of((*it)->zeta)) << ',' << coord(y_of((*it)->mean_fmd - (*it)->std_fmd))
                     << ' ';
            }
            svg << "<polygon class=\"band\" points=\"" << band.str() << "\" fill=\"" << color
                << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";

            std::ostringstream line;
            for (const ReportCell* p : points) {
                line << coord(x_of(p->zeta)) << ',' << coord(y_of(p->mean_fmd)) << ' ';
            }
            svg << "<polyline class=\"mean\" points=\"" << line.str() << "\" fill=\"none\" stroke=\""
                << color << "\" stroke-width=\"1.5\"/>\n";
            svg << "<text x=\"" << coord(ox + panel_w - 8) << "\" y=\""
                << coord(oy + 14 + 16 * series_index) << "\" text-anchor=\"end\" fill=\"" << color
                << "\">L=" << length << "</text>\n";
            ++series_index;
        }
        svg << "</g>\n";
        ++panel_index;
    }
    svg << "</svg>\n";
    return svg.str();
}

void save_report_svg(const ExperimentReport& report, const std::string& path) {
    save_text(report_to_svg(report), path);
}

}  // namespace fmd
