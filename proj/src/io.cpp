#include "lpflow/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lpflow/errors.hpp"
#include "lpflow/fft.hpp"

namespace lpflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary field files are little-endian float64");

[[noreturn]] void fail(const std::string& msg) { throw IoError("io: " + msg); }

std::ofstream open_out(const fs::path& path, bool binary = false) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) fail("cannot create directory " + path.parent_path().string());
    }
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) fail("cannot open " + path.string() + " for writing");
    return os;
}

json load_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) fail("cannot open " + path.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        fail("malformed JSON in " + path.string() + ": " + e.what());
    }
}

/// Quote a CSV cell only when it needs it.
std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += '"';
    return out;
}

/// JSON value for a double; non-finite values map to null.
json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct FieldHeader {
    int dim = 0;
    std::array<int, 3> sizes{1, 1, 1};
    std::array<double, 3> periods{1.0, 1.0, 1.0};
    int components = 0;
    FieldStorage storage = FieldStorage::binary;
    fs::path data;
};

const char* storage_name(FieldStorage s) { return s == FieldStorage::binary ? "binary" : "csv"; }

FieldHeader parse_field_header(const fs::path& header_path) {
    const json j = load_json(header_path);
    const std::string where = header_path.string();
    try {
        if (j.at("format").get<std::string>() != "lpflow-field")
            fail(where + ": not a field header");
        if (j.at("version").get<int>() != 1) fail(where + ": unsupported version");
        FieldHeader h;
        h.dim = j.at("dim").get<int>();
        if (h.dim != 2 && h.dim != 3) fail(where + ": dim must be 2 or 3");
        const auto sizes = j.at("sizes").get<std::vector<int>>();
        const auto periods = j.at("periods").get<std::vector<double>>();
        if (static_cast<int>(sizes.size()) != h.dim || static_cast<int>(periods.size()) != h.dim)
            fail(where + ": sizes/periods must list one entry per dimension");
        for (int a = 0; a < h.dim; ++a) {
            h.sizes[a] = sizes[a];
            h.periods[a] = periods[a];
        }
        h.components = j.at("components").get<int>();
        if (h.components < 1) fail(where + ": components must be positive");
        const std::string st = j.at("storage").get<std::string>();
        if (st == "binary") h.storage = FieldStorage::binary;
        else if (st == "csv") h.storage = FieldStorage::csv;
        else fail(where + ": unknown storage '" + st + "'");
        h.data = j.at("data").get<std::string>();
        return h;
    } catch (const json::exception& e) {
        fail(where + ": " + e.what());
    }
}

}  // namespace

std::string format_full(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_field(const fs::path& stem, const RealField& f, FieldStorage storage) {
    const TorusGrid& g = f.grid();
    const std::string data_name =
        stem.filename().string() + (storage == FieldStorage::binary ? ".bin" : ".csv");

    json header;
    header["format"] = "lpflow-field";
    header["version"] = 1;
    header["dim"] = g.dim();
    json sizes = json::array(), periods = json::array();
    for (int a = 0; a < g.dim(); ++a) {
        sizes.push_back(g.size(a));
        periods.push_back(g.period(a));
    }
    header["sizes"] = sizes;
    header["periods"] = periods;
    header["components"] = f.components();
    header["storage"] = storage_name(storage);
    header["data"] = data_name;

    {
        auto os = open_out(fs::path(stem.string() + ".json"));
        os << header.dump(2) << '\n';
        if (!os) fail("failed writing " + stem.string() + ".json");
    }

    const fs::path data_path = stem.parent_path() / data_name;
    if (storage == FieldStorage::binary) {
        auto os = open_out(data_path, true);
        // Column-major (points x components) storage is exactly the
        // component-blocked flatten-order layout of the file format.
        os.write(reinterpret_cast<const char*>(f.data().data()),
                 static_cast<std::streamsize>(sizeof(double) * f.data().size()));
        if (!os) fail("failed writing " + data_path.string());
    } else {
        auto os = open_out(data_path);
        for (std::int64_t idx = 0; idx < g.points(); ++idx) {
            for (int c = 0; c < f.components(); ++c) {
                if (c) os << ',';
                os << format_full(f(idx, c));
            }
            os << '\n';
        }
        if (!os) fail("failed writing " + data_path.string());
    }
}

void write_field(const fs::path& stem, const SpectralField& f, FieldStorage storage) {
    write_field(stem, inverse_transform(f), storage);
}

RealField read_field(const fs::path& stem) {
    const FieldHeader h = parse_field_header(fs::path(stem.string() + ".json"));
    TorusGrid grid = [&] {
        try {
            return TorusGrid(h.dim, h.sizes, h.periods);
        } catch (const Error& e) {
            fail(stem.string() + ".json: " + e.what());
        }
    }();
    RealField f(grid, h.components);

    const fs::path data_path = stem.parent_path() / h.data;
    if (h.storage == FieldStorage::binary) {
        std::ifstream is(data_path, std::ios::binary);
        if (!is) fail("cannot open " + data_path.string());
        const std::streamsize bytes =
            static_cast<std::streamsize>(sizeof(double) * f.data().size());
        is.read(reinterpret_cast<char*>(f.data().data()), bytes);
        if (is.gcount() != bytes) fail(data_path.string() + ": truncated data");
        if (is.peek() != std::ifstream::traits_type::eof())
            fail(data_path.string() + ": trailing data beyond header extent");
    } else {
        std::ifstream is(data_path);
        if (!is) fail("cannot open " + data_path.string());
        std::string line;
        std::int64_t row = 0;
        while (std::getline(is, line)) {
            if (line.empty() && is.peek() == std::ifstream::traits_type::eof()) break;
            if (row >= grid.points()) fail(data_path.string() + ": more rows than grid points");
            const char* p = line.data();
            const char* end = line.data() + line.size();
            for (int c = 0; c < h.components; ++c) {
                double v = 0.0;
                const auto res = std::from_chars(p, end, v);
                if (res.ec != std::errc{})
                    fail(data_path.string() + ": bad number at row " + std::to_string(row));
                p = res.ptr;
                f.data()(row, c) = v;
                if (c + 1 < h.components) {
                    if (p == end || *p != ',')
                        fail(data_path.string() + ": missing column at row " + std::to_string(row));
                    ++p;
                }
            }
            if (p != end) fail(data_path.string() + ": extra columns at row " + std::to_string(row));
            ++row;
        }
        if (row != grid.points())
            fail(data_path.string() + ": expected " + std::to_string(grid.points()) +
                 " rows, found " + std::to_string(row));
    }
    return f;
}

void write_reports_csv(const fs::path& path, const std::vector<InequalityReport>& reports) {
    auto os = open_out(path);
    os << "sample_id,law_id,s,p,r,lhs,rhs,ratio,resolution\n";
    for (const InequalityReport& rep : reports) {
        os << csv_cell(rep.sample_id) << ',' << csv_cell(rep.law_id) << ','
           << format_full(rep.s) << ',' << format_full(rep.p) << ',' << format_full(rep.r) << ','
           << format_full(rep.lhs) << ',' << format_full(rep.rhs) << ','
           << format_full(rep.ratio()) << ',' << rep.resolution << '\n';
    }
    if (!os) fail("failed writing " + path.string());
}

void write_solver_log_csv(const fs::path& path, const std::vector<EllipticLogRow>& log) {
    auto os = open_out(path);
    os << "iter,residual,contraction_estimate\n";
    for (const EllipticLogRow& row : log)
        os << row.iter << ',' << format_full(row.residual) << ','
           << format_full(row.contraction) << '\n';
    if (!os) fail("failed writing " + path.string());
}

void write_suite_summary(const fs::path& path, const SuiteResult& result) {
    json laws = json::object();
    for (const LawSummary& sum : result.summaries) {
        json entry;
        json c_emp = json::array();
        for (double c : sum.c_emp) c_emp.push_back(json_number(c));
        entry["c_emp"] = c_emp;
        entry["stability"] = json_number(sum.stability);
        entry["stability_checked"] = sum.stability_checked;
        entry["ceiling"] = json_number(sum.ceiling);
        entry["samples"] = sum.samples;
        entry["degenerate"] = sum.degenerate;
        entry["invalid"] = sum.invalid;
        entry["passed"] = sum.passed;
        entry["verdict"] = sum.verdict();
        laws[sum.law] = entry;
    }
    json j;
    j["format"] = "lpflow-suite-summary";
    j["version"] = 1;
    j["passed"] = result.passed;
    j["report_count"] = result.reports.size();
    j["laws"] = laws;

    auto os = open_out(path);
    os << j.dump(2) << '\n';
    if (!os) fail("failed writing " + path.string());
}

void write_energy_csv(const fs::path& path, const std::vector<EnergySample>& energy) {
    auto os = open_out(path);
    os << "t,kinetic,dissipation,residual\n";
    for (const EnergySample& e : energy)
        os << format_full(e.t) << ',' << format_full(e.kinetic) << ','
           << format_full(e.dissipation) << ',' << format_full(e.residual) << '\n';
    if (!os) fail("failed writing " + path.string());
}

void write_monitors_csv(const fs::path& path, const RunResult& result,
                        const std::vector<std::pair<double, double>>& besov_indices) {
    if (!result.monitor) fail("monitors: run was not configured with a monitor");
    const BootstrapMonitor& mon = *result.monitor;
    const int n = mon.samples();
    if (static_cast<int>(result.hypothesis_history.size()) != n)
        fail("monitors: hypothesis history does not match monitor samples");

    auto os = open_out(path);
    os << "t,kinetic,dissipation,energy_residual";
    if (n > 0)
        for (const HypothesisStatus& h : result.hypothesis_history.front())
            os << ",margin_" << csv_cell(h.name);
    for (const auto& [s, r] : besov_indices) {
        const std::string tag = "_b" + format_full(s) + "_" + format_full(r);
        os << ",density" << tag << ",stokes" << tag << ",perturbation" << tag;
    }
    os << '\n';

    std::size_t e = 0;  // nearest energy sample, advanced monotonically
    for (int i = 0; i < n; ++i) {
        const double t = mon.time(i);
        double kin = 0.0, dis = 0.0, res = 0.0;
        if (!result.energy.empty()) {
            while (e + 1 < result.energy.size() &&
                   std::abs(result.energy[e + 1].t - t) <= std::abs(result.energy[e].t - t))
                ++e;
            kin = result.energy[e].kinetic;
            dis = result.energy[e].dissipation;
            res = result.energy[e].residual;
        }
        os << format_full(t) << ',' << format_full(kin) << ',' << format_full(dis) << ','
           << format_full(res);
        const auto& hyps = result.hypothesis_history[static_cast<std::size_t>(i)];
        if (hyps.size() != result.hypothesis_history.front().size())
            fail("monitors: hypothesis rows change shape mid-run");
        for (const HypothesisStatus& h : hyps) os << ',' << format_full(h.margin());
        for (const auto& [s, r] : besov_indices)
            os << ',' << format_full(mon.density_besov(i, s, r)) << ','
               << format_full(mon.stokes_besov(i, s, r)) << ','
               << format_full(mon.perturbation_besov(i, s, r));
        os << '\n';
    }
    if (!os) fail("failed writing " + path.string());
}

void write_trajectory(const fs::path& dir, const std::vector<Snapshot>& snapshots, double dt,
                      FieldStorage storage) {
    if (snapshots.empty()) fail("trajectory: no snapshots to store");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail("cannot create directory " + dir.string());

    const TorusGrid& g = snapshots.front().a.grid();
    json frames = json::array(), times = json::array();
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const Snapshot& snap = snapshots[i];
        require_same_grid(snap.a.grid(), g);
        require_same_grid(snap.u.grid(), g);
        char a_stem[16], u_stem[16];
        std::snprintf(a_stem, sizeof a_stem, "a_%04zu", i);
        std::snprintf(u_stem, sizeof u_stem, "u_%04zu", i);
        write_field(dir / a_stem, snap.a, storage);
        write_field(dir / u_stem, snap.u, storage);
        times.push_back(snap.t);
        frames.push_back(json{{"t", snap.t}, {"density", a_stem}, {"velocity", u_stem}});
    }

    json manifest;
    manifest["format"] = "lpflow-trajectory";
    manifest["version"] = 1;
    manifest["dt"] = dt;
    manifest["dim"] = g.dim();
    json sizes = json::array(), periods = json::array();
    for (int a = 0; a < g.dim(); ++a) {
        sizes.push_back(g.size(a));
        periods.push_back(g.period(a));
    }
    manifest["sizes"] = sizes;
    manifest["periods"] = periods;
    manifest["resolution"] = g.size(0);
    manifest["storage"] = storage_name(storage);
    manifest["times"] = times;
    manifest["frames"] = frames;

    auto os = open_out(dir / "manifest.json");
    os << manifest.dump(2) << '\n';
    if (!os) fail("failed writing " + (dir / "manifest.json").string());
}

StoredTrajectory read_trajectory(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    const json m = load_json(manifest_path);
    StoredTrajectory traj;
    try {
        if (m.at("format").get<std::string>() != "lpflow-trajectory")
            fail(manifest_path.string() + ": not a trajectory manifest");
        if (m.at("version").get<int>() != 1)
            fail(manifest_path.string() + ": unsupported version");
        traj.dt = m.at("dt").get<double>();
        for (const json& frame : m.at("frames")) {
            const double t = frame.at("t").get<double>();
            SpectralField a = transform(read_field(dir / frame.at("density").get<std::string>()));
            SpectralField u = transform(read_field(dir / frame.at("velocity").get<std::string>()));
            traj.snapshots.push_back(Snapshot{t, std::move(a), std::move(u)});
        }
    } catch (const json::exception& e) {
        fail(manifest_path.string() + ": " + e.what());
    }
    return traj;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<double> linear_ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + 0.5 * step * 1e-9; v += step)
        ticks.push_back(v);
    return ticks;
}

}  // namespace

void write_svg_plot(const fs::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series,
                    bool log_x, bool log_y) {
    constexpr double width = 720.0, height = 450.0;
    constexpr double ml = 72.0, mr = 24.0, mt = 40.0, mb = 56.0;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    const auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
    const auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
    const auto drawable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) && (!log_y || y > 0.0);
    };

    double xmin = infinity, xmax = -infinity, ymin = infinity, ymax = -infinity;
    for (const PlotSeries& s : series) {
        if (s.x.size() != s.y.size()) fail("plot: series '" + s.name + "' has mismatched x/y");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!drawable(s.x[i], s.y[i])) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (!(xmin <= xmax) || !(ymin <= ymax)) fail("plot: no drawable points");
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }

    const auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
    const auto py = [&](double v) {
        return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb);
    };
    const auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    auto os = open_out(path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "  <text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << xml_escape(title) << "</text>\n";

    const auto axis_ticks = [&](double lo, double hi, bool log_axis) {
        std::vector<double> ticks;
        if (log_axis) {
            for (double d = std::ceil(lo - 1e-9); d <= hi + 1e-9; d += 1.0) ticks.push_back(d);
            if (ticks.size() >= 2) return ticks;
        }
        return linear_ticks(lo, hi);
    };

    for (double v : axis_ticks(xmin, xmax, log_x)) {
        const double x = px(v);
        os << "  <line x1=\"" << coord(x) << "\" y1=\"" << coord(mt) << "\" x2=\"" << coord(x)
           << "\" y2=\"" << coord(height - mb) << "\" stroke=\"#dddddd\"/>\n";
        os << "  <text x=\"" << coord(x) << "\" y=\"" << coord(height - mb + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << xml_escape(tick_label(log_x ? std::pow(10.0, v) : v)) << "</text>\n";
    }
    for (double v : axis_ticks(ymin, ymax, log_y)) {
        const double y = py(v);
        os << "  <line x1=\"" << coord(ml) << "\" y1=\"" << coord(y) << "\" x2=\""
           << coord(width - mr) << "\" y2=\"" << coord(y) << "\" stroke=\"#dddddd\"/>\n";
        os << "  <text x=\"" << coord(ml - 8) << "\" y=\"" << coord(y + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << xml_escape(tick_label(log_y ? std::pow(10.0, v) : v)) << "</text>\n";
    }

    os << "  <line x1=\"" << coord(ml) << "\" y1=\"" << coord(height - mb) << "\" x2=\""
       << coord(width - mr) << "\" y2=\"" << coord(height - mb) << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << coord(ml) << "\" y1=\"" << coord(mt) << "\" x2=\"" << coord(ml)
       << "\" y2=\"" << coord(height - mb) << "\" stroke=\"black\"/>\n";
    os << "  <text x=\"" << (ml + (width - ml - mr) / 2) << "\" y=\"" << height - 14
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << xml_escape(x_label) << "</text>\n";
    os << "  <text x=\"18\" y=\"" << (mt + (height - mt - mb) / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       << "transform=\"rotate(-90 18 " << (mt + (height - mt - mb) / 2) << ")\">"
       << xml_escape(y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const PlotSeries& s = series[k];
        const char* color = palette[k % (sizeof palette / sizeof palette[0])];
        std::string points;
        const auto flush = [&] {
            if (points.empty()) return;
            os << "  <polyline fill=\"none\" stroke=\"" << color
               << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
            points.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!drawable(s.x[i], s.y[i])) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += coord(px(tx(s.x[i]))) + "," + coord(py(ty(s.y[i])));
        }
        flush();
    }

    bool any_name = false;
    for (const PlotSeries& s : series) any_name = any_name || !s.name.empty();
    if (any_name) {
        double ly = mt + 14.0;
        for (std::size_t k = 0; k < series.size(); ++k) {
            const char* color = palette[k % (sizeof palette / sizeof palette[0])];
            os << "  <line x1=\"" << coord(width - mr - 150) << "\" y1=\"" << coord(ly - 4)
               << "\" x2=\"" << coord(width - mr - 126) << "\" y2=\"" << coord(ly - 4)
               << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            os << "  <text x=\"" << coord(width - mr - 120) << "\" y=\"" << coord(ly)
               << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(series[k].name)
               << "</text>\n";
            ly += 16.0;
        }
    }

    os << "</svg>\n";
    if (!os) fail("failed writing " + path.string());
}

}  // namespace lpflow
