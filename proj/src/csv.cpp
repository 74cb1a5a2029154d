#include "pcbench/csv.hpp"

#include "pcbench/units.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace pcbench::io {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

namespace {

template <class Row, class Fn>
std::string build(std::string_view header, std::span<const Row> rows, Fn&& emit) {
    std::string out;
    out.reserve(header.size() + 1 + rows.size() * 48);
    out.append(header);
    out.push_back('\n');
    for (const auto& r : rows) {
        emit(out, r);
        out.push_back('\n');
    }
    return out;
}

void field(std::string& out, double v, bool last = false) {
    out.append(format_number(v));
    if (!last) out.push_back(',');
}

std::vector<std::vector<double>> parse_numeric(std::string_view text, std::string_view header) {
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (!seen_header) {
            if (line != header) {
                throw IoError("csv: expected header '" + std::string(header) + "', got '" + std::string(line) + "'");
            }
            seen_header = true;
            continue;
        }
        std::vector<double> values;
        std::size_t f = 0;
        while (true) {
            auto comma = line.find(',', f);
            auto tok = line.substr(f, comma == std::string_view::npos ? std::string_view::npos : comma - f);
            double v = 0.0;
            const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
                throw IoError("csv: line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
            }
            values.push_back(v);
            if (comma == std::string_view::npos) break;
            f = comma + 1;
        }
        rows.push_back(std::move(values));
        if (end == text.size()) break;
    }
    if (!seen_header) throw IoError("csv: missing header '" + std::string(header) + "'");
    return rows;
}

}  // namespace

std::string iv_sweep_csv(std::span<const IvRow> rows) {
    return build(kIvHeader, rows, [](std::string& o, const IvRow& r) {
        field(o, r.v_gs);
        field(o, r.v_ds);
        field(o, r.i_d);
        o.append(device::to_string(r.region));
    });
}

std::string dpt_waveform_csv(std::span<const losses::WaveformSample> samples) {
    return build(kDptHeader, samples, [](std::string& o, const losses::WaveformSample& s) {
        field(o, s.t);
        field(o, s.v_ds);
        field(o, s.i_d, true);
    });
}

std::string records_csv(std::span<const CycleRecord> records) {
    return build(kRecordsHeader, records, [](std::string& o, const CycleRecord& r) {
        o.append(std::to_string(r.cycle_index));
        o.push_back(',');
        field(o, to_celsius(r.t_j_peak));
        field(o, to_celsius(r.t_j_min));
        field(o, r.delta_t_j);
        field(o, r.r_ds_on);
        field(o, r.v_ds_on_measured);
        o.push_back(r.valid ? '1' : '0');
    });
}

std::string amplitude_csv(std::span<const cycling::AmplitudeSolution> rows) {
    return build(kAmplitudeHeader, rows, [](std::string& o, const cycling::AmplitudeSolution& s) {
        field(o, to_celsius(s.t_c));
        field(o, s.i_pulse, true);
    });
}

std::string trace_csv(std::span<const cycling::TracePoint> trace) {
    return build(kTraceHeader, trace, [](std::string& o, const cycling::TracePoint& p) {
        field(o, p.t);
        field(o, to_celsius(p.t_j), true);
    });
}

std::string lifetime_csv(std::span<const aging::LifetimePoint> points) {
    return build(kLifetimeHeader, points, [](std::string& o, const aging::LifetimePoint& p) {
        field(o, p.delta_t_j);
        field(o, p.n_f, true);
    });
}

std::vector<aging::LifetimePoint> parse_lifetime_csv(std::string_view text) {
    std::vector<aging::LifetimePoint> out;
    for (const auto& row : parse_numeric(text, kLifetimeHeader)) {
        if (row.size() != 2) throw IoError("csv: lifetime rows need 2 columns");
        out.push_back({row[0], row[1]});
    }
    return out;
}

std::vector<device::IvPoint> parse_iv_points_csv(std::string_view text) {
    std::vector<device::IvPoint> out;
    for (const auto& row : parse_numeric(text, kIvPointsHeader)) {
        if (row.size() != 4) throw IoError("csv: IV point rows need 4 columns");
        out.push_back({row[0], row[1], row[2], to_kelvin(row[3])});
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace pcbench::io
