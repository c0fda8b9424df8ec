#include "spoofdet/trace.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>

#include "spoofdet/errors.hpp"
#include "spoofdet/io_util.hpp"

namespace spoofdet {

static bool record_finite(const SensorRecord& r) {
    return std::isfinite(r.timestamp_s) && std::isfinite(r.position.lat_deg) &&
           std::isfinite(r.position.lon_deg) && std::isfinite(r.speed_fps) &&
           std::isfinite(r.steer_deg) && std::isfinite(r.pedal_pct);
}

Trace make_trace(std::vector<SensorRecord> records, std::vector<std::uint8_t> record_labels) {
    if (records.size() < 2) {
        throw ValidationError("trace requires >= 2 records");
    }
    if (!record_labels.empty() && record_labels.size() != records.size()) {
        throw ValidationError("label count does not match record count");
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!record_finite(records[i])) {
            throw ValidationError("non-finite value in record " + std::to_string(i));
        }
        if (i > 0 && records[i].timestamp_s <= records[i - 1].timestamp_s) {
            throw ValidationError("timestamps not strictly increasing at record " +
                                  std::to_string(i));
        }
    }

    Trace trace;
    trace.records = std::move(records);
    trace.record_labels = std::move(record_labels);
    trace.step_distance_m.resize(trace.records.size() - 1);
    for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
        trace.step_distance_m[i] =
            haversine_distance(trace.records[i].position, trace.records[i + 1].position);
    }
    return trace;
}

std::vector<std::uint8_t> step_labels(const Trace& trace) {
    std::vector<std::uint8_t> labels(trace.step_count(), 0);
    if (trace.labeled()) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            labels[i] = trace.record_labels[i + 1];
        }
    }
    return labels;
}

namespace {

constexpr std::string_view kHeader = "timestamp,lat,lon,speed_fps,steer_deg,pedal_pct";
constexpr std::string_view kHeaderLabeled = "timestamp,lat,lon,speed_fps,steer_deg,pedal_pct,label";

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_double(std::string_view field, const std::string& context) {
    std::string buf(field);
    errno = 0;
    char* end = nullptr;
    double value = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || buf.empty() || errno == ERANGE) {
        throw ParseError(context + ": cannot parse number '" + buf + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(context + ": non-finite value '" + buf + "'");
    }
    return value;
}

} // namespace

Trace load_trace(const std::filesystem::path& path) {
    std::string contents = read_file(path);
    std::istringstream in(contents);
    std::string line;

    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    bool labeled;
    if (line == kHeader) {
        labeled = false;
    } else if (line == kHeaderLabeled) {
        labeled = true;
    } else {
        throw ParseError(path.string() + ": unexpected header '" + line + "'");
    }
    const std::size_t expected_fields = labeled ? 7 : 6;

    std::vector<SensorRecord> records;
    std::vector<std::uint8_t> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const std::string context = path.string() + ":" + std::to_string(line_no);
        auto fields = split_csv(line);
        if (fields.size() != expected_fields) {
            throw ParseError(context + ": expected " + std::to_string(expected_fields) +
                             " columns, got " + std::to_string(fields.size()));
        }

        SensorRecord rec;
        rec.timestamp_s = parse_double(fields[0], context);
        rec.position.lat_deg = parse_double(fields[1], context);
        rec.position.lon_deg = parse_double(fields[2], context);
        rec.speed_fps = parse_double(fields[3], context);
        rec.steer_deg = parse_double(fields[4], context);
        rec.pedal_pct = parse_double(fields[5], context);

        if (!is_valid(rec.position)) {
            throw ParseError(context + ": coordinates out of range");
        }
        if (!records.empty() && rec.timestamp_s <= records.back().timestamp_s) {
            throw ParseError(context + ": timestamp not strictly increasing");
        }

        if (labeled) {
            if (fields[6] == "0") {
                labels.push_back(0);
            } else if (fields[6] == "1") {
                labels.push_back(1);
            } else {
                throw ParseError(context + ": label must be 0 or 1");
            }
        }
        records.push_back(rec);
    }

    if (records.size() < 2) {
        throw ParseError(path.string() + ": trace requires >= 2 records");
    }
    return make_trace(std::move(records), std::move(labels));
}

void save_trace(const Trace& trace, const std::filesystem::path& path) {
    std::string out;
    out.reserve(trace.records.size() * 64);
    out += trace.labeled() ? kHeaderLabeled : kHeader;
    out += '\n';
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const SensorRecord& r = trace.records[i];
        out += format_double(r.timestamp_s);
        out += ',';
        out += format_double(r.position.lat_deg);
        out += ',';
        out += format_double(r.position.lon_deg);
        out += ',';
        out += format_double(r.speed_fps);
        out += ',';
        out += format_double(r.steer_deg);
        out += ',';
        out += format_double(r.pedal_pct);
        if (trace.labeled()) {
            out += ',';
            out += trace.record_labels[i] ? '1' : '0';
        }
        out += '\n';
    }
    atomic_write_file(path, out);
}

Trace synchronize(const std::vector<GpsSample>& gps_stream,
                  const std::vector<CanSample>& can_stream) {
    if (gps_stream.empty() || can_stream.empty()) {
        throw ValidationError("synchronize: both streams must be non-empty");
    }
    const double can_begin = can_stream.front().timestamp_s;
    const double can_end = can_stream.back().timestamp_s;

    std::vector<SensorRecord> records;
    records.reserve(gps_stream.size());
    std::size_t cursor = 0;
    for (const GpsSample& gps : gps_stream) {
        const double t = gps.timestamp_s;
        if (t < can_begin || t > can_end) continue;

        while (cursor + 1 < can_stream.size() && can_stream[cursor + 1].timestamp_s <= t) {
            ++cursor;
        }
        // cursor is the last CAN sample at or before t; candidate successor
        // wins only when strictly closer (ties go to the earlier sample)
        std::size_t pick = cursor;
        if (cursor + 1 < can_stream.size()) {
            const double before = t - can_stream[cursor].timestamp_s;
            const double after = can_stream[cursor + 1].timestamp_s - t;
            if (after < before) pick = cursor + 1;
        }

        SensorRecord rec;
        rec.timestamp_s = t;
        rec.position = gps.position;
        rec.speed_fps = can_stream[pick].speed_fps;
        rec.steer_deg = can_stream[pick].steer_deg;
        rec.pedal_pct = can_stream[pick].pedal_pct;
        records.push_back(rec);
    }

    if (records.empty()) {
        throw ValidationError("synchronize: no temporal overlap between GPS and CAN");
    }
    if (records.size() < 2) {
        throw ValidationError("synchronize: overlap covers fewer than 2 GPS samples");
    }
    return make_trace(std::move(records));
}

} // namespace spoofdet
