#include "qmtbdd/records.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace qmtbdd {

namespace {

constexpr std::size_t kColumns = 11;

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_real(std::string_view s, const char* field)
{
    if (s == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw RecordError(std::string("bad value for ") + field + ": '" + std::string(s) + "'");
    }
    return v;
}

template <typename T>
T parse_int(std::string_view s, const char* field)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw RecordError(std::string("bad value for ") + field + ": '" + std::string(s) + "'");
    }
    return v;
}

// JSON has no NaN; non-finite reals travel as strings.
nlohmann::ordered_json real_to_json(double x)
{
    if (std::isfinite(x)) {
        return x;
    }
    return format_real(x);
}

double real_from_json(const nlohmann::json& j, const char* field)
{
    if (j.is_string()) {
        return parse_real(j.get<std::string>(), field);
    }
    if (!j.is_number()) {
        throw RecordError(std::string("field ") + field + " is not a number");
    }
    return j.get<double>();
}

} // namespace

std::string format_real(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

std::string sanitize_status(std::string_view status)
{
    std::string s(status);
    for (char& c : s) {
        if (c == ',') {
            c = ';';
        } else if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    return s;
}

std::string to_csv_row(const SweepRecord& r)
{
    std::ostringstream out;
    out << r.family << ',' << r.n << ',' << format_real(r.delta) << ',' << r.bits << ',' << r.seed << ','
        << format_real(r.max_error) << ',' << r.worst_index << ',' << r.final_nodes << ',' << r.peak_nodes << ','
        << format_real(r.wall_ms) << ',' << sanitize_status(r.status);
    return out.str();
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records)
{
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << to_csv_row(r) << '\n';
    }
}

std::vector<SweepRecord> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw RecordError("missing or unexpected CSV header");
    }
    std::vector<SweepRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != kColumns) {
            throw RecordError("line " + std::to_string(line_no) + ": expected " + std::to_string(kColumns) +
                              " fields, got " + std::to_string(f.size()));
        }
        SweepRecord r;
        r.family = std::string(f[0]);
        r.n = parse_int<unsigned>(f[1], "n");
        r.delta = parse_real(f[2], "delta");
        r.bits = parse_int<int>(f[3], "bits");
        r.seed = parse_int<std::uint64_t>(f[4], "seed");
        r.max_error = parse_real(f[5], "max_error");
        r.worst_index = parse_int<std::uint64_t>(f[6], "worst_index");
        r.final_nodes = parse_int<std::size_t>(f[7], "final_nodes");
        r.peak_nodes = parse_int<std::size_t>(f[8], "peak_nodes");
        r.wall_ms = parse_real(f[9], "wall_ms");
        r.status = std::string(f[10]);
        out.push_back(std::move(r));
    }
    return out;
}

std::string to_json(const std::vector<SweepRecord>& records)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        arr.push_back(nlohmann::ordered_json{
            {"family", r.family},
            {"n", r.n},
            {"delta", real_to_json(r.delta)},
            {"bits", r.bits},
            {"seed", r.seed},
            {"max_error", real_to_json(r.max_error)},
            {"worst_index", r.worst_index},
            {"final_nodes", r.final_nodes},
            {"peak_nodes", r.peak_nodes},
            {"wall_ms", real_to_json(r.wall_ms)},
            {"status", r.status},
        });
    }
    return arr.dump(2) + "\n";
}

std::vector<SweepRecord> from_json(std::string_view text)
{
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw RecordError(std::string("invalid JSON: ") + e.what());
    }
    if (!arr.is_array()) {
        throw RecordError("expected a JSON array of records");
    }
    std::vector<SweepRecord> out;
    try {
        for (const auto& o : arr) {
            SweepRecord r;
            r.family = o.at("family").get<std::string>();
            r.n = o.at("n").get<unsigned>();
            r.delta = real_from_json(o.at("delta"), "delta");
            r.bits = o.at("bits").get<int>();
            r.seed = o.at("seed").get<std::uint64_t>();
            r.max_error = real_from_json(o.at("max_error"), "max_error");
            r.worst_index = o.at("worst_index").get<std::uint64_t>();
            r.final_nodes = o.at("final_nodes").get<std::size_t>();
            r.peak_nodes = o.at("peak_nodes").get<std::size_t>();
            r.wall_ms = real_from_json(o.at("wall_ms"), "wall_ms");
            r.status = o.at("status").get<std::string>();
            out.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw RecordError(std::string("bad record: ") + e.what());
    }
    return out;
}

} // namespace qmtbdd
