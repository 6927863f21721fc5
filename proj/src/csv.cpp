#include "sqnkit/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "sqnkit/dataset_io.hpp"
#include "sqnkit/errors.hpp"

namespace sqnkit::csv {

std::string quote(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

Writer& Writer::field(std::string_view text)
{
    if (!first_) out_ << ',';
    out_ << quote(text);
    first_ = false;
    return *this;
}

Writer& Writer::field(double v)
{
    return field(std::string_view(io::format_double(v)));
}

Writer& Writer::field(std::uint64_t v)
{
    return field(std::string_view(std::to_string(v)));
}

Writer& Writer::field(bool v)
{
    return field(std::string_view(v ? "1" : "0"));
}

void Writer::end_row()
{
    out_ << '\n';
    first_ = true;
}

std::vector<Row> parse(std::istream& in)
{
    std::vector<Row> rows;
    Row row;
    std::string cur;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cur += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            row.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\n') {
            row.push_back(std::move(cur));
            cur.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (in_quotes) throw ParseError(rows.size() + 1, "unterminated quoted CSV field");
    if (any) {
        row.push_back(std::move(cur));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Row> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return parse(in);
}

void write_trace(std::ostream& out, const RunTrace& trace)
{
    out << kTraceHeader << '\n';
    Writer w(out);
    for (const auto& r : trace.records) {
        w.field(r.iteration)
            .field(r.alpha)
            .field(r.sng)
            .field(r.objective)
            .field(r.accuracy)
            .field(r.sfo_total)
            .field(r.damped_step)
            .field(r.negative_curvature)
            .field(r.damped_steps)
            .field(r.negative_curvature_steps);
        w.end_row();
    }
}

void write_trace_file(const std::filesystem::path& path, const RunTrace& trace)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_trace(out, trace);
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace sqnkit::csv
