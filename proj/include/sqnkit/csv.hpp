#pragma once

// CSV emission: RFC-4180 quoting, '\n' line endings, '.' decimal separator,
// shortest round-trip number formatting.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sqnkit/solvers.hpp"

namespace sqnkit::csv {

std::string quote(std::string_view field);

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    Writer& field(std::string_view text);
    Writer& field(double v);
    Writer& field(std::uint64_t v);
    Writer& field(bool v);
    void end_row();

private:
    std::ostream& out_;
    bool first_ = true;
};

using Row = std::vector<std::string>;

/// Parses RFC-4180 text; the first row is returned as the header.
std::vector<Row> parse(std::istream& in);
std::vector<Row> read_file(const std::filesystem::path& path);

inline constexpr const char* kTraceHeader =
    "iteration,alpha,sng,objective,accuracy,sfo_total,damped_step,negative_curvature,"
    "damped_steps,negative_curvature_steps";

void write_trace(std::ostream& out, const RunTrace& trace);
void write_trace_file(const std::filesystem::path& path, const RunTrace& trace);

} // namespace sqnkit::csv
