#include "sqnkit/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "sqnkit/errors.hpp"

namespace sqnkit::io {
namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view tok, T& out)
{
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_for_read(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw NumericError("format_double: conversion failed");
    return std::string(buf, ptr);
}

LabeledDataset parse_sparse_dataset(std::istream& in)
{
    struct Raw {
        std::vector<std::uint32_t> ind;
        std::vector<double> val;
        int label;
    };
    std::vector<Raw> rows;
    std::size_t declared_dim = 0;
    std::size_t max_index = 0;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (sv.front() == '#') {
            std::istringstream hdr{std::string(sv.substr(1))};
            std::string key;
            std::size_t dim = 0;
            if ((hdr >> key) && key == "dim") {
                if (!(hdr >> dim)) throw ParseError(lineno, "malformed dim header");
                declared_dim = dim;
            }
            continue;
        }

        Raw row;
        std::size_t pos = 0;
        auto next_token = [&]() -> std::string_view {
            while (pos < sv.size() && (sv[pos] == ' ' || sv[pos] == '\t')) ++pos;
            const std::size_t start = pos;
            while (pos < sv.size() && sv[pos] != ' ' && sv[pos] != '\t') ++pos;
            return sv.substr(start, pos - start);
        };

        const std::string_view label_tok = next_token();
        double label = 0.0;
        if (!parse_number(label_tok, label)) {
            throw ParseError(lineno, "malformed label '" + std::string(label_tok) + "'");
        }
        if (label != 1.0 && label != -1.0) {
            throw LabelError(lineno, "label must be -1 or +1, got '" + std::string(label_tok) + "'");
        }
        row.label = static_cast<int>(label);

        std::uint64_t prev = 0;
        for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
            const auto colon = tok.find(':');
            if (colon == std::string_view::npos) {
                throw ParseError(lineno, "feature '" + std::string(tok) + "' lacks ':'");
            }
            std::uint64_t index = 0;
            double value = 0.0;
            if (!parse_number(tok.substr(0, colon), index) || index == 0 ||
                index > std::numeric_limits<std::uint32_t>::max()) {
                throw ParseError(lineno, "bad feature index in '" + std::string(tok) + "'");
            }
            if (!parse_number(tok.substr(colon + 1), value) || !std::isfinite(value)) {
                throw ParseError(lineno, "bad feature value in '" + std::string(tok) + "'");
            }
            if (index <= prev) {
                throw ParseError(lineno, "feature indices must be strictly increasing");
            }
            prev = index;
            max_index = std::max<std::size_t>(max_index, index);
            if (value == 0.0) continue;
            row.ind.push_back(static_cast<std::uint32_t>(index - 1));
            row.val.push_back(value);
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw ParseError(lineno, "dataset contains no samples");
    if (declared_dim != 0 && declared_dim < max_index) {
        throw ParseError(lineno, "feature index exceeds declared dim");
    }
    const std::size_t dim = std::max(declared_dim, max_index);
    std::vector<SparseSample> samples;
    samples.reserve(rows.size());
    for (auto& r : rows) {
        samples.push_back({SparseVector(std::move(r.ind), std::move(r.val), dim), r.label});
    }
    return LabeledDataset(std::move(samples), dim);
}

LabeledDataset load_sparse_dataset(const std::filesystem::path& path)
{
    auto in = open_for_read(path);
    return parse_sparse_dataset(in);
}

void write_sparse_dataset(std::ostream& out, const LabeledDataset& data)
{
    out << "# dim " << data.dim() << '\n';
    for (const auto& s : data.samples()) {
        out << (s.label > 0 ? "1" : "-1");
        const auto ind = s.features.indices();
        const auto val = s.features.values();
        for (std::size_t j = 0; j < ind.size(); ++j) {
            out << ' ' << (ind[j] + 1) << ':' << format_double(val[j]);
        }
        out << '\n';
    }
}

void save_sparse_dataset(const std::filesystem::path& path, const LabeledDataset& data)
{
    auto out = open_for_write(path);
    write_sparse_dataset(out, data);
    if (!out) throw IoError("write failed: " + path.string());
}

void save_vector(const std::filesystem::path& path, std::span<const double> v)
{
    auto out = open_for_write(path);
    for (double x : v) out << format_double(x) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Vector load_vector(const std::filesystem::path& path)
{
    auto in = open_for_read(path);
    Vector v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto sv = trim(line);
        if (sv.empty()) continue;
        double x = 0.0;
        if (!parse_number(sv, x)) throw ParseError(lineno, "bad vector entry");
        v.push_back(x);
    }
    return v;
}

void save_metadata(const std::filesystem::path& path,
                   const std::map<std::string, std::string>& entries)
{
    auto out = open_for_write(path);
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::map<std::string, std::string> load_metadata(const std::filesystem::path& path)
{
    auto in = open_for_read(path);
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
        entries[std::string(trim(sv.substr(0, eq)))] = std::string(trim(sv.substr(eq + 1)));
    }
    return entries;
}

} // namespace sqnkit::io
