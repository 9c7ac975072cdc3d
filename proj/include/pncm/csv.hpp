#ifndef PNCM_CSV_HPP
#define PNCM_CSV_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace pncm {

/// Shortest round-trip decimal form, locale independent.
inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw std::runtime_error("fmt_double: conversion failed");
    return std::string(buf, res.ptr);
}

/// Minimal CSV emitter: one header row, comma separation, LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& cols) { line(cols); }

    void cell(const std::string& s) { row_.push_back(s); }
    void cell(const char* s) { row_.emplace_back(s); }
    void cell(double v) { row_.push_back(fmt_double(v)); }
    void cell(int v) { row_.push_back(std::to_string(v)); }
    void cell(long v) { row_.push_back(std::to_string(v)); }
    void cell(long long v) { row_.push_back(std::to_string(v)); }
    void cell(std::uint64_t v) { row_.push_back(std::to_string(v)); }

    void end_row() {
        line(row_);
        row_.clear();
    }

private:
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

    std::ostream& os_;
    std::vector<std::string> row_;
};

/// Parses "start:stop:step" (inclusive stop, within half a step) or a single
/// value.  dB everywhere a power or SNR is swept.
inline std::vector<double> parse_grid(const std::string& spec) {
    auto parse_num = [](const std::string& s) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("grid: cannot parse number '" + s + "'");
        }
        if (pos != s.size()) throw std::invalid_argument("grid: trailing junk in '" + s + "'");
        return v;
    };
    std::vector<std::string> parts;
    std::size_t from = 0;
    while (true) {
        std::size_t colon = spec.find(':', from);
        if (colon == std::string::npos) {
            parts.push_back(spec.substr(from));
            break;
        }
        parts.push_back(spec.substr(from, colon - from));
        from = colon + 1;
    }
    if (parts.size() == 1) return {parse_num(parts[0])};
    if (parts.size() != 3)
        throw std::invalid_argument("grid: expected 'value' or 'start:stop:step', got '" + spec +
                                    "'");
    double start = parse_num(parts[0]), stop = parse_num(parts[1]), step = parse_num(parts[2]);
    if (!(step > 0.0)) throw std::invalid_argument("grid: step must be > 0");
    if (stop < start) throw std::invalid_argument("grid: stop < start");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double v = start + i * step;
        if (v > stop + step * 0.5) break;
        grid.push_back(v);
    }
    return grid;
}

/// key=value run manifest, compatible with the CLI --config reader so a run
/// can be reproduced with `pncm <subcommand> --config <manifest>`.
class Manifest {
public:
    void note(const std::string& comment) { lines_.push_back("# " + comment); }
    void set(const std::string& key, const std::string& value) {
        lines_.push_back(key + "=" + value);
    }
    void set(const std::string& key, double v) { set(key, fmt_double(v)); }
    void set(const std::string& key, long long v) { set(key, std::to_string(v)); }
    void set(const std::string& key, std::uint64_t v) { set(key, std::to_string(v)); }

    void write(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open manifest file '" + path + "' for writing");
        for (const auto& l : lines_) os << l << '\n';
        if (!os) throw std::runtime_error("failed writing manifest file '" + path + "'");
    }

private:
    std::vector<std::string> lines_;
};

} // namespace pncm

#endif // PNCM_CSV_HPP
