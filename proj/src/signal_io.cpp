#include "ucs/signal_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ucs {

ParseError::ParseError(const std::filesystem::path& path, std::size_t line, const std::string& what)
    : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what), line_(line) {}

void write_signal(const std::filesystem::path& path, std::span<const double> x) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    char buf[40];
    for (double v : x) {
        const int len = std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out.write(buf, len);
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

RealSignal read_signal(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    RealSignal x;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v = 0.0;
        const char* first = line.data();
        const char* last = line.data() + line.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) throw ParseError(path, lineno, "not a number: '" + line + "'");
        x.push_back(v);
    }
    return x;
}

std::filesystem::path sidecar_path(const std::filesystem::path& data_path) {
    auto p = data_path;
    p += ".meta.json";
    return p;
}

void write_sidecar(const std::filesystem::path& data_path, const std::string& json_text) {
    const auto p = sidecar_path(data_path);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    out << json_text << '\n';
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::string read_sidecar(const std::filesystem::path& data_path) {
    const auto p = sidecar_path(data_path);
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open sidecar " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ucs
