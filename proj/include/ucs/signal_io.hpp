#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "ucs/quantize.hpp"
#include "ucs/sensing.hpp"

namespace ucs {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::filesystem::path& path, std::size_t line, const std::string& what);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// One value per line, 17 significant digits, LF line endings.
void write_signal(const std::filesystem::path& path, std::span<const double> x);
RealSignal read_signal(const std::filesystem::path& path);

// Sidecar next to a data file: "<file>.meta.json".
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);
void write_sidecar(const std::filesystem::path& data_path, const std::string& json_text);
std::string read_sidecar(const std::filesystem::path& data_path);

}  // namespace ucs
