#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Small text helpers shared by the CSV readers and writers.
namespace uroc::text {

// Splits one CSV line on commas. Quoting is not supported; none of the
// formats handled here need it.
std::vector<std::string_view> split_fields(std::string_view line);

// Splits text into lines, dropping a trailing '\r' on each and skipping
// blank lines. Line numbers (1-based) are reported alongside.
std::vector<std::pair<std::size_t, std::string_view>> lines(
    std::string_view text);

// Strict parsers: the whole field must be consumed. Throw InputError with
// `context` in the message on failure.
double parse_double(std::string_view field, std::string_view context);
float parse_float(std::string_view field, std::string_view context);
std::int64_t parse_int(std::string_view field, std::string_view context);

// Shortest representation that round-trips.
std::string format_double(double value);
std::string format_float(float value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace uroc::text
