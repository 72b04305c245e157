#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace morphevo {

// Shortest decimal form that round-trips back to the same double. Used for
// every number written to an artifact so that re-reading a CSV reproduces the
// in-memory values bit for bit.
std::string fmt_double(double value);

// Strict full-string parses; throw std::runtime_error with the offending text.
double parse_double(std::string_view text);
long parse_long(std::string_view text);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Worker count resolution: explicit argument wins, then the MORPHEVO_THREADS
// environment variable, then hardware concurrency.
unsigned resolve_workers(unsigned requested = 0);

// Runs fn(i) for i in [0, count) across at most `workers` threads. Falls back
// to a plain loop when workers <= 1 or count is small. Exceptions from workers
// are rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

double median_of(std::vector<double> values);

}  // namespace morphevo
