#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "levyruin/errors.hpp"

namespace levyruin::cli {

/// Config problem; line is 1-based, 0 when the value came from --set.
class SchemaError : public ValidationError {
public:
    SchemaError(const std::string& what, int line) : ValidationError(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

/// Applies "a.b.c=value" overrides; numeric segments index sequences.
void apply_override(YAML::Node& root, const std::string& assignment);

/// Effective config text; identical for configs that differ only in the
/// output directory.
std::string canonical_config(const YAML::Node& root);

std::uint64_t fnv1a(const std::string& s);

/// Shortest round-trip-safe text of a double (17 significant digits).
std::string format_double(double x);

/// Runs one experiment and writes CSV files plus manifest.json into the
/// output directory. Returns the process exit status: 0 success, 2 config or
/// validation failure, 3 numeric failure, 1 I/O failure.
int run(const Options& opt, std::ostream& log);

int main_entry(int argc, char** argv);

}  // namespace levyruin::cli
