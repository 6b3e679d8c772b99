#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "znnqp/app/commands.hpp"

namespace znnqp::app::detail {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws Error when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
double parse_real(const std::string& cell);

std::filesystem::path output_dir(const Experiment& ex, const CommandOptions& opts);
void ensure_dir(const std::filesystem::path& dir);

/// Text for the alpha column: the value for fractional-order models, "na" otherwise.
std::string alpha_cell(const ModelSpec& spec);
std::string model_file_stem(const ModelSpec& spec);

/// Loads the config and runs `body`, mapping exceptions to exit codes.
int guarded(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg,
            const std::function<int(const Experiment&, const std::filesystem::path&)>& body);

}  // namespace znnqp::app::detail
