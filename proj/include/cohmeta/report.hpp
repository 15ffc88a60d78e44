#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cohmeta::report {

inline constexpr std::string_view kVersion = COHMETA_VERSION;

/// Fixed-point decimal; `undefined` for nullopt.
std::string format_number(std::optional<double> v, int precision, std::string_view undefined = "");

/// Simple rectangular table rendered as markdown or CSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_markdown() const;
  std::string to_csv() const;
};

std::string csv_escape(std::string_view field);

using Config = std::vector<std::pair<std::string, std::string>>;

/// "<prefix>cohmeta <version> <command> key=value ..." line. Used as the first
/// line of every report so outputs carry their full resolved configuration.
std::string provenance_line(std::string_view command, const Config& config, std::string_view prefix);

/// Writes to a sibling temporary file and renames it into place. Throws
/// std::runtime_error when the path is not writable.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Collects named outputs and writes them only once all are rendered.
class OutputBundle {
 public:
  void add(std::filesystem::path path, std::string content);
  void commit() const;
  const std::vector<std::pair<std::filesystem::path, std::string>>& files() const { return files_; }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

}  // namespace cohmeta::report
