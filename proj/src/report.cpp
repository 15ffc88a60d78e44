#include "cohmeta/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace cohmeta::report {

std::string format_number(std::optional<double> v, int precision, std::string_view undefined) {
  if (!v) return std::string(undefined);
  double x = *v;
  // Avoid "-0.00".
  if (std::abs(x) < 0.5 * std::pow(10.0, -precision)) x = 0.0;
  return fmt::format("{:.{}f}", x, precision);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string Table::to_markdown() const {
  auto row_line = [](const std::vector<std::string>& cells) {
    std::string line = "|";
    for (const auto& c : cells) line += " " + c + " |";
    return line + "\n";
  };
  std::string out = row_line(header);
  out += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? "---|" : "---:|";
  out += "\n";
  for (const auto& r : rows) out += row_line(r);
  return out;
}

std::string Table::to_csv() const {
  auto row_line = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) line += ',';
      line += csv_escape(cells[i]);
    }
    return line + "\n";
  };
  std::string out = row_line(header);
  for (const auto& r : rows) out += row_line(r);
  return out;
}

std::string provenance_line(std::string_view command, const Config& config, std::string_view prefix) {
  std::string line = fmt::format("{}cohmeta {} {}", prefix, kVersion, command);
  for (const auto& [k, v] : config) line += fmt::format(" {}={}", k, v);
  return line;
}

namespace {

std::filesystem::path staging_path(const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  return tmp;
}

void write_staged(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(staging_path(path), std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw std::runtime_error("failed while writing '" + path.string() + "'");
}

void discard_staged(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::remove(staging_path(path), ec);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  try {
    write_staged(path, content);
  } catch (...) {
    discard_staged(path);
    throw;
  }
  std::error_code ec;
  std::filesystem::rename(staging_path(path), path, ec);
  if (ec) {
    discard_staged(path);
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
}

void OutputBundle::add(std::filesystem::path path, std::string content) {
  files_.emplace_back(std::move(path), std::move(content));
}

void OutputBundle::commit() const {
  for (const auto& [path, content] : files_) {
    if (path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
      if (ec) {
        throw std::runtime_error("cannot create directory '" + path.parent_path().string() +
                                 "': " + ec.message());
      }
    }
  }
  // Stage everything first so a failure leaves no output behind.
  std::size_t staged = 0;
  try {
    for (; staged < files_.size(); ++staged) write_staged(files_[staged].first, files_[staged].second);
  } catch (...) {
    for (std::size_t i = 0; i <= staged && i < files_.size(); ++i) discard_staged(files_[i].first);
    throw;
  }
  for (const auto& [path, content] : files_) {
    std::error_code ec;
    std::filesystem::rename(staging_path(path), path, ec);
    if (ec) throw std::runtime_error("cannot write '" + path.string() + "': " + ec.message());
  }
}

}  // namespace cohmeta::report
