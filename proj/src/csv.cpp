#include "csv.hpp"

#include <cstdio>

#include "errors.hpp"

namespace stochlr::io {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& metadata,
                     const std::string& header)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) {
    throw IoError("cannot open file for writing: " + path.string());
  }
  for (const auto& line : metadata) {
    out_ << "# " << line << '\n';
  }
  out_ << header << '\n';
}

CsvWriter::~CsvWriter() {
  if (!closed_) {
    out_.flush();
  }
}

void CsvWriter::begin_row() {
  first_in_row_ = true;
}

void CsvWriter::field(double value) {
  field(format_double(value));
}

void CsvWriter::field(std::uint64_t value) {
  field(std::to_string(value));
}

void CsvWriter::field(const std::string& value) {
  if (!first_in_row_) {
    out_ << ',';
  }
  out_ << value;
  first_in_row_ = false;
}

void CsvWriter::end_row() {
  out_ << '\n';
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) {
    throw IoError("failed writing file: " + path_.string());
  }
  out_.close();
  closed_ = true;
}

}  // namespace stochlr::io
