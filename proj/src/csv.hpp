// CSV output with replayable metadata: comment rows first (resolved config,
// library version, master seed), then the header, then data rows. Doubles are
// serialized with 17 significant digits so a rerun is byte-identical.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace stochlr::io {

std::string format_double(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& metadata,
            const std::string& header);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void begin_row();
  void field(double value);
  void field(std::uint64_t value);
  void field(const std::string& value);
  void end_row();

  // Flushes and verifies the stream; throws IoError on failure.
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool first_in_row_ = true;
  bool closed_ = false;
};

}  // namespace stochlr::io
