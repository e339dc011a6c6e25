#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dialectoscope {

/// Reads a text file line by line. Gzip-compressed files are decompressed
/// transparently, so every reader in the toolkit accepts `--compress` output.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  // Returns false at end of file. The trailing newline is stripped.
  bool next(std::string& line);
  std::size_t line_number() const { return line_no_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  void* handle_ = nullptr;
  std::size_t line_no_ = 0;
  std::vector<char> buffer_;
};

std::string read_file(const std::filesystem::path& path);

/// Writes `content` atomically (temp file + rename). With `compress` the bytes
/// are gzipped with a fixed header so output stays byte-reproducible.
void write_file(const std::filesystem::path& path, std::string_view content,
                bool compress = false);

/// printf-style %.{digits}g formatting, the canonical numeric text form.
std::string format_real(double value, int significant_digits = 17);

double parse_real(std::string_view text);
long long parse_integer(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);

/// RFC 4180 field quoting, applied only when the field needs it.
std::string csv_field(std::string_view text);
/// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> split_csv(std::string_view line);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);
std::string file_checksum(const std::filesystem::path& path);

}  // namespace dialectoscope
