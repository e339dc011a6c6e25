#include "dialectoscope/textio.hpp"

#include <zlib.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dialectoscope/error.hpp"

namespace dialectoscope {

LineReader::LineReader(const std::filesystem::path& path)
    : path_(path), buffer_(1 << 16) {
  handle_ = gzopen(path.c_str(), "rb");
  if (handle_ == nullptr) {
    throw IoError("cannot open " + path.string());
  }
  gzbuffer(static_cast<gzFile>(handle_), 1 << 18);
}

LineReader::~LineReader() {
  if (handle_ != nullptr) gzclose(static_cast<gzFile>(handle_));
}

bool LineReader::next(std::string& line) {
  line.clear();
  auto* file = static_cast<gzFile>(handle_);
  bool got_any = false;
  while (gzgets(file, buffer_.data(), static_cast<int>(buffer_.size())) != nullptr) {
    got_any = true;
    line.append(buffer_.data());
    if (!line.empty() && line.back() == '\n') break;
  }
  if (!got_any) {
    int err = 0;
    const char* msg = gzerror(file, &err);
    if (err != Z_OK && err != Z_STREAM_END) {
      throw IoError("read error in " + path_.string() + ": " + msg);
    }
    return false;
  }
  if (!line.empty() && line.back() == '\n') line.pop_back();
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_no_;
  return true;
}

std::string read_file(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string out;
  std::string line;
  while (reader.next(line)) {
    out += line;
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content,
                bool compress) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  if (compress) {
    gzFile file = gzopen(tmp.c_str(), "wb6");
    if (file == nullptr) throw IoError("cannot write " + path.string());
    std::size_t offset = 0;
    while (offset < content.size()) {
      const auto chunk = static_cast<unsigned>(
          std::min<std::size_t>(content.size() - offset, 1u << 20));
      if (gzwrite(file, content.data() + offset, chunk) != static_cast<int>(chunk)) {
        gzclose(file);
        throw IoError("write error in " + path.string());
      }
      offset += chunk;
    }
    if (gzclose(file) != Z_OK) throw IoError("write error in " + path.string());
  } else {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write error in " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_real(double value, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
  return buf;
}

double parse_real(std::string_view text) {
  // strtod accepts inf/nan spellings and is locale-independent for "C".
  std::string tmp(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || errno == ERANGE) {
    throw DataError("not a number: '" + tmp + "'");
  }
  return v;
}

long long parse_integer(std::string_view text) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
  }
  return hex64(h);
}

}  // namespace dialectoscope
