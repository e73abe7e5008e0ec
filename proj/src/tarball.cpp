#include "trivscan/tarball.hpp"

#include <zlib.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string_view>

#include "trivscan/error.hpp"

namespace trivscan::tarball {

namespace {

constexpr std::size_t kBlock = 512;

std::string field(const char* header, std::size_t offset, std::size_t length) {
  const char* begin = header + offset;
  const char* end = static_cast<const char*>(std::memchr(begin, '\0', length));
  return std::string(begin, end ? end : begin + length);
}

std::optional<std::uint64_t> parse_size(const char* header) {
  const auto* raw = reinterpret_cast<const unsigned char*>(header + 124);
  if (raw[0] & 0x80) {
    // GNU base-256 encoding.
    std::uint64_t v = raw[0] & 0x7f;
    for (int i = 1; i < 12; ++i) v = (v << 8) | raw[i];
    return v;
  }
  std::uint64_t v = 0;
  bool any = false;
  for (int i = 0; i < 12; ++i) {
    char c = header[124 + i];
    if (c == ' ' && !any) continue;
    if (c < '0' || c > '7') break;
    v = v * 8 + static_cast<std::uint64_t>(c - '0');
    any = true;
  }
  return v;
}

bool is_zero_block(const char* block) {
  for (std::size_t i = 0; i < kBlock; ++i) {
    if (block[i] != 0) return false;
  }
  return true;
}

// pax extended header records: "<len> <key>=<value>\n"
std::optional<std::string> pax_path(std::string_view data) {
  std::optional<std::string> path;
  while (!data.empty()) {
    std::size_t space = data.find(' ');
    if (space == std::string_view::npos) break;
    std::size_t len = 0;
    for (char c : data.substr(0, space)) {
      if (c < '0' || c > '9') return path;
      len = len * 10 + static_cast<std::size_t>(c - '0');
    }
    if (len == 0 || len > data.size()) break;
    std::string_view record = data.substr(space + 1, len - space - 1);
    if (!record.empty() && record.back() == '\n') record.remove_suffix(1);
    std::size_t eq = record.find('=');
    if (eq != std::string_view::npos && record.substr(0, eq) == "path") {
      path = std::string(record.substr(eq + 1));
    }
    data.remove_prefix(len);
  }
  return path;
}

std::string inflate_file(const std::filesystem::path& path) {
  gzFile gz = gzopen(path.string().c_str(), "rb");
  if (!gz) throw Error(ErrorKind::io_failure, "cannot open " + path.string());
  std::string out;
  std::array<char, 1 << 16> buf;
  while (true) {
    int n = gzread(gz, buf.data(), static_cast<unsigned>(buf.size()));
    if (n < 0) {
      int code = 0;
      std::string msg = gzerror(gz, &code);
      gzclose(gz);
      throw Error(ErrorKind::io_failure, path.string() + ": " + msg);
    }
    if (n == 0) break;
    out.append(buf.data(), static_cast<std::size_t>(n));
  }
  int code = Z_OK;
  gzerror(gz, &code);
  gzclose(gz);
  if (code == Z_BUF_ERROR) throw Error(ErrorKind::io_failure, path.string() + ": unexpected end of compressed data");
  return out;
}

}  // namespace

bool looks_like_tarball(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::array<char, kBlock> head{};
  in.read(head.data(), head.size());
  auto got = static_cast<std::size_t>(in.gcount());
  if (got >= 2 && static_cast<unsigned char>(head[0]) == 0x1f && static_cast<unsigned char>(head[1]) == 0x8b) {
    return true;
  }
  return got == kBlock && std::string_view(head.data() + 257, 5) == "ustar";
}

Archive read(const std::filesystem::path& path) {
  const std::string data = inflate_file(path);
  Archive archive;
  std::optional<std::string> long_name;
  std::size_t pos = 0;
  while (pos + kBlock <= data.size()) {
    const char* header = data.data() + pos;
    if (is_zero_block(header)) return archive;
    auto size = parse_size(header);
    if (!size) throw Error(ErrorKind::io_failure, path.string() + ": bad tar header");
    const std::size_t body = pos + kBlock;
    if (body + *size > data.size()) throw Error(ErrorKind::io_failure, path.string() + ": truncated archive");
    std::string_view content(data.data() + body, *size);
    pos = body + ((*size + kBlock - 1) / kBlock) * kBlock;

    const char type = header[156];
    std::string name = field(header, 0, 100);
    if (std::string_view(header + 257, 5) == "ustar") {
      std::string prefix = field(header, 345, 155);
      if (!prefix.empty()) name = prefix + "/" + name;
    }
    if (long_name) {
      name = *long_name;
      long_name.reset();
    }
    switch (type) {
      case 'x':
        long_name = pax_path(content);
        break;
      case 'L':
        long_name = field(content.data(), 0, content.size());
        break;
      case 'g':
      case '5':
        break;
      case '0':
      case '\0':
      case '7':
        archive.files[name] = std::string(content);
        break;
      default:
        archive.warnings.push_back("skipped non-regular archive entry '" + name + "'");
        break;
    }
  }
  if (pos < data.size()) throw Error(ErrorKind::io_failure, path.string() + ": truncated archive");
  return archive;
}

}  // namespace trivscan::tarball
