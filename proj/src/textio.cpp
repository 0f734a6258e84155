// SPDX-License-Identifier: Apache-2.0
#include "wdmopt/textio.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "wdmopt/errors.hpp"

namespace wdmopt {

void write_version_line(std::ostream& os, const std::string& kind, int version) {
  os << "# wdmopt " << kind << " v" << version << "\n";
}

void expect_version_line(std::istream& is, const std::string& path, const std::string& kind,
                         int version) {
  std::string line;
  if (!std::getline(is, line))
    fail(ErrorCode::kParse, path + ": empty file, expected version line");
  std::istringstream ss(line);
  std::string hash, magic, k, v;
  ss >> hash >> magic >> k >> v;
  std::string want = "v" + std::to_string(version);
  if (hash != "#" || magic != "wdmopt" || k != kind || v != want)
    fail(ErrorCode::kParse, path + ": expected header '# wdmopt " + kind + " " + want +
                                "', got '" + line + "'");
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
      if (!cur.empty()) toks.push_back(cur), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!tokenize(line).empty()) return true;
  }
  return false;
}

double parse_double(const std::string& tok, const std::string& context) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    fail(ErrorCode::kParse, context + ": bad number '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, const std::string& context) {
  char* end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0')
    fail(ErrorCode::kParse, context + ": bad integer '" + tok + "'");
  return static_cast<int>(v);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(resolve_input_path(path));
  if (!is) fail(ErrorCode::kIo, "cannot open for reading: " + path);
  return is;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kIo, "cannot open for writing: " + path);
  return os;
}

std::string resolve_input_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("WDMOPT_CONFIG_DIR")) {
    fs::path alt = fs::path(dir) / path;
    if (fs::exists(alt)) return alt.string();
  }
  return path;  // let the open fail with the original name
}

}  // namespace wdmopt
