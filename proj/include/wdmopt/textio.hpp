// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace wdmopt {

// Every file the project reads or writes starts with a version line of the
// form "# wdmopt <kind> v<N>". Readers reject unknown kinds and versions.

void write_version_line(std::ostream& os, const std::string& kind, int version);

// Consumes the version line; throws kParse on mismatch.
void expect_version_line(std::istream& is, const std::string& path, const std::string& kind,
                         int version);

// Splits a line into whitespace-separated tokens; '#' starts a comment.
std::vector<std::string> tokenize(const std::string& line);

// Reads the next line that has content (skips blanks and comments).
bool next_content_line(std::istream& is, std::string& line);

double parse_double(const std::string& tok, const std::string& context);
int parse_int(const std::string& tok, const std::string& context);

// Full-precision text form of a double (round-trips exactly).
std::string fmt_double(double v);

std::ifstream open_input(const std::string& path);
std::ofstream open_output(const std::string& path);

// Resolves `path` against the current directory, then against the directory
// named by WDMOPT_CONFIG_DIR when the plain path does not exist.
std::string resolve_input_path(const std::string& path);

}  // namespace wdmopt
