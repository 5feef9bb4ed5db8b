#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dial {

std::string to_lower(const std::string &s);
std::string to_upper(const std::string &s);
std::string trim(const std::string &s);
std::string rtrim(const std::string &s);
std::vector<std::string> split(const std::string &s, char sep);
std::string join(const std::vector<std::string> &parts, const std::string &sep);
bool starts_with_ci(const std::string &s, const std::string &prefix);
bool contains_word_ci(const std::string &text, const std::string &word);
bool iequals(const std::string &a, const std::string &b);

// Word tokens: maximal [A-Za-z0-9_]+ runs, lowercased.
std::vector<std::string> word_tokens(const std::string &text);

// FNV-1a, the stable content hash used for fixture keys and task file names.
uint64_t fnv1a(const std::string &data);
std::string fnv1a_hex(const std::string &data);

bool parse_double(const std::string &s, double &out);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

} // namespace dial
