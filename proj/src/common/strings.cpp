#include "dial/common/strings.hpp"

#include "dial/common/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dial {

std::string to_lower(const std::string &s) {
	std::string out = s;
	std::transform(out.begin(), out.end(), out.begin(),
	               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return out;
}

std::string to_upper(const std::string &s) {
	std::string out = s;
	std::transform(out.begin(), out.end(), out.begin(),
	               [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
	return out;
}

std::string trim(const std::string &s) {
	size_t b = 0;
	size_t e = s.size();
	while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
		b++;
	}
	while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
		e--;
	}
	return s.substr(b, e - b);
}

std::string rtrim(const std::string &s) {
	size_t e = s.size();
	while (e > 0 && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
		e--;
	}
	return s.substr(0, e);
}

std::vector<std::string> split(const std::string &s, char sep) {
	std::vector<std::string> out;
	std::string cur;
	for (char c : s) {
		if (c == sep) {
			out.push_back(cur);
			cur.clear();
		} else {
			cur.push_back(c);
		}
	}
	out.push_back(cur);
	return out;
}

std::string join(const std::vector<std::string> &parts, const std::string &sep) {
	std::string out;
	for (size_t i = 0; i < parts.size(); i++) {
		if (i > 0) {
			out += sep;
		}
		out += parts[i];
	}
	return out;
}

bool starts_with_ci(const std::string &s, const std::string &prefix) {
	if (s.size() < prefix.size()) {
		return false;
	}
	for (size_t i = 0; i < prefix.size(); i++) {
		if (std::tolower(static_cast<unsigned char>(s[i])) !=
		    std::tolower(static_cast<unsigned char>(prefix[i]))) {
			return false;
		}
	}
	return true;
}

bool iequals(const std::string &a, const std::string &b) {
	return a.size() == b.size() && starts_with_ci(a, b);
}

std::vector<std::string> word_tokens(const std::string &text) {
	std::vector<std::string> out;
	std::string cur;
	for (char c : text) {
		if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
			cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
		} else if (!cur.empty()) {
			out.push_back(cur);
			cur.clear();
		}
	}
	if (!cur.empty()) {
		out.push_back(cur);
	}
	return out;
}

bool contains_word_ci(const std::string &text, const std::string &word) {
	auto tokens = word_tokens(text);
	std::string needle = to_lower(word);
	return std::find(tokens.begin(), tokens.end(), needle) != tokens.end();
}

uint64_t fnv1a(const std::string &data) {
	uint64_t h = 1469598103934665603ULL;
	for (unsigned char c : data) {
		h ^= c;
		h *= 1099511628211ULL;
	}
	return h;
}

std::string fnv1a_hex(const std::string &data) {
	char buf[17];
	std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(data)));
	return std::string(buf);
}

bool parse_double(const std::string &s, double &out) {
	std::string t = trim(s);
	if (t.empty()) {
		return false;
	}
	char *end = nullptr;
	out = std::strtod(t.c_str(), &end);
	return end == t.c_str() + t.size();
}

std::string read_file(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw IoException("cannot open file for reading: " + path);
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_file(const std::string &path, const std::string &content) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw IoException("cannot open file for writing: " + path);
	}
	out << content;
	if (!out) {
		throw IoException("write failed: " + path);
	}
}

} // namespace dial
