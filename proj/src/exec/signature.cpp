#include "dial/exec/signature.hpp"

#include "dial/common/strings.hpp"

#include <cctype>

namespace dial {

const std::string PLACEHOLDER_ID = "⟨id⟩";
const std::string PLACEHOLDER_LIT = "⟨lit⟩";
const std::string PLACEHOLDER_NUM = "⟨num⟩";

std::string ErrorSignature::key_text() const {
	if (vendor_code) {
		return "[" + *vendor_code + "] " + template_text;
	}
	return template_text;
}

namespace {

bool is_ident_char(char c) {
	return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

// Vendor code extraction. Recognized shapes:
//   ORA-00904: ...            -> "ORA-00904", prefix removed from template
//   ERROR 1241 (21000): ...   -> "1241", prefix removed
//   Msg 8127, Level 15 ...    -> "8127", prefix removed
//   SQLSTATE[42601]: ...      -> "42601"
std::string extract_vendor_code(std::string &msg, std::optional<std::string> &code) {
	std::string t = trim(msg);
	if (starts_with_ci(t, "ORA-")) {
		size_t i = 4;
		std::string digits;
		while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
			digits += t[i];
			i++;
		}
		if (!digits.empty()) {
			code = "ORA-" + digits;
			if (i < t.size() && t[i] == ':') {
				i++;
			}
			return trim(t.substr(i));
		}
	}
	if (starts_with_ci(t, "ERROR ")) {
		size_t i = 6;
		std::string digits;
		while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
			digits += t[i];
			i++;
		}
		if (!digits.empty()) {
			code = digits;
			// optional "(sqlstate)"
			while (i < t.size() && t[i] == ' ') {
				i++;
			}
			if (i < t.size() && t[i] == '(') {
				size_t close = t.find(')', i);
				if (close != std::string::npos) {
					i = close + 1;
				}
			}
			if (i < t.size() && t[i] == ':') {
				i++;
			}
			return trim(t.substr(i));
		}
	}
	if (starts_with_ci(t, "Msg ")) {
		size_t i = 4;
		std::string digits;
		while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
			digits += t[i];
			i++;
		}
		if (!digits.empty()) {
			code = digits;
			// skip ", Level n, State n[, Line n]:" tail up to first ':'
			size_t colon = t.find(':', i);
			if (colon != std::string::npos) {
				return trim(t.substr(colon + 1));
			}
			return trim(t.substr(i));
		}
	}
	if (starts_with_ci(t, "SQLSTATE[")) {
		size_t close = t.find(']');
		if (close != std::string::npos) {
			code = t.substr(9, close - 9);
			size_t i = close + 1;
			if (i < t.size() && t[i] == ':') {
				i++;
			}
			return trim(t.substr(i));
		}
	}
	return t;
}

std::string replace_tokens(const std::string &msg) {
	std::string out;
	size_t i = 0;
	while (i < msg.size()) {
		char c = msg[i];
		if (c == '\'') {
			// single-quoted literal -> <lit>
			size_t j = i + 1;
			while (j < msg.size() && msg[j] != '\'') {
				j++;
			}
			out += PLACEHOLDER_LIT;
			i = (j < msg.size()) ? j + 1 : j;
			continue;
		}
		if (c == '"') {
			// double-quoted identifier -> <id>
			size_t j = i + 1;
			while (j < msg.size() && msg[j] != '"') {
				j++;
			}
			out += PLACEHOLDER_ID;
			i = (j < msg.size()) ? j + 1 : j;
			continue;
		}
		if (c == '`') {
			size_t j = i + 1;
			while (j < msg.size() && msg[j] != '`') {
				j++;
			}
			out += PLACEHOLDER_ID;
			i = (j < msg.size()) ? j + 1 : j;
			continue;
		}
		if (std::isdigit(static_cast<unsigned char>(c)) &&
		    (i == 0 || !is_ident_char(msg[i - 1]))) {
			size_t j = i;
			while (j < msg.size() && (std::isdigit(static_cast<unsigned char>(msg[j])) || msg[j] == '.')) {
				j++;
			}
			// numbers glued to identifier tails (e.g. "T1") stay verbatim
			if (j >= msg.size() || !is_ident_char(msg[j])) {
				out += PLACEHOLDER_NUM;
				i = j;
				continue;
			}
		}
		out += c;
		i++;
	}
	return out;
}

} // namespace

ErrorSignature normalize_signature(const ErrorTrace &trace, DialectId dialect) {
	ErrorSignature sig;
	sig.dialect = dialect;

	std::string msg = trace.message;
	std::optional<std::string> code = trace.vendor_code;
	std::optional<std::string> extracted;
	msg = extract_vendor_code(msg, extracted);
	if (!code && extracted) {
		code = extracted;
	}
	sig.vendor_code = code;
	sig.template_text = replace_tokens(msg);
	return sig;
}

bool glob_match(const std::string &pattern, const std::string &text) {
	std::string p = to_lower(pattern);
	std::string t = to_lower(text);
	size_t pi = 0, ti = 0, star = std::string::npos, mark = 0;
	while (ti < t.size()) {
		if (pi < p.size() && (p[pi] == t[ti])) {
			pi++;
			ti++;
		} else if (pi < p.size() && p[pi] == '*') {
			star = pi++;
			mark = ti;
		} else if (star != std::string::npos) {
			pi = star + 1;
			ti = ++mark;
		} else {
			return false;
		}
	}
	while (pi < p.size() && p[pi] == '*') {
		pi++;
	}
	return pi == p.size();
}

} // namespace dial
