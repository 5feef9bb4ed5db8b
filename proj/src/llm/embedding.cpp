#include "dial/llm/embedding.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <cmath>

namespace dial {

std::vector<double> HashingEmbedder::embed(const std::string &text) const {
	if (trim(text).empty()) {
		throw DialException("cannot embed empty text");
	}
	std::vector<double> v(dim, 0.0);
	auto tokens = word_tokens(text);
	// unigrams + adjacent bigrams
	for (auto &tok : tokens) {
		v[fnv1a(tok) % dim] += 1.0;
	}
	for (size_t i = 0; i + 1 < tokens.size(); i++) {
		v[fnv1a(tokens[i] + " " + tokens[i + 1]) % dim] += 1.0;
	}
	double norm = l2_norm(v);
	if (norm == 0.0) {
		// no word tokens at all (e.g. punctuation-only input)
		v[0] = 1.0;
		return v;
	}
	for (auto &x : v) {
		x /= norm;
	}
	return v;
}

double cosine_similarity(const std::vector<double> &a, const std::vector<double> &b) {
	if (a.size() != b.size()) {
		throw DialException("embedding dimension mismatch");
	}
	double dot = 0.0;
	for (size_t i = 0; i < a.size(); i++) {
		dot += a[i] * b[i];
	}
	return dot;
}

double l2_norm(const std::vector<double> &v) {
	double s = 0.0;
	for (double x : v) {
		s += x * x;
	}
	return std::sqrt(s);
}

} // namespace dial
