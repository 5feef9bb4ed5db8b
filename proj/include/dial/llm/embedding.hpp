#pragma once

#include <memory>
#include <string>
#include <vector>

namespace dial {

// Providers return unit-norm vectors of a fixed dimension; embed is
// deterministic per provider, so retrieval and routing are reproducible.
class EmbeddingProvider {
public:
	virtual ~EmbeddingProvider() = default;
	virtual std::vector<double> embed(const std::string &text) const = 0;
	virtual size_t dimension() const = 0;
};

// Default provider: token n-gram feature hashing into D buckets, L2-normalized.
class HashingEmbedder : public EmbeddingProvider {
public:
	explicit HashingEmbedder(size_t dim = 256) : dim(dim) {
	}

	std::vector<double> embed(const std::string &text) const override;
	size_t dimension() const override {
		return dim;
	}

private:
	size_t dim;
};

// Both inputs are unit-norm by provider contract, so the dot product is the
// cosine; no renormalization that could perturb exact threshold comparisons.
double cosine_similarity(const std::vector<double> &a, const std::vector<double> &b);

double l2_norm(const std::vector<double> &v);

} // namespace dial
