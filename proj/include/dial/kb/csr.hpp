#pragma once

#include <string>
#include <vector>

namespace dial {

struct AtomicSyntaxPoint {
	std::string name;
	// Standard-SQL description; doubles as the F-track retrieval query during
	// knowledge-base construction.
	std::string ansi_sketch;

	bool operator==(const AtomicSyntaxPoint &) const = default;
};

struct CanonicalCategory {
	std::string name;
	std::vector<AtomicSyntaxPoint> atomic_points;

	bool operator==(const CanonicalCategory &) const = default;
};

// The ANSI-aligned taxonomy anchoring all dialect knowledge: 11 categories,
// 40+ atomic syntax points.
struct CanonicalReference {
	std::vector<CanonicalCategory> categories;

	bool operator==(const CanonicalReference &) const = default;

	static const CanonicalReference &builtin();

	bool has_category(const std::string &name) const;
	// Canonical spelling for a case-insensitive match, empty if absent.
	std::string canonical_category(const std::string &name) const;
	std::vector<std::string> category_names() const;
	size_t total_atomic_points() const;

	// Structural violations (category count, point count, fixed-size checks).
	std::vector<std::string> validate() const;

	std::string to_json() const;
	static CanonicalReference from_json(const std::string &text);
};

// Sentinel category assigned when classification exhausts its retries.
extern const std::string FALLBACK_CATEGORY;

} // namespace dial
