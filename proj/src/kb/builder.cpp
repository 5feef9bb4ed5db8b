#include "dial/kb/builder.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <cctype>

namespace dial {

using nlohmann::json;

std::string TaggedCorpus::merged() const {
	std::string out;
	for (auto &section : sections) {
		out += "<" + dialect_tag + ">\n";
		if (!section.heading.empty()) {
			out += section.heading + "\n";
		}
		out += section.body;
		if (!section.body.empty() && section.body.back() != '\n') {
			out += "\n";
		}
		out += "</" + dialect_tag + ">\n";
	}
	return out;
}

namespace {

void split_markdown(const std::string &text, std::vector<DocSection> &out) {
	std::vector<std::string> lines = split(text, '\n');
	DocSection current;
	bool have_section = false;
	auto flush = [&]() {
		if (have_section && (!trim(current.body).empty() || !current.heading.empty())) {
			out.push_back(current);
		}
		current = {};
	};
	for (auto &line : lines) {
		std::string t = trim(line);
		if (!t.empty() && t[0] == '#') {
			flush();
			size_t level = 0;
			while (level < t.size() && t[level] == '#') {
				level++;
			}
			current.heading = trim(t.substr(level));
			have_section = true;
			continue;
		}
		if (!have_section) {
			if (!t.empty()) {
				// preamble before the first heading forms its own section
				current.heading = "";
				have_section = true;
				current.body += line + "\n";
			}
			continue;
		}
		current.body += line + "\n";
	}
	flush();
}

// Minimal tag scanner for html/sgml: a new section starts at each
// <h1>..<h6> or <section> element; content bytes between headings are kept
// verbatim (tags included) in document order, nesting flattened.
void split_html(const std::string &text, std::vector<DocSection> &out) {
	struct Heading {
		size_t open_pos;     // position of '<'
		size_t content_pos;  // first byte after the opening tag
		std::string title;
		size_t body_pos;     // first byte after </hN> (or after opening <section>)
	};
	std::vector<Heading> headings;
	size_t i = 0;
	while (i < text.size()) {
		if (text[i] != '<') {
			i++;
			continue;
		}
		size_t close = text.find('>', i);
		if (close == std::string::npos) {
			break;
		}
		std::string tag = to_lower(trim(text.substr(i + 1, close - i - 1)));
		std::string tag_name = split(tag, ' ')[0];
		bool is_heading = tag_name.size() == 2 && tag_name[0] == 'h' &&
		                  tag_name[1] >= '1' && tag_name[1] <= '6';
		if (is_heading) {
			std::string end_tag = "</" + tag_name + ">";
			size_t end = to_lower(text).find(end_tag, close);
			Heading h;
			h.open_pos = i;
			h.content_pos = close + 1;
			if (end != std::string::npos) {
				h.title = trim(text.substr(close + 1, end - close - 1));
				h.body_pos = end + end_tag.size();
			} else {
				h.title = "";
				h.body_pos = close + 1;
			}
			headings.push_back(h);
			i = h.body_pos;
			continue;
		}
		if (tag_name == "section") {
			// section without an inner heading starts an untitled section
			Heading h;
			h.open_pos = i;
			h.content_pos = close + 1;
			h.title = "";
			h.body_pos = close + 1;
			headings.push_back(h);
		}
		i = close + 1;
	}
	if (headings.empty()) {
		if (!trim(text).empty()) {
			out.push_back({"", text});
		}
		return;
	}
	for (size_t k = 0; k < headings.size(); k++) {
		size_t body_end = (k + 1 < headings.size()) ? headings[k + 1].open_pos : text.size();
		DocSection section;
		section.heading = headings[k].title;
		section.body = text.substr(headings[k].body_pos, body_end - headings[k].body_pos);
		// drop heading-only shells produced by <section> wrappers around <hN>
		if (section.heading.empty() && trim(section.body).empty()) {
			continue;
		}
		out.push_back(section);
	}
}

void split_json(const std::string &text, std::vector<DocSection> &out) {
	json j;
	try {
		j = json::parse(text);
	} catch (const json::exception &e) {
		throw ParseException(std::string("json document: ") + e.what());
	}
	auto push_obj = [&](const json &obj) {
		DocSection section;
		if (obj.is_object()) {
			if (obj.contains("title")) {
				section.heading = obj.at("title").get<std::string>();
			}
			if (obj.contains("content")) {
				section.body = obj.at("content").get<std::string>();
			} else {
				section.body = obj.dump(2);
			}
		} else if (obj.is_string()) {
			section.body = obj.get<std::string>();
		} else {
			section.body = obj.dump(2);
		}
		out.push_back(std::move(section));
	};
	if (j.is_array()) {
		for (auto &el : j) {
			push_obj(el);
		}
	} else if (j.is_object()) {
		push_obj(j);
	} else {
		push_obj(j);
	}
}

} // namespace

TaggedCorpus tag_documents(const std::vector<std::pair<std::string, std::string>> &raw_docs,
                           const std::string &dialect_tag) {
	TaggedCorpus corpus;
	corpus.dialect_tag = dialect_tag;
	for (auto &[format, bytes] : raw_docs) {
		std::string fmt = to_lower(format);
		if (fmt == "md" || fmt == "markdown") {
			split_markdown(bytes, corpus.sections);
		} else if (fmt == "html" || fmt == "htm" || fmt == "sgml") {
			split_html(bytes, corpus.sections);
		} else if (fmt == "txt" || fmt == "text") {
			if (!trim(bytes).empty()) {
				corpus.sections.push_back({"", bytes});
			}
		} else if (fmt == "json") {
			split_json(bytes, corpus.sections);
		} else {
			throw UnsupportedFormatException(format);
		}
	}
	return corpus;
}

const std::vector<std::string> &default_seed_rule_patterns() {
	static const std::vector<std::string> PATTERNS = {
	    "identifier quoting requirements for reserved keywords and mixed case names",
	    "table alias syntax requirements and keyword restrictions",
	    "function argument count and signature restrictions",
	    "mandatory clause requirements unlike standard SQL",
	    "pagination and row limiting clause restrictions",
	};
	return PATTERNS;
}

MappingResult map_syntax(const TaggedCorpus &corpus, const CanonicalReference &csr,
                         const std::vector<std::string> &seed_rules, const EmbeddingProvider &embedder,
                         double tau_map) {
	MappingResult result;

	struct Query {
		KnowledgeTrack track;
		std::string category;
		std::string atomic_point;
		std::string rule_pattern;
		std::vector<double> vec;
	};
	std::vector<Query> queries;
	for (auto &cat : csr.categories) {
		for (auto &point : cat.atomic_points) {
			Query q;
			q.track = KnowledgeTrack::FUNCTION;
			q.category = cat.name;
			q.atomic_point = point.name;
			q.vec = embedder.embed(cat.name + " " + point.name + " " + point.ansi_sketch);
			queries.push_back(std::move(q));
		}
	}
	for (auto &pattern : seed_rules) {
		Query q;
		q.track = KnowledgeTrack::RULE;
		q.rule_pattern = pattern;
		q.vec = embedder.embed(pattern);
		queries.push_back(std::move(q));
	}

	for (size_t i = 0; i < corpus.sections.size(); i++) {
		auto &section = corpus.sections[i];
		std::string text = section.heading + "\n" + section.body;
		if (trim(text).empty()) {
			result.dropped++;
			continue;
		}
		auto vec = embedder.embed(text);
		const Query *best = nullptr;
		double best_score = -2.0;
		for (auto &q : queries) {
			double score = cosine_similarity(vec, q.vec);
			if (score > best_score) {
				best = &q;
				best_score = score;
			}
		}
		if (!best || best_score < tau_map) {
			result.dropped++;
			continue;
		}
		MappedSection m;
		m.section_index = i;
		m.track = best->track;
		m.category = best->category;
		m.atomic_point = best->atomic_point;
		m.rule_pattern = best->rule_pattern;
		m.score = best_score;
		result.mapped.push_back(std::move(m));
	}
	return result;
}

bool has_contrastive_cue(const std::string &text) {
	std::string lowered = to_lower(text);
	return lowered.find("unlike standard sql") != std::string::npos ||
	       lowered.find("must be quoted") != std::string::npos ||
	       lowered.find("in contrast to standard sql") != std::string::npos;
}

namespace {

// One value line of the form "KEY: value".
std::optional<std::string> parse_tagged_line(const std::string &line, const std::string &key) {
	std::string t = trim(line);
	if (!starts_with_ci(t, key + ":")) {
		return std::nullopt;
	}
	return trim(t.substr(key.size() + 1));
}

constexpr int GENERATION_RETRIES = 2;

} // namespace

GenerationStats generate_entries(const TaggedCorpus &corpus, const MappingResult &mapping,
                                 DialectId dialect, ChatBackend &llm, const TemplateStore &templates,
                                 KnowledgeBase &kb) {
	GenerationStats stats;
	for (auto &m : mapping.mapped) {
		auto &section = corpus.sections[m.section_index];
		std::string section_text = section.heading + "\n" + section.body;
		KnowledgeTrack track = m.track;
		if (has_contrastive_cue(section_text)) {
			track = KnowledgeTrack::RULE;
		}

		if (track == KnowledgeTrack::FUNCTION) {
			ChatRequest req;
			req.template_id = "kb_func_entry";
			req.rendered_prompt = templates.render(
			    "kb_func_entry", {{"dialect", dialect_name(dialect)},
			                      {"category", m.category},
			                      {"section", section_text}});
			bool done = false;
			for (int attempt = 0; attempt <= GENERATION_RETRIES && !done; attempt++) {
				auto reply = llm.complete(req);
				std::optional<std::string> scenarios, spec, impl;
				for (auto &line : split(reply.text, '\n')) {
					if (auto v = parse_tagged_line(line, "SCENARIOS")) {
						scenarios = v;
					} else if (auto v2 = parse_tagged_line(line, "SPEC")) {
						spec = v2;
					} else if (auto v3 = parse_tagged_line(line, "IMPL")) {
						impl = v3;
					}
				}
				if (scenarios && spec && impl && !scenarios->empty() && !impl->empty()) {
					FunctionEntry entry;
					entry.dialect = dialect;
					entry.category = m.category;
					for (auto &s : split(*scenarios, ';')) {
						if (!trim(s).empty()) {
							entry.scenarios.push_back(trim(s));
						}
					}
					entry.specification = *spec;
					entry.implementation = *impl;
					entry.origin = EntryOrigin::DISTILLED_FROM_DOCS;
					kb.add_function(std::move(entry));
					stats.functions_created++;
					done = true;
				}
			}
			if (!done) {
				stats.skipped++;
				stats.skipped_sections.push_back(section.heading);
			}
		} else {
			ChatRequest req;
			req.template_id = "kb_rule_entry";
			req.rendered_prompt = templates.render(
			    "kb_rule_entry",
			    {{"dialect", dialect_name(dialect)}, {"section", section_text}});
			bool done = false;
			for (int attempt = 0; attempt <= GENERATION_RETRIES && !done; attempt++) {
				auto reply = llm.complete(req);
				for (auto &line : split(reply.text, '\n')) {
					if (auto v = parse_tagged_line(line, "RULE")) {
						if (!v->empty()) {
							ConstraintEntry entry;
							entry.dialect = dialect;
							entry.rule_spec = *v;
							entry.origin = EntryOrigin::DISTILLED_FROM_DOCS;
							// error-code-looking tokens become signature globs
							for (auto &tok : word_tokens(section_text)) {
								bool numeric = !tok.empty() &&
								               std::all_of(tok.begin(), tok.end(), ::isdigit);
								if (numeric && tok.size() >= 4) {
									entry.signature_patterns.push_back("*" + tok + "*");
								}
							}
							kb.add_constraint(std::move(entry));
							stats.constraints_created++;
							done = true;
							break;
						}
					}
				}
			}
			if (!done) {
				stats.skipped++;
				stats.skipped_sections.push_back(section.heading);
			}
		}
	}
	return stats;
}

} // namespace dial
