#pragma once

#include <map>
#include <string>
#include <vector>

namespace dial {

// Prompt templates with {name} placeholders. Built-in defaults cover every
// template the pipeline uses; a templates directory (one .txt per template,
// filename = template id) overrides them.
class TemplateStore {
public:
	TemplateStore();

	// Loads every "<id>.txt" in dir over the defaults. Missing dir is an error.
	void load_directory(const std::string &dir);

	bool has(const std::string &id) const;
	const std::string &get(const std::string &id) const;
	void set(const std::string &id, const std::string &body);
	std::vector<std::string> ids() const;

	// Pure substitution. Throws UnknownTemplateException or
	// UnboundPlaceholderException naming the first unbound placeholder.
	std::string render(const std::string &id, const std::map<std::string, std::string> &bindings) const;

private:
	std::map<std::string, std::string> templates;
};

// Substitute {placeholders} in a raw template body.
std::string render_template(const std::string &body, const std::map<std::string, std::string> &bindings);

} // namespace dial
