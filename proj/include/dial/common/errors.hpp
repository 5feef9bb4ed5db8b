#pragma once

#include <stdexcept>
#include <string>

namespace dial {

class DialException : public std::runtime_error {
public:
	explicit DialException(const std::string &msg) : std::runtime_error(msg) {
	}
};

class ParseException : public DialException {
public:
	ParseException(const std::string &msg, size_t position)
	    : DialException(msg + " (at position " + std::to_string(position) + ")"), position(position) {
	}
	explicit ParseException(const std::string &msg) : DialException(msg), position(0) {
	}

	size_t position;
};

class DuplicateObjectException : public DialException {
public:
	explicit DuplicateObjectException(const std::string &name)
	    : DialException("duplicate object: " + name), object_name(name) {
	}

	std::string object_name;
};

class IoException : public DialException {
public:
	using DialException::DialException;
};

class CorruptRecordException : public DialException {
public:
	CorruptRecordException(const std::string &file, size_t line, const std::string &detail)
	    : DialException("corrupt record in " + file + " line " + std::to_string(line) + ": " + detail),
	      line_number(line) {
	}

	size_t line_number;
};

class UnsupportedFormatException : public DialException {
public:
	explicit UnsupportedFormatException(const std::string &fmt)
	    : DialException("unsupported document format: " + fmt) {
	}
};

class EmptyRepositoryException : public DialException {
public:
	explicit EmptyRepositoryException(const std::string &detail) : DialException(detail) {
	}
};

// LLM gateway failures.
class BackendUnavailableException : public DialException {
public:
	using DialException::DialException;
};

class FixtureMissException : public DialException {
public:
	explicit FixtureMissException(const std::string &key)
	    : DialException("replay fixture miss for key: " + key), key(key) {
	}

	std::string key;
};

class MalformedReplyException : public DialException {
public:
	using DialException::DialException;
};

class UnknownTemplateException : public DialException {
public:
	explicit UnknownTemplateException(const std::string &id) : DialException("unknown template: " + id) {
	}
};

class UnboundPlaceholderException : public DialException {
public:
	explicit UnboundPlaceholderException(const std::string &name)
	    : DialException("unbound placeholder: {" + name + "}"), placeholder(name) {
	}

	std::string placeholder;
};

// Structured-output contract violations from the model.
class PlanFormatException : public DialException {
public:
	using DialException::DialException;
};

class BlacklistViolationException : public DialException {
public:
	using DialException::DialException;
};

class GenerationFormatException : public DialException {
public:
	using DialException::DialException;
};

class UnknownCategoryException : public DialException {
public:
	using DialException::DialException;
};

class AdapterUnavailableException : public DialException {
public:
	using DialException::DialException;
};

class InvalidPatternException : public DialException {
public:
	using DialException::DialException;
};

class MissingDialectOutcomeException : public DialException {
public:
	using DialException::DialException;
};

// Repair budgets spent without reaching the exit condition; the trajectory
// stays available on the pipeline result for diagnosis.
class RecoveryExhaustedException : public DialException {
public:
	using DialException::DialException;
};

class VerificationExhaustedException : public DialException {
public:
	using DialException::DialException;
};

} // namespace dial
