#pragma once

#include <stdexcept>
#include <string>

namespace kx {

// Base for all domain errors. name() is the stable identifier surfaced by
// the CLI in its machine-readable error output.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class MalformedHeading : public Error {
public:
    MalformedHeading(std::size_t line, const std::string& message)
        : Error("MalformedHeading", message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnknownKnowledgePoint : public Error {
public:
    explicit UnknownKnowledgePoint(const std::string& kp_id)
        : Error("UnknownKnowledgePoint", "unknown knowledge point: " + kp_id) {}
};

class UnknownDocument : public Error {
public:
    explicit UnknownDocument(const std::string& document_id)
        : Error("UnknownDocument", "annotation references unknown document: " + document_id) {}
};

class MissingDocument : public Error {
public:
    explicit MissingDocument(const std::string& message) : Error("MissingDocument", message) {}
};

class ReaderUnavailable : public Error {
public:
    explicit ReaderUnavailable(const std::string& message) : Error("ReaderUnavailable", message) {}
};

class MalformedResponse : public Error {
public:
    explicit MalformedResponse(const std::string& message) : Error("MalformedResponse", message) {}
};

class TemplateExhaustion : public Error {
public:
    explicit TemplateExhaustion(const std::string& message) : Error("TemplateExhaustion", message) {}
};

class IOError : public Error {
public:
    explicit IOError(const std::string& message) : Error("IOError", message) {}
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& message) : Error("InvalidInput", message) {}
};

}  // namespace kx
