#pragma once

#include <stdexcept>
#include <string>

namespace dslab {

class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class IntegrationError : public std::runtime_error {
public:
    explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

class SeedingError : public std::runtime_error {
public:
    explicit SeedingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dslab
