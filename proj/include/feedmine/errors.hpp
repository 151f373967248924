#pragma once

#include <stdexcept>
#include <string>

namespace feedmine {

/// Bad or missing configuration (catalogs, lexicons, CLI flags).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Unparseable input that is not recoverable at record level.
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Requested item absent (keyword not in text, unknown topic, ...).
class NotFoundError : public std::runtime_error {
  public:
    explicit NotFoundError(const std::string &msg) : std::runtime_error(msg) {}
};

/// A classification client replied with something outside its contract.
class ProtocolError : public std::runtime_error {
  public:
    explicit ProtocolError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Transient client/transport failure; the caller may retry.
class RetryableError : public std::runtime_error {
  public:
    RetryableError(std::string post_id, const std::string &msg)
        : std::runtime_error(msg), post_id_(std::move(post_id)) {}
    const std::string &post_id() const noexcept { return post_id_; }

  private:
    std::string post_id_;
};

/// Model fitting failed (degenerate design matrix, too-short series).
class FitError : public std::runtime_error {
  public:
    explicit FitError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace feedmine
