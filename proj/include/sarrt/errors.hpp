#ifndef SARRT_ERRORS_HPP
#define SARRT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sarrt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A law descriptor violates its invariants (bad k, beta, theta, grid...).
class InvalidLaw : public Error {
public:
  using Error::Error;
};

/// The law mini-language could not be parsed. `token()` is the offending token.
class LawParseError : public InvalidLaw {
public:
  LawParseError(std::string token, const std::string& message)
      : InvalidLaw(message), token_(std::move(token)) {}

  const std::string& token() const noexcept { return token_; }

private:
  std::string token_;
};

class QuadratureNonConvergence : public Error {
public:
  using Error::Error;
};

class InvalidTruncation : public Error {
public:
  using Error::Error;
};

class NoRootInBracket : public Error {
public:
  using Error::Error;
};

class BracketFailure : public Error {
public:
  using Error::Error;
};

class CapacityExceeded : public Error {
public:
  using Error::Error;
};

class DegenerateSigma : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  IoError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

}  // namespace sarrt

#endif
