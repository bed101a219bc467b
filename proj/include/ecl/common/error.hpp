#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ecl {

// Base for every error raised by the library. In-world failures (collisions,
// failed interactions) are StepOutcome values and never show up here.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class PlacementError : public Error {
 public:
  PlacementError(std::string class_name, const std::string& what)
      : Error(what), class_name_(std::move(class_name)) {}
  const std::string& class_name() const { return class_name_; }

 private:
  std::string class_name_;
};

class UnknownConceptError : public Error {
 public:
  explicit UnknownConceptError(std::string word)
      : Error("unknown concept word '" + word + "'"), word_(std::move(word)) {}
  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

class AmbiguityError : public Error {
 public:
  AmbiguityError(const std::string& what, std::vector<std::string> candidates)
      : Error(what), candidates_(std::move(candidates)) {}
  const std::vector<std::string>& candidates() const { return candidates_; }

 private:
  std::vector<std::string> candidates_;
};

class UnreachableError : public Error {
 public:
  using Error::Error;
};

}  // namespace ecl
