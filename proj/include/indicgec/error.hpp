#pragma once

#include <stdexcept>
#include <string>

namespace indicgec {

// Base for every error raised by the library. Messages are meant to be shown
// to the user verbatim (file names, row numbers, offending values).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (corpus files, tokenizer specs, hypothesis files).
class DataError : public Error {
 public:
  using Error::Error;
};

// A configuration problem detected before any work is done.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace indicgec
