#pragma once

#include <stdexcept>
#include <string>

namespace stabreg {

// Caller handed us something outside an operation's contract.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An invariant the library itself maintains was broken.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A trace or config file that cannot be interpreted.
class MalformedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stabreg
