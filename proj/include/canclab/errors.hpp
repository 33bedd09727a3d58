#pragma once

#include <stdexcept>
#include <string>

namespace canclab {

// Violated mathematical precondition (bad T, mismatched lengths, ...).
struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration; `field` is the offending config path.
struct schema_error : std::runtime_error {
  std::string field;
  schema_error(std::string field_, const std::string& what)
      : std::runtime_error(what), field(std::move(field_)) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace canclab
