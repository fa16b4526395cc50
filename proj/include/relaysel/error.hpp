#pragma once

#include <stdexcept>
#include <string>

namespace rsel {

enum class Status { Ok = 0, Validation = 2, Cap = 3, Io = 4 };

class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& msg) : std::runtime_error(msg), status_(status) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(Status::Validation, msg) {}
};

struct CapError : Error {
  explicit CapError(const std::string& msg) : Error(Status::Cap, msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(Status::Io, msg) {}
};

}  // namespace rsel
