#pragma once

#include <stdexcept>
#include <string>

namespace znnqp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class IllPosed : public Error {
 public:
  IllPosed(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace znnqp
