#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace depthseg {

inline constexpr std::string_view kVersion = "0.1.0";

// Read-only view over a block of observations (rows) in any Eigen storage.
using MatrixView = Eigen::Ref<const Eigen::MatrixXd>;

enum class ErrorKind {
  InvalidArgument,
  InsufficientData,
  SingularScatter,
  DegenerateSubset,
  InfeasibleIntervals,
  EmptyIntervalSet,
  Parse,
};

// All library failures are reported through this exception. `module` names the
// component that raised it so front ends can report the origin.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(what), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

std::string_view to_string(ErrorKind kind);

// Inclusive 1-based range of observation indices [s, e].
struct Span {
  std::size_t s = 1;
  std::size_t e = 1;

  std::size_t length() const noexcept { return e - s + 1; }
  bool contains(const Span& other) const noexcept { return other.s >= s && other.e <= e; }
  friend bool operator==(const Span&, const Span&) = default;
};

// N time-ordered observations (rows) in d dimensions. Entries are finite.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(Eigen::MatrixXd values);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  // Rows s..e (1-based, inclusive).
  MatrixView span(const Span& sp) const;

 private:
  Eigen::MatrixXd values_;
};

}  // namespace depthseg
